#pragma once

#include <cstddef>
#include <vector>

#include "randinfo/rng.hpp"

namespace randinfo::ell {

// Diagonal lp ellipsoid: the set of x with ||(x_j / sigma_j)_j||_p <= 1.
// Semiaxes must be positive and non-increasing. p may be infinity; p < 1
// gives a quasi-norm ball (still star-shaped, not convex).
struct LpEllipsoid {
  double p;
  std::vector<double> semiaxes;

  LpEllipsoid(double p_, std::vector<double> semiaxes_);
  std::size_t dim() const { return semiaxes.size(); }
};

// Polynomially decaying semiaxes sigma_j = j^(-lambda), j = 1..m.
// lambda = 0 (constant sequence) is allowed.
struct PolySemiaxes {
  double lambda;
  std::size_t m;

  PolySemiaxes(double lambda_, std::size_t m_);
  std::vector<double> semiaxes() const;
  LpEllipsoid ellipsoid(double p) const;
};

// ||x||_q for q in (0, inf]; max norm at q = inf. Scaled to avoid overflow.
double lq_norm(const std::vector<double>& x, double q);

double norm_p_sigma(const std::vector<double>& x, const LpEllipsoid& e);
bool contains(const LpEllipsoid& e, const std::vector<double>& x);

// ||(i^(1/p - 1/q) x*_i)_i||_q with x* the non-increasing rearrangement of
// absolute values (1-based i, ties broken by original index).
double lorentz_norm(const std::vector<double>& x, double p, double q);

// sup over the ellipsoid of <u, t>; equals the dual norm ||(sigma_j u_j)||_p*.
// Throws NonConvex for p < 1.
double support_function(const LpEllipsoid& e, const std::vector<double>& u);

// lq norm of x with its s largest-magnitude entries removed (ties by index).
double best_s_term_error(const std::vector<double>& x, std::size_t s, double q);

struct SparseWitness {
  std::vector<double> point;
  double value = 0.0;
};

// Boundary vector supported on the first 2s coordinates, all equal, whose
// best s-term error attains the worst-case rate over the ellipsoid.
SparseWitness worst_s_term_witness(const PolySemiaxes& poly, double p,
                                   std::size_t s, double q);

// Radius of the coordinate section {x_1 = ... = x_{n-1} = 0} of the diagonal
// operator, measured lq over lp: (sum_{j>=n} sigma_j^r)^(1/r) with
// 1/r = 1/q - 1/p (sup of the tail when r = inf). Requires q <= p; n 1-based.
double gelfand_diag(const std::vector<double>& semiaxes, double p, double q,
                    std::size_t n);

// Independent check of gelfand_diag: maximize ||diag(sigma) x||_q over the lp
// ball restricted to coordinates n..m by multiplicative ascent with
// multi-start. Every iterate is feasible, so the result is a lower bound that
// converges to the section radius.
double section_sup_ascent(const std::vector<double>& semiaxes, double p,
                          double q, std::size_t n, Rng& rng,
                          std::size_t restarts = 8, std::size_t iters = 30000);

// Exact minimal worst-case radius over n linear measurements, valid for
// p >= 2 (q = 2 target): the (n+1)-st section radius.
double minimal_radius(const LpEllipsoid& e, std::size_t n);

// Decay exponent of the minimal radius for sigma_j = j^(-lambda), 1 <= p <= inf.
double minimal_radius_order(const PolySemiaxes& poly, double p);

// a_k = sqrt(2) Gamma((k+1)/2) / Gamma(k/2) = E ||standard normal in R^k||_2.
double gaussian_tail_factor(std::size_t k);

struct MeanWidthEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

// Monte Carlo mean width of the ellipsoid clipped to the l2 ball of radius
// rho: (1/a_m) E sup { <g, t> : t in E, ||t||_2 <= rho }. The inner sup is
// the exact support function for rho = inf and a projected ascent lower
// bound otherwise. Throws NonConvex for p < 1.
MeanWidthEstimate mean_width_mc(const LpEllipsoid& e, double rho,
                                std::size_t trials, Rng& rng);

}  // namespace randinfo::ell
