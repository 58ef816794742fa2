#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "randinfo/ellipsoid.hpp"
#include "randinfo/rng.hpp"

namespace randinfo::rec {

// n x m matrix of i.i.d. standard normals, regenerable bit-exactly from its
// stream (entries drawn row-major from a fresh generator).
struct GaussianInfo {
  Eigen::MatrixXd entries;
  RngStream source;

  std::size_t rows() const { return std::size_t(entries.rows()); }
  std::size_t cols() const { return std::size_t(entries.cols()); }
};

GaussianInfo sample_gaussian_info(std::size_t n, std::size_t m, RngStream source);

// Orthonormal basis of ker(G), one column per kernel dimension (may be empty).
struct KernelBasis {
  Eigen::MatrixXd basis;

  std::size_t ambient_dim() const { return std::size_t(basis.rows()); }
  std::size_t kernel_dim() const { return std::size_t(basis.cols()); }
};

KernelBasis kernel_basis(const Eigen::MatrixXd& info);
inline KernelBasis kernel_basis(const GaussianInfo& info) {
  return kernel_basis(info.entries);
}

// sup { x_i^2 : ||x||_2 = 1, G x = 0 }: squared norm of row i (1-based) of the
// kernel basis. Throws EmptyKernel when the kernel is trivial.
double kernel_coordinate_mass(const KernelBasis& kernel, std::size_t i);

// Radius of the kernel section of a p=2 ellipsoid: largest ||x||_2 over
// x = Vc with ||diag(sigma)^-1 x||_2 <= 1, via a symmetric eigensolve.
double section_radius_exact_p2(const ell::LpEllipsoid& e, const KernelBasis& kernel);

// Lower bound on the section radius for any p > 0: line-searched ascent on
// the scale-invariant quotient ||c||_2 / ||(Vc)_j / sigma_j||_p with random
// restarts. Every evaluation corresponds to a feasible boundary point, so the
// result never exceeds the true radius.
double section_radius_lower(const ell::LpEllipsoid& e, const KernelBasis& kernel,
                            std::size_t restarts, std::size_t steps, Rng& rng);

// Minimum l1 norm subject to G z = y (basis pursuit), by operator splitting
// with a least-squares polish on the detected support. The result satisfies
// ||G z - y||_2 <= tol * max(1, ||y||_2); throws Infeasible if no iterate
// reaches that residual.
Eigen::VectorXd decode_l1(const Eigen::MatrixXd& info, const Eigen::VectorXd& y,
                          double tol, std::size_t max_iters = 4000);

// Iteratively reweighted least squares for min ||z||_r, r in (0,1], subject
// to G z = y. The smoothed objective is non-increasing; the smoothing level
// halves when progress stalls (floor 1e-12). Appends the objective value per
// iteration to *trace when given.
Eigen::VectorXd decode_lr(const Eigen::MatrixXd& info, const Eigen::VectorXd& y,
                          double r, std::size_t iters,
                          std::vector<double>* trace = nullptr);

// Exact restricted isometry constant of order s by enumerating all column
// subsets. Throws TooManySubsets past the enumeration cap.
double rip_bruteforce(const Eigen::MatrixXd& a, std::size_t s,
                      std::uint64_t subset_cap = 2000000);

enum class Decoder { l1, lr };

std::string decoder_name(Decoder d);

struct RecoveryTrial {
  std::size_t trial = 0;
  double error = 0.0;
  std::uint64_t seed = 0;
};

struct RecoveryStats {
  std::size_t m = 0;
  std::size_t n = 0;
  Decoder decoder = Decoder::l1;
  std::vector<RecoveryTrial> trials;
  double max_error = 0.0;
  double mean_error = 0.0;
  double median_error = 0.0;
};

// Draws boundary signals (flat sparse-ish worst cases mixed with random
// directions), measures each with fresh Gaussian information scaled by
// n^(-1/2), decodes, and reports the l2 reconstruction errors.
RecoveryStats recovery_error_experiment(const ell::LpEllipsoid& e, std::size_t n,
                                        std::size_t trials, Decoder decoder,
                                        RngStream stream);

}  // namespace randinfo::rec
