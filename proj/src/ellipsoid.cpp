#include "randinfo/ellipsoid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "randinfo/errors.hpp"

namespace randinfo::ell {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool valid_exponent(double p) { return p > 0.0 && !std::isnan(p); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Conjugate exponent, with the p = 1 and p = inf endpoints.
double conjugate(double p) {
  if (p == 1.0) return kInf;
  if (p == kInf) return 1.0;
  return p / (p - 1.0);
}

}  // namespace

LpEllipsoid::LpEllipsoid(double p_, std::vector<double> semiaxes_)
    : p(p_), semiaxes(std::move(semiaxes_)) {
  if (!valid_exponent(p)) throw ParameterOutOfRange("ellipsoid exponent must be positive");
  if (semiaxes.empty()) throw ParameterOutOfRange("ellipsoid needs at least one semiaxis");
  for (std::size_t j = 0; j < semiaxes.size(); ++j) {
    if (!(semiaxes[j] > 0.0) || !std::isfinite(semiaxes[j]))
      throw ParameterOutOfRange("semiaxes must be positive and finite");
    if (j > 0 && semiaxes[j] > semiaxes[j - 1])
      throw ParameterOutOfRange("semiaxes must be non-increasing");
  }
}

PolySemiaxes::PolySemiaxes(double lambda_, std::size_t m_) : lambda(lambda_), m(m_) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ParameterOutOfRange("decay exponent must be non-negative");
  if (m == 0) throw ParameterOutOfRange("dimension must be at least 1");
}

std::vector<double> PolySemiaxes::semiaxes() const {
  std::vector<double> s(m);
  for (std::size_t j = 0; j < m; ++j) s[j] = std::pow(double(j + 1), -lambda);
  return s;
}

LpEllipsoid PolySemiaxes::ellipsoid(double p) const { return LpEllipsoid(p, semiaxes()); }

double lq_norm(const std::vector<double>& x, double q) {
  if (!valid_exponent(q)) throw ParameterOutOfRange("norm exponent must be positive");
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::fabs(v));
  if (q == kInf || peak == 0.0) return peak;
  double acc = 0.0;
  for (double v : x) {
    if (v != 0.0) acc += std::pow(std::fabs(v) / peak, q);
  }
  return peak * std::pow(acc, 1.0 / q);
}

double norm_p_sigma(const std::vector<double>& x, const LpEllipsoid& e) {
  if (x.size() != e.dim()) throw DimensionMismatch("vector/ellipsoid dimension mismatch");
  std::vector<double> scaled(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) scaled[j] = x[j] / e.semiaxes[j];
  return lq_norm(scaled, e.p);
}

bool contains(const LpEllipsoid& e, const std::vector<double>& x) {
  return norm_p_sigma(x, e) <= 1.0 + 1e-12;
}

double lorentz_norm(const std::vector<double>& x, double p, double q) {
  if (!valid_exponent(p) || !valid_exponent(q))
    throw ParameterOutOfRange("Lorentz exponents must be positive");
  std::vector<double> mags(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mags[i] = std::fabs(x[i]);
  std::stable_sort(mags.begin(), mags.end(), std::greater<double>());
  const double expo = (p == kInf ? 0.0 : 1.0 / p) - (q == kInf ? 0.0 : 1.0 / q);
  for (std::size_t i = 0; i < mags.size(); ++i)
    mags[i] *= std::pow(double(i + 1), expo);
  return lq_norm(mags, q);
}

double support_function(const LpEllipsoid& e, const std::vector<double>& u) {
  if (e.p < 1.0) throw NonConvex("support function needs a convex ellipsoid (p >= 1)");
  if (u.size() != e.dim()) throw DimensionMismatch("vector/ellipsoid dimension mismatch");
  std::vector<double> scaled(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) scaled[j] = e.semiaxes[j] * u[j];
  return lq_norm(scaled, conjugate(e.p));
}

double best_s_term_error(const std::vector<double>& x, std::size_t s, double q) {
  if (s >= x.size()) return 0.0;
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(x[a]) > std::fabs(x[b]);
  });
  std::vector<double> rest;
  rest.reserve(x.size() - s);
  for (std::size_t i = s; i < order.size(); ++i) rest.push_back(x[order[i]]);
  return lq_norm(rest, q);
}

SparseWitness worst_s_term_witness(const PolySemiaxes& poly, double p,
                                   std::size_t s, double q) {
  if (!valid_exponent(p) || !valid_exponent(q))
    throw ParameterOutOfRange("witness exponents must be positive");
  if (s < 1 || 2 * s > poly.m)
    throw ParameterOutOfRange("witness needs 1 <= s <= m/2");
  const double pinv = p == kInf ? 0.0 : 1.0 / p;
  const double qinv = q == kInf ? 0.0 : 1.0 / q;
  if (poly.lambda < qinv - pinv)
    throw ParameterOutOfRange("decay too slow for a bounded witness");

  const std::vector<double> sigma = poly.semiaxes();
  double level;
  if (p == kInf) {
    level = sigma[2 * s - 1];
  } else {
    double acc = 0.0;
    for (std::size_t i = 0; i < 2 * s; ++i) acc += std::pow(sigma[i], -p);
    level = std::pow(acc, -1.0 / p);
  }
  SparseWitness w;
  w.point.assign(poly.m, 0.0);
  for (std::size_t i = 0; i < 2 * s; ++i) w.point[i] = level;
  w.value = best_s_term_error(w.point, s, q);
  return w;
}

double gelfand_diag(const std::vector<double>& semiaxes, double p, double q,
                    std::size_t n) {
  if (!valid_exponent(p) || !valid_exponent(q))
    throw ParameterOutOfRange("exponents must be positive");
  if (q > p) throw UnsupportedRegime("only q <= p has an exact section formula");
  if (n < 1 || n > semiaxes.size())
    throw ParameterOutOfRange("section index out of range");
  const double pinv = p == kInf ? 0.0 : 1.0 / p;
  const double qinv = q == kInf ? 0.0 : 1.0 / q;
  const double rinv = qinv - pinv;
  std::vector<double> tail(semiaxes.begin() + std::ptrdiff_t(n - 1), semiaxes.end());
  if (rinv == 0.0) return *std::max_element(tail.begin(), tail.end());
  return lq_norm(tail, 1.0 / rinv);
}

double section_sup_ascent(const std::vector<double>& semiaxes, double p,
                          double q, std::size_t n, Rng& rng,
                          std::size_t restarts, std::size_t iters) {
  if (!valid_exponent(p) || !valid_exponent(q))
    throw ParameterOutOfRange("exponents must be positive");
  if (q > p) throw UnsupportedRegime("only q <= p is supported");
  if (n < 1 || n > semiaxes.size())
    throw ParameterOutOfRange("section index out of range");

  const std::vector<double> sigma(semiaxes.begin() + std::ptrdiff_t(n - 1),
                                  semiaxes.end());
  const std::size_t k = sigma.size();

  // Any feasible point gives a lower bound, so track the best value seen.
  // Vertices of the feasible set are always evaluated; they are optimal
  // whenever the objective/constraint exponents coincide.
  double best = 0.0;
  for (double s : sigma) best = std::max(best, s);

  if (p == kInf) {
    // Box constraint |x_j| <= 1: the objective is monotone, so the all-ones
    // corner is optimal for any q.
    std::vector<double> ones(k, 1.0);
    for (std::size_t j = 0; j < k; ++j) ones[j] *= sigma[j];
    return std::max(best, lq_norm(ones, q));
  }

  // Finite p > q (coordinates w_j = x_j^p on the simplex): maximize
  // F(w) = sum c_j w_j^alpha, alpha = q/p < 1, c_j = sigma_j^q. The
  // multiplicative update w <- normalize(c w^alpha) contracts log-linearly
  // to the interior optimum; restarts guard against flat regions.
  const double alpha = q / p;
  std::vector<double> c(k);
  double cmax = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    c[j] = std::pow(sigma[j], q);
    cmax = std::max(cmax, c[j]);
  }
  auto value_of = [&](const std::vector<double>& w) {
    double f = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      if (w[j] > 0.0) f += c[j] * std::pow(w[j], alpha);
    return std::pow(f, 1.0 / q);
  };
  auto run = [&](std::vector<double> w) {
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= total;
    best = std::max(best, value_of(w));
    std::vector<double> next(k);
    for (std::size_t it = 0; it < iters; ++it) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        next[j] = (c[j] / cmax) * std::pow(w[j], alpha);
        sum += next[j];
      }
      if (sum <= 0.0) break;
      for (std::size_t j = 0; j < k; ++j) w[j] = next[j] / sum;
      best = std::max(best, value_of(w));
    }
  };

  run(std::vector<double>(k, 1.0));
  for (std::size_t r = 0; r + 1 < restarts; ++r) {
    std::vector<double> w(k);
    for (auto& v : w) v = std::max(-std::log(rng.next_double_open()), 1e-12);
    run(std::move(w));
  }
  return best;
}

double minimal_radius(const LpEllipsoid& e, std::size_t n) {
  if (e.p < 2.0)
    throw UnsupportedRegime("exact radius formula needs p >= 2");
  if (n + 1 > e.dim()) throw ParameterOutOfRange("budget must be below the dimension");
  return gelfand_diag(e.semiaxes, e.p, 2.0, n + 1);
}

double minimal_radius_order(const PolySemiaxes& poly, double p) {
  if (!(p >= 1.0)) throw ParameterOutOfRange("order formula needs p >= 1");
  const double pinv = p == kInf ? 0.0 : 1.0 / p;
  const double threshold = std::max(0.5 - pinv, 0.0);
  if (!(poly.lambda > threshold))
    throw ParameterOutOfRange("decay too slow for the order formula");
  if (p < 2.0) {
    const double pstar = conjugate(p);
    if (pstar != kInf && poly.lambda < 1.0 / pstar) return poly.lambda * pstar / 2.0;
  }
  return poly.lambda + pinv - 0.5;
}

double gaussian_tail_factor(std::size_t k) {
  if (k < 1) throw ParameterOutOfRange("tail factor needs k >= 1");
  const double kd = double(k);
  return std::sqrt(2.0) * std::exp(std::lgamma((kd + 1.0) / 2.0) - std::lgamma(kd / 2.0));
}

namespace {

// Exact maximizer of <u, .> over the ellipsoid (p >= 1), used to seed the
// clipped ascent.
std::vector<double> support_argmax(const LpEllipsoid& e, const std::vector<double>& u) {
  const std::size_t m = e.dim();
  std::vector<double> t(m, 0.0);
  if (e.p == 1.0) {
    std::size_t jstar = 0;
    double bestv = -1.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = e.semiaxes[j] * std::fabs(u[j]);
      if (v > bestv) {
        bestv = v;
        jstar = j;
      }
    }
    t[jstar] = std::copysign(e.semiaxes[jstar], u[jstar]);
    return t;
  }
  if (e.p == kInf) {
    for (std::size_t j = 0; j < m; ++j)
      t[j] = std::copysign(e.semiaxes[j], u[j]);
    return t;
  }
  const double pstar = conjugate(e.p);
  std::vector<double> y(m);
  double peak = 0.0;
  for (std::size_t j = 0; j < m; ++j) peak = std::max(peak, e.semiaxes[j] * std::fabs(u[j]));
  if (peak == 0.0) return t;
  for (std::size_t j = 0; j < m; ++j) {
    const double w = e.semiaxes[j] * std::fabs(u[j]) / peak;
    y[j] = std::copysign(std::pow(w, pstar - 1.0), u[j]);
  }
  const double scale = lq_norm(y, e.p);
  for (std::size_t j = 0; j < m; ++j) t[j] = e.semiaxes[j] * y[j] / scale;
  return t;
}

// Lower bound on sup { <g, t> : t in E, ||t||_2 <= rho } by ascent along g
// with radial feasibility projection and several starts.
double clipped_sup(const LpEllipsoid& e, double rho, const std::vector<double>& g) {
  const std::size_t m = e.dim();
  const double gnorm = l2(g);
  if (gnorm == 0.0) return 0.0;

  auto project = [&](std::vector<double>& t) {
    const double scale = std::max(norm_p_sigma(t, e), l2(t) / rho);
    if (scale > 1.0)
      for (auto& v : t) v /= scale;
  };
  double best = 0.0;
  auto ascend = [&](std::vector<double> t) {
    project(t);
    best = std::max(best, dot(g, t));
    const double eta0 = std::min(rho, e.semiaxes[0]);
    for (std::size_t it = 0; it < 80; ++it) {
      const double eta = eta0 / std::sqrt(double(it + 1));
      for (std::size_t j = 0; j < m; ++j) t[j] += eta * g[j] / gnorm;
      project(t);
      best = std::max(best, dot(g, t));
    }
  };

  ascend(support_argmax(e, g));
  std::vector<double> cap(m);
  for (std::size_t j = 0; j < m; ++j) cap[j] = rho * g[j] / gnorm;
  ascend(std::move(cap));
  std::size_t jstar = 0;
  double bestv = -1.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double v = e.semiaxes[j] * std::fabs(g[j]);
    if (v > bestv) {
      bestv = v;
      jstar = j;
    }
  }
  std::vector<double> vertex(m, 0.0);
  vertex[jstar] = std::copysign(e.semiaxes[jstar], g[jstar]);
  ascend(std::move(vertex));
  return best;
}

}  // namespace

MeanWidthEstimate mean_width_mc(const LpEllipsoid& e, double rho,
                                std::size_t trials, Rng& rng) {
  if (e.p < 1.0) throw NonConvex("mean width needs a convex ellipsoid (p >= 1)");
  if (!(rho > 0.0)) throw ParameterOutOfRange("clip radius must be positive");
  if (trials == 0) throw ParameterOutOfRange("need at least one trial");
  const std::size_t m = e.dim();
  double sum = 0.0;
  double sumsq = 0.0;
  std::vector<double> g(m);
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& v : g) v = rng.next_normal();
    const double sup = rho == kInf ? support_function(e, g) : clipped_sup(e, rho, g);
    sum += sup;
    sumsq += sup * sup;
  }
  const double n = double(trials);
  const double mean = sum / n;
  const double var = std::max(sumsq / n - mean * mean, 0.0);
  const double am = gaussian_tail_factor(m);
  return {mean / am, std::sqrt(var / n) / am, trials};
}

}  // namespace randinfo::ell
