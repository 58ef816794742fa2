#include "randinfo/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "randinfo/errors.hpp"

namespace randinfo::rec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd soft_threshold(const VectorXd& v, double kappa) {
  VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::fabs(v[i]) - kappa;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

}  // namespace

GaussianInfo sample_gaussian_info(std::size_t n, std::size_t m, RngStream source) {
  if (m < 1) throw ParameterOutOfRange("information needs at least one column");
  GaussianInfo info;
  info.source = source;
  info.entries.resize(Eigen::Index(n), Eigen::Index(m));
  Rng rng(source);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      info.entries(Eigen::Index(i), Eigen::Index(j)) = rng.next_normal();
  return info;
}

KernelBasis kernel_basis(const MatrixXd& info) {
  const Eigen::Index m = info.cols();
  if (info.rows() == 0) return {MatrixXd::Identity(m, m)};
  Eigen::ColPivHouseholderQR<MatrixXd> qr(info.transpose());
  const Eigen::Index rank = qr.rank();
  MatrixXd q = qr.householderQ();
  return {q.rightCols(m - rank)};
}

double kernel_coordinate_mass(const KernelBasis& kernel, std::size_t i) {
  if (kernel.kernel_dim() == 0) throw EmptyKernel("information has full rank");
  if (i < 1 || i > kernel.ambient_dim())
    throw ParameterOutOfRange("coordinate index out of range");
  return kernel.basis.row(Eigen::Index(i - 1)).squaredNorm();
}

double section_radius_exact_p2(const ell::LpEllipsoid& e, const KernelBasis& kernel) {
  if (e.p != 2.0) throw UnsupportedRegime("exact section radius needs p = 2");
  if (kernel.ambient_dim() != e.dim())
    throw DimensionMismatch("kernel/ellipsoid dimension mismatch");
  if (kernel.kernel_dim() == 0) throw EmptyKernel("information has full rank");
  MatrixXd w = kernel.basis;
  for (Eigen::Index j = 0; j < w.rows(); ++j) w.row(j) /= e.semiaxes[std::size_t(j)];
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(w.transpose() * w);
  const double lam = std::max(es.eigenvalues()(0), 1e-300);
  return 1.0 / std::sqrt(lam);
}

namespace {

// Value of the scale-invariant quotient at direction c, plus its ascent
// direction. The quotient equals the l2 norm of the boundary point V c
// rescaled onto the ellipsoid, so any c gives a feasible lower bound.
struct QuotientEval {
  double value = 0.0;
  VectorXd grad;
};

QuotientEval eval_quotient(const ell::LpEllipsoid& e, const MatrixXd& v,
                           const VectorXd& c) {
  QuotientEval out;
  const double cn = c.norm();
  if (cn == 0.0) {
    out.grad = VectorXd::Zero(c.size());
    return out;
  }
  const VectorXd x = v * c;
  const std::size_t m = e.dim();
  std::vector<double> scaled(m);
  double peak = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    scaled[j] = std::fabs(x[Eigen::Index(j)]) / e.semiaxes[j];
    peak = std::max(peak, scaled[j]);
  }
  if (peak == 0.0) {
    out.grad = VectorXd::Zero(c.size());
    return out;
  }

  double norm;
  VectorXd d = VectorXd::Zero(x.size());
  if (e.p == kInf) {
    norm = peak;
    std::size_t jstar = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (scaled[j] == peak) {
        jstar = j;
        break;
      }
    d[Eigen::Index(jstar)] =
        std::copysign(1.0 / e.semiaxes[jstar], x[Eigen::Index(jstar)]);
  } else {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (scaled[j] > 0.0) acc += std::pow(scaled[j] / peak, e.p);
    norm = peak * std::pow(acc, 1.0 / e.p);
    for (std::size_t j = 0; j < m; ++j) {
      if (scaled[j] == 0.0) continue;
      const double u = scaled[j] / norm;
      d[Eigen::Index(j)] = std::copysign(std::pow(u, e.p - 1.0) / e.semiaxes[j],
                                         x[Eigen::Index(j)]);
    }
  }
  out.value = cn / norm;
  // Gradient of log(||c|| / N(Vc)).
  out.grad = c / (cn * cn) - (v.transpose() * d) / norm;
  return out;
}

}  // namespace

double section_radius_lower(const ell::LpEllipsoid& e, const KernelBasis& kernel,
                            std::size_t restarts, std::size_t steps, Rng& rng) {
  if (!(e.p > 0.0)) throw ParameterOutOfRange("exponent must be positive");
  if (kernel.ambient_dim() != e.dim())
    throw DimensionMismatch("kernel/ellipsoid dimension mismatch");
  const Eigen::Index k = Eigen::Index(kernel.kernel_dim());
  if (k == 0) return 0.0;

  const MatrixXd& v = kernel.basis;
  double best = 0.0;
  auto run = [&](VectorXd c) {
    if (c.norm() == 0.0) return;
    c /= c.norm();
    int flat = 0;
    for (std::size_t it = 0; it < steps; ++it) {
      const QuotientEval at = eval_quotient(e, v, c);
      best = std::max(best, at.value);
      const double gn = at.grad.norm();
      if (gn < 1e-15) break;
      const VectorXd dir = at.grad / gn;
      // Golden-section search along the ascent direction.
      double lo = 0.0, hi = 1.5;
      const double phi = 0.61803398874989484;
      double t1 = hi - phi * (hi - lo), t2 = lo + phi * (hi - lo);
      auto probe = [&](double t) {
        return eval_quotient(e, v, (c + t * dir).eval()).value;
      };
      double f1 = probe(t1), f2 = probe(t2);
      for (int ls = 0; ls < 40; ++ls) {
        if (f1 < f2) {
          lo = t1;
          t1 = t2;
          f1 = f2;
          t2 = lo + phi * (hi - lo);
          f2 = probe(t2);
        } else {
          hi = t2;
          t2 = t1;
          f2 = f1;
          t1 = hi - phi * (hi - lo);
          f1 = probe(t1);
        }
      }
      const double tstar = 0.5 * (lo + hi);
      const double fstar = std::max(f1, f2);
      if (fstar <= best * (1.0 + 1e-13)) {
        if (++flat >= 3) break;
      } else {
        flat = 0;
      }
      best = std::max(best, fstar);
      c += tstar * dir;
      c /= c.norm();
    }
  };

  // Longest axis projected into the kernel, then random directions.
  run(v.row(0).transpose());
  for (std::size_t r = 0; r + 1 < restarts; ++r) {
    VectorXd c(k);
    for (Eigen::Index i = 0; i < k; ++i) c[i] = rng.next_normal();
    run(std::move(c));
  }
  return best;
}

Eigen::VectorXd decode_l1(const MatrixXd& info, const VectorXd& y, double tol,
                          std::size_t max_iters) {
  if (info.rows() != y.size()) throw DimensionMismatch("information/data mismatch");
  if (!(tol > 0.0)) throw ParameterOutOfRange("tolerance must be positive");
  const Eigen::Index m = info.cols();
  const double yscale = std::max(1.0, y.norm());
  if (y.norm() == 0.0) return VectorXd::Zero(m);

  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(info);
  auto project = [&](const VectorXd& vv) -> VectorXd {
    return vv - cod.solve(info * vv - y);
  };

  VectorXd z = cod.solve(y);
  VectorXd w = z;
  VectorXd u = VectorXd::Zero(m);
  double rho = 1.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    z = project(w - u);
    const VectorXd w_old = w;
    w = soft_threshold(z + u, 1.0 / rho);
    u += z - w;
    const double prim = (z - w).norm();
    const double dual = rho * (w - w_old).norm();
    const double base = std::max({z.norm(), w.norm(), 1e-12});
    if (prim <= 1e-12 * base && dual <= 1e-12 * base) break;
    if (it % 10 == 9) {
      if (prim > 10.0 * dual) {
        rho *= 2.0;
        u *= 0.5;
      } else if (dual > 10.0 * prim) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
  }

  // Candidate 1: the consensus iterate pushed back onto the affine space.
  VectorXd feasible = project(w);
  double best_l1 = kInf;
  VectorXd best;
  auto consider = [&](const VectorXd& cand) {
    if ((info * cand - y).norm() > tol * yscale) return;
    const double l1 = cand.lpNorm<1>();
    if (l1 < best_l1) {
      best_l1 = l1;
      best = cand;
    }
  };
  consider(feasible);

  // Candidate 2: least-squares polish on the detected support.
  const double peak = w.cwiseAbs().maxCoeff();
  if (peak > 0.0) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < m; ++i)
      if (std::fabs(w[i]) > std::max(1e-10, 1e-6 * peak)) support.push_back(i);
    if (!support.empty() && Eigen::Index(support.size()) <= info.rows()) {
      MatrixXd sub(info.rows(), Eigen::Index(support.size()));
      for (std::size_t j = 0; j < support.size(); ++j)
        sub.col(Eigen::Index(j)) = info.col(support[j]);
      const VectorXd coef = sub.colPivHouseholderQr().solve(y);
      VectorXd polished = VectorXd::Zero(m);
      for (std::size_t j = 0; j < support.size(); ++j)
        polished[support[j]] = coef[Eigen::Index(j)];
      consider(polished);
    }
  }

  if (best_l1 == kInf) throw Infeasible("no iterate reached the residual tolerance");
  return best;
}

Eigen::VectorXd decode_lr(const MatrixXd& info, const VectorXd& y, double r,
                          std::size_t iters, std::vector<double>* trace) {
  if (info.rows() != y.size()) throw DimensionMismatch("information/data mismatch");
  if (!(r > 0.0) || r > 1.0) throw ParameterOutOfRange("exponent must lie in (0, 1]");
  const Eigen::Index n = info.rows();
  const Eigen::Index m = info.cols();
  if (y.norm() == 0.0) return VectorXd::Zero(m);

  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(info);
  VectorXd z = cod.solve(y);
  double eps = std::max(z.cwiseAbs().maxCoeff(), 1e-6);
  auto objective = [&](const VectorXd& zz, double ee) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < zz.size(); ++i)
      acc += std::pow(zz[i] * zz[i] + ee * ee, 0.5 * r);
    return acc;
  };
  double prev = objective(z, eps);
  if (trace) trace->push_back(prev);

  for (std::size_t it = 0; it < iters; ++it) {
    VectorXd d(m);
    for (Eigen::Index i = 0; i < m; ++i)
      d[i] = std::pow(z[i] * z[i] + eps * eps, 1.0 - 0.5 * r);
    const MatrixXd weighted = info * d.asDiagonal();
    MatrixXd gram = weighted * info.transpose();
    gram.diagonal().array() += 1e-14 * (gram.trace() / double(n) + 1e-300);
    const VectorXd t = gram.ldlt().solve(y);
    z = d.asDiagonal() * (info.transpose() * t);

    const double cur = objective(z, eps);
    if (trace) trace->push_back(cur);
    if (prev - cur <= 1e-8 * std::max(1.0, prev)) {
      if (eps <= 1e-12) {
        prev = cur;
        break;
      }
      eps = std::max(eps * 0.5, 1e-12);
    }
    prev = objective(z, eps);
  }

  if ((info * z - y).norm() > 1e-8 * std::max(1.0, y.norm()))
    throw Infeasible("reweighted iteration left the data constraint");
  return z;
}

double rip_bruteforce(const MatrixXd& a, std::size_t s, std::uint64_t subset_cap) {
  const std::size_t m = std::size_t(a.cols());
  if (s < 1 || s > m) throw ParameterOutOfRange("subset size out of range");
  double subsets = 1.0;
  for (std::size_t i = 0; i < s; ++i)
    subsets *= double(m - i) / double(i + 1);
  if (subsets > double(subset_cap)) throw TooManySubsets("enumeration cap exceeded");

  const MatrixXd gram = a.transpose() * a;
  std::vector<std::size_t> idx(s);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const Eigen::Index width = Eigen::Index(s);
  MatrixXd sub(width, width);
  double delta = 0.0;
  for (;;) {
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j)
        sub(Eigen::Index(i), Eigen::Index(j)) =
            gram(Eigen::Index(idx[i]), Eigen::Index(idx[j]));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sub, Eigen::EigenvaluesOnly);
    delta = std::max(delta, es.eigenvalues().maxCoeff() - 1.0);
    delta = std::max(delta, 1.0 - es.eigenvalues().minCoeff());

    // Next s-combination of {0..m-1} in lexicographic order.
    std::size_t i = s;
    while (i > 0 && idx[i - 1] == m - s + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < s; ++j) idx[j] = idx[j - 1] + 1;
  }
  return delta;
}

std::string decoder_name(Decoder d) { return d == Decoder::l1 ? "l1" : "lr"; }

namespace {

// Boundary vector with the first k coordinates equal (the flat profile whose
// best s-term error is worst on the ellipsoid for k = 2s).
std::vector<double> flat_boundary(const ell::LpEllipsoid& e, std::size_t k) {
  double level;
  if (e.p == kInf) {
    level = e.semiaxes[k - 1];
  } else {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += std::pow(e.semiaxes[i], -e.p);
    level = std::pow(acc, -1.0 / e.p);
  }
  std::vector<double> x(e.dim(), 0.0);
  for (std::size_t i = 0; i < k; ++i) x[i] = level;
  return x;
}

}  // namespace

RecoveryStats recovery_error_experiment(const ell::LpEllipsoid& e, std::size_t n,
                                        std::size_t trials, Decoder decoder,
                                        RngStream stream) {
  if (n < 1) throw ParameterOutOfRange("need at least one measurement");
  if (trials < 1) throw ParameterOutOfRange("need at least one trial");
  const std::size_t m = e.dim();

  std::size_t max_pow = 0;
  while ((std::size_t{2} << max_pow) * 2 <= m) ++max_pow;

  RecoveryStats stats;
  stats.m = m;
  stats.n = n;
  stats.decoder = decoder;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t seed_t =
        derive_seed(stream.seed, "recovery/trial/" + std::to_string(t));
    Rng rng(seed_t, stream.stream_id);

    std::vector<double> x;
    if (t % 3 == 0 && m >= 2) {
      const std::size_t s = std::size_t{1} << ((t / 3) % (max_pow + 1));
      x = flat_boundary(e, 2 * s);
    } else {
      std::vector<double> u(m);
      for (auto& v : u) v = rng.next_normal();
      const double nu = ell::norm_p_sigma(u, e);
      x.resize(m);
      for (std::size_t j = 0; j < m; ++j) x[j] = u[j] / nu;
    }

    const GaussianInfo g = sample_gaussian_info(
        n, m, {derive_seed(seed_t, "matrix"), stream.stream_id});
    const MatrixXd a = g.entries / std::sqrt(double(n));
    Eigen::Map<const VectorXd> xv(x.data(), Eigen::Index(m));
    const VectorXd y = a * xv;

    VectorXd z;
    if (decoder == Decoder::l1) {
      z = decode_l1(a, y, 1e-8, 3000);
    } else {
      z = decode_lr(a, y, std::min(e.p, 1.0), 80);
    }
    stats.trials.push_back({t, (z - xv).norm(), seed_t});
  }

  std::vector<double> errs;
  errs.reserve(trials);
  for (const auto& rec : stats.trials) errs.push_back(rec.error);
  stats.max_error = *std::max_element(errs.begin(), errs.end());
  stats.mean_error = std::accumulate(errs.begin(), errs.end(), 0.0) / double(trials);
  std::nth_element(errs.begin(), errs.begin() + std::ptrdiff_t(trials / 2), errs.end());
  stats.median_error = errs[trials / 2];
  return stats;
}

}  // namespace randinfo::rec
