#include "randinfo/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "randinfo/errors.hpp"

namespace randinfo::apx {

namespace {

double sq_dist(const pts::PointSet& p, std::size_t i,
               const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.dim(); ++j) {
        double d = p.coord(i, j) - y[j];
        if (p.torus()) d -= std::round(d);
        s += d * d;
    }
    return s;
}

// Exponent vectors with |alpha| <= degree, graded, constant term first.
void push_level(std::size_t dim, std::size_t level, std::size_t pos,
                std::vector<unsigned>& cur,
                std::vector<std::vector<unsigned>>& out) {
    if (pos + 1 == dim) {
        cur[pos] = unsigned(level);
        out.push_back(cur);
        return;
    }
    for (std::size_t a = level + 1; a-- > 0;) {
        cur[pos] = unsigned(a);
        push_level(dim, level - a, pos + 1, cur, out);
    }
}

std::vector<std::vector<unsigned>> multi_indices(std::size_t dim,
                                                 std::size_t degree) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> cur(dim, 0);
    for (std::size_t level = 0; level <= degree; ++level)
        push_level(dim, level, 0, cur, out);
    return out;
}

double monomial(const std::vector<unsigned>& alpha, const double* z) {
    double v = 1.0;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        for (unsigned e = 0; e < alpha[j]; ++e) v *= z[j];
    return v;
}

ShapeFunctions shape_with_retries(const std::vector<double>& y,
                                  const pts::PointSet& p,
                                  const MLSConfig& config) {
    double scale = local_scale(p, y, config);
    for (std::size_t attempt = 0;; ++attempt) {
        try {
            return mls_shape_functions(y, p, config, scale);
        } catch (const SingularMoments&) {
            if (attempt >= config.max_scale_doublings) throw;
            scale *= 2.0;
        }
    }
}

double reconstruct(const std::vector<double>& f_values,
                   const ShapeFunctions& sf) {
    double s = 0.0;
    for (std::size_t i = 0; i < f_values.size(); ++i)
        if (sf.values[i] != 0.0) s += f_values[i] * sf.values[i];
    return s;
}

}  // namespace

double wendland_weight(double r) {
    if (r >= 1.0) return 0.0;
    const double t = 1.0 - r;
    const double t2 = t * t;
    return t2 * t2 * (4.0 * r + 1.0);
}

std::size_t monomial_count(std::size_t dim, std::size_t degree) {
    std::size_t c = 1;
    for (std::size_t i = 1; i <= dim; ++i) c = c * (degree + i) / i;
    return c;
}

double local_scale(const pts::PointSet& p, const std::vector<double>& y,
                   const MLSConfig& config) {
    if (y.size() != p.dim())
        throw DimensionMismatch("evaluation point has wrong dimension");
    if (!(config.scale_multiplier > 0.0))
        throw ParameterOutOfRange("scale_multiplier must be positive");
    const std::size_t k = monomial_count(p.dim(), config.degree);
    if (p.size() < k)
        throw NotEnoughPoints("need at least " + std::to_string(k) +
                              " points for degree " +
                              std::to_string(config.degree));

    std::vector<double> d2(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) d2[i] = sq_dist(p, i, y);
    std::nth_element(d2.begin(), d2.begin() + std::ptrdiff_t(k - 1), d2.end());
    double kth = d2[k - 1];
    if (kth == 0.0) {
        // y sits on duplicated points; fall back to the nearest distinct one
        double best = std::numeric_limits<double>::infinity();
        for (double v : d2)
            if (v > 0.0) best = std::min(best, v);
        if (!std::isfinite(best))
            throw NotEnoughPoints("all points coincide with the evaluation point");
        kth = best;
    }
    return config.scale_multiplier * std::sqrt(kth);
}

ShapeFunctions mls_shape_functions(const std::vector<double>& y,
                                   const pts::PointSet& p,
                                   const MLSConfig& config,
                                   double scale_override) {
    const std::size_t d = p.dim();
    if (y.size() != d)
        throw DimensionMismatch("evaluation point has wrong dimension");
    const double delta =
        scale_override > 0.0 ? scale_override : local_scale(p, y, config);
    const auto alphas = multi_indices(d, config.degree);
    const std::size_t k = alphas.size();

    std::vector<std::size_t> idx;
    std::vector<double> w;
    std::vector<double> z;  // scaled displacements, one block of d per point
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double dist = std::sqrt(sq_dist(p, i, y));
        const double wi = wendland_weight(dist / delta);
        if (wi <= 0.0) continue;
        idx.push_back(i);
        w.push_back(wi);
        for (std::size_t j = 0; j < d; ++j) {
            double diff = p.coord(i, j) - y[j];
            if (p.torus()) diff -= std::round(diff);
            z.push_back(diff / delta);
        }
    }
    if (idx.size() < k)
        throw SingularMoments("support ball holds fewer points than constraints");

    Eigen::MatrixXd pm(Eigen::Index(k), Eigen::Index(idx.size()));
    for (std::size_t s = 0; s < idx.size(); ++s)
        for (std::size_t a = 0; a < k; ++a)
            pm(Eigen::Index(a), Eigen::Index(s)) =
                monomial(alphas[a], z.data() + s * d);

    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), Eigen::Index(w.size()));
    const Eigen::MatrixXd gram = pm * wv.asDiagonal() * pm.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Eigen::Index(k));
    rhs[0] = 1.0;  // every monomial except the constant vanishes at y

    const auto ldlt = gram.ldlt();
    Eigen::VectorXd lam = ldlt.solve(rhs);
    lam += ldlt.solve(rhs - gram * lam);

    // Certify the solution on the constraints themselves rather than on the
    // dual system: for a degenerate ball the pseudo-inverse path can produce
    // a finite lambda whose dual residual is pure cancellation noise.
    const Eigen::VectorXd uvec = wv.asDiagonal() * (pm.transpose() * lam);
    const double resid = (pm * uvec - rhs).cwiseAbs().maxCoeff();
    if (!(resid <= 1e-10))
        throw SingularMoments("weighted moment matrix is numerically singular");

    ShapeFunctions out;
    out.values.assign(p.size(), 0.0);
    out.scale = delta;
    for (std::size_t s = 0; s < idx.size(); ++s) {
        const double u = uvec[Eigen::Index(s)];
        out.values[idx[s]] = u;
        out.abs_sum += std::fabs(u);
    }
    return out;
}

std::vector<double> mls_evaluate(
    const std::vector<double>& f_values, const pts::PointSet& p,
    const std::vector<std::vector<double>>& eval_points,
    const MLSConfig& config) {
    if (f_values.size() != p.size())
        throw PointCountMismatch("one value per point required");
    std::vector<double> out;
    out.reserve(eval_points.size());
    for (const auto& y : eval_points)
        out.push_back(reconstruct(f_values, shape_with_retries(y, p, config)));
    return out;
}

double lq_error(const std::function<double(const std::vector<double>&)>& f,
                const std::vector<double>& f_values, const pts::PointSet& p,
                double q, const MLSConfig& config, std::size_t sample_count,
                Rng& rng) {
    if (!(q > 0.0)) throw ParameterOutOfRange("q must lie in (0, inf]");
    if (sample_count == 0)
        throw ParameterOutOfRange("sample_count must be positive");
    if (f_values.size() != p.size())
        throw PointCountMismatch("one value per point required");

    const bool sup = std::isinf(q);
    std::vector<double> y(p.dim());
    double acc = 0.0;
    double worst = 0.0;
    for (std::size_t t = 0; t < sample_count; ++t) {
        pts::draw_uniform(rng, p.dim(), y.data());
        const double approx = reconstruct(f_values, shape_with_retries(y, p, config));
        const double err = std::fabs(f(y) - approx);
        if (sup)
            worst = std::max(worst, err);
        else
            acc += std::pow(err, q);
    }
    return sup ? worst : std::pow(acc / double(sample_count), 1.0 / q);
}

}  // namespace randinfo::apx
