#include "randinfo/cubature.hpp"

#include <cmath>
#include <utility>

#include "randinfo/errors.hpp"

namespace randinfo::cub {

CubatureRule::CubatureRule(pts::PointSet pts_in, std::vector<double> w_in)
    : points(std::move(pts_in)), weights(std::move(w_in)) {
    if (weights.size() != points.size())
        throw PointCountMismatch("one weight per point required");
    for (double w : weights)
        if (!std::isfinite(w))
            throw ParameterOutOfRange("weights must be finite");
}

CubatureRule equal_weight_rule(const pts::PointSet& p) {
    if (p.size() == 0) throw ParameterOutOfRange("empty point set");
    return {p, std::vector<double>(p.size(), 1.0 / double(p.size()))};
}

CubatureRule voronoi_rule(const pts::PointSet& p, std::size_t sample_count,
                          RngStream rng) {
    return {p, pts::voronoi_weights(p, sample_count, rng)};
}

CubatureRule normalize_weights(const CubatureRule& rule) {
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    if (sum == 0.0) throw ZeroSum("weight sum is zero");
    std::vector<double> out(rule.weights.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = rule.weights[i] / sum;
        if (!std::isfinite(out[i]))
            throw ZeroSum("weight sum too small to normalize");
    }
    return {rule.points, std::move(out)};
}

double apply_rule(const CubatureRule& rule, const Integrand& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.points.size(); ++i)
        acc += rule.weights[i] * f(rule.points.point(i));
    return acc;
}

double holder_wce(const pts::PointSet& p, double s, std::size_t sample_count,
                  std::uint64_t seed) {
    if (!(s > 0.0) || s > 1.0)
        throw ParameterOutOfRange("Hoelder exponent must lie in (0,1]");
    pts::DistortionQuery q;
    q.gamma = s;
    q.sample_count = sample_count;
    q.seed = seed;
    return pts::distortion(p, q);
}

double fooling_gap(const CubatureRule& rule, double s,
                   std::size_t sample_count, std::uint64_t seed) {
    if (!(s > 0.0) || s > 1.0)
        throw ParameterOutOfRange("Hoelder exponent must lie in (0,1]");
    pts::DistortionQuery q;
    q.gamma = s;
    q.sample_count = sample_count;
    q.seed = seed;
    const double integral = pts::distortion_mc(rule.points, q).power_mean;

    double term = 0.0;
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
        const double dr = pts::dist_to_set(rule.points.point(i), rule.points);
        term += rule.weights[i] * pts::dist_power(dr * dr, s);
    }
    return std::fabs(integral - term);
}

McEstimate mc_integrate(const Integrand& f, std::size_t dim, std::size_t n,
                        RngStream rng) {
    if (dim < 1 || n < 2)
        throw ParameterOutOfRange("dim >= 1 and n >= 2 required");
    Rng r(rng);
    std::vector<double> x(dim);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pts::draw_uniform(r, dim, x.data());
        const double v = f(x);
        sum += v;
        sumsq += v * v;
    }
    McEstimate out;
    out.sample_count = n;
    out.estimate = sum / double(n);
    const double var =
        std::max(0.0, (sumsq - double(n) * out.estimate * out.estimate) /
                          double(n - 1));
    out.standard_error = std::sqrt(var / double(n));
    return out;
}

}  // namespace randinfo::cub
