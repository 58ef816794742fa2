#include "randinfo/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "randinfo/errors.hpp"
#include "randinfo/kernels.hpp"

namespace randinfo::pts {

PointSet::PointSet(std::size_t dim, std::vector<double> coords_colmajor,
                   bool torus)
    : dim_(dim), torus_(torus), coords_(std::move(coords_colmajor)) {
    if (dim_ == 0) throw ParameterOutOfRange("point set dimension must be positive");
    if (coords_.empty() || coords_.size() % dim_ != 0)
        throw DimensionMismatch("coordinate buffer size not a multiple of dim");
    n_ = coords_.size() / dim_;
    for (double c : coords_)
        if (!(c >= 0.0 && c < 1.0))
            throw ParameterOutOfRange("coordinates must lie in [0,1)");
}

PointSet PointSet::from_rows(std::size_t dim,
                             const std::vector<std::vector<double>>& rows,
                             bool torus) {
    if (rows.empty()) throw ParameterOutOfRange("point set must be non-empty");
    std::vector<double> cols(dim * rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim)
            throw DimensionMismatch("row length differs from dim");
        for (std::size_t j = 0; j < dim; ++j) cols[j * rows.size() + i] = rows[i][j];
    }
    return PointSet(dim, std::move(cols), torus);
}

std::vector<double> PointSet::point(std::size_t i) const {
    std::vector<double> x(dim_);
    for (std::size_t j = 0; j < dim_; ++j) x[j] = coord(i, j);
    return x;
}

PointSet PointSet::with_point(const std::vector<double>& x) const {
    if (x.size() != dim_) throw DimensionMismatch("appended point has wrong dim");
    std::vector<double> cols((n_ + 1) * dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        std::copy(col(j), col(j) + n_, cols.begin() + j * (n_ + 1));
        cols[j * (n_ + 1) + n_] = x[j];
    }
    return PointSet(dim_, std::move(cols), torus_);
}

PointSet sample_uniform(std::size_t dim, std::size_t n, RngStream rng) {
    if (dim < 1 || n < 1) throw ParameterOutOfRange("dim and n must be positive");
    Rng r(rng);
    std::vector<double> cols(dim * n);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        draw_uniform(r, dim, x.data());
        for (std::size_t j = 0; j < dim; ++j) cols[j * n + i] = x[j];
    }
    return PointSet(dim, std::move(cols), false);
}

PointSet planted_hole_points(std::size_t dim, std::size_t n, double beta,
                             RngStream rng) {
    if (dim < 1 || n < 1 || !(beta > 0.0))
        throw ParameterOutOfRange("dim, n positive and beta > 0 required");
    const double radius = std::pow(static_cast<double>(n), -beta);
    if (radius >= 0.25)
        throw HoleTooLarge("hole radius n^-beta must be below 1/4");
    Rng r(rng);
    std::vector<double> cols(dim * n);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (;;) {
            draw_uniform(r, dim, x.data());
            double s = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double t = x[j] - 0.5;
                s += t * t;
            }
            if (std::sqrt(s) >= radius) break;
        }
        for (std::size_t j = 0; j < dim; ++j) cols[j * n + i] = x[j];
    }
    return PointSet(dim, std::move(cols), false);
}

double dist_to_set(const double* x, std::size_t dim, const PointSet& p) {
    if (dim != p.dim()) throw DimensionMismatch("query dim differs from set dim");
    return std::sqrt(kern::sqdist_min(p.data(), p.size(), dim, x, p.torus()));
}

double dist_to_set(const std::vector<double>& x, const PointSet& p) {
    return dist_to_set(x.data(), x.size(), p);
}

namespace {

// Cyclic (torus) or bounded gaps of the sorted 1D coordinates. The covering
// radius and the exact 1D distortion both integrate over these segments.
struct Gaps1D {
    std::vector<double> sorted;
    double left = 0.0;   // distance from 0 to the first point (0 on the torus)
    double right = 0.0;  // distance from the last point to 1 (0 on the torus)
    std::vector<double> interior;  // consecutive gaps, plus the wrap gap on the torus
};

Gaps1D gaps_1d(const PointSet& p) {
    Gaps1D g;
    g.sorted.assign(p.col(0), p.col(0) + p.size());
    std::sort(g.sorted.begin(), g.sorted.end());
    for (std::size_t i = 0; i + 1 < g.sorted.size(); ++i)
        g.interior.push_back(g.sorted[i + 1] - g.sorted[i]);
    if (p.torus()) {
        g.interior.push_back(g.sorted.front() + 1.0 - g.sorted.back());
    } else {
        g.left = g.sorted.front();
        g.right = 1.0 - g.sorted.back();
    }
    return g;
}

double covering_radius_1d(const PointSet& p) {
    const Gaps1D g = gaps_1d(p);
    double h = std::max(g.left, g.right);
    for (double gap : g.interior) h = std::max(h, gap / 2.0);
    return h;
}

constexpr std::size_t kGridNodeCap = std::size_t{1} << 26;

}  // namespace

CoveringRadius covering_radius(const PointSet& p, std::size_t resolution) {
    if (resolution < 2) throw ParameterOutOfRange("resolution must be at least 2");
    if (p.dim() == 1) {
        const double h = covering_radius_1d(p);
        return {h, h};
    }
    double total = 1.0;
    for (std::size_t j = 0; j < p.dim(); ++j) {
        total *= static_cast<double>(resolution);
        if (total > static_cast<double>(kGridNodeCap))
            throw GridTooLarge("grid node count exceeds cap");
    }
    // Nodes at cell centers: every cube point is within half a cell diagonal
    // of some node, which certifies the upper bound.
    const std::size_t d = p.dim();
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    const double step = 1.0 / static_cast<double>(resolution);
    double worst = 0.0;
    for (;;) {
        for (std::size_t j = 0; j < d; ++j)
            x[j] = (static_cast<double>(idx[j]) + 0.5) * step;
        worst = std::fmax(worst,
                          kern::sqdist_min(p.data(), p.size(), d, x.data(), p.torus()));
        std::size_t j = 0;
        while (j < d && ++idx[j] == resolution) idx[j++] = 0;
        if (j == d) break;
    }
    const double estimate = std::sqrt(worst);
    const double half_diag = 0.5 * step * std::sqrt(static_cast<double>(d));
    return {estimate, estimate + half_diag};
}

double separation_distance(const PointSet& p) {
    if (p.size() < 2) throw SinglePoint("separation needs at least two points");
    const std::size_t n = p.size();
    std::vector<double> buf(n);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> x(p.dim());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j < p.dim(); ++j) x[j] = p.coord(i, j);
        kern::sqdist_batch(p.data(), n, p.dim(), x.data(), p.torus(), buf.data());
        for (std::size_t k = i + 1; k < n; ++k) best = std::fmin(best, buf[k]);
    }
    return 0.5 * std::sqrt(best);
}

DistortionStats distortion_mc(const PointSet& p, const DistortionQuery& q) {
    if (!(q.gamma > 0.0) || q.sample_count < 1)
        throw ParameterOutOfRange("gamma > 0 and sample_count >= 1 required");
    Rng r(q.seed, kDistortionStream);
    std::vector<double> x(p.dim());
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < q.sample_count; ++i) {
        draw_uniform(r, p.dim(), x.data());
        const double sq =
            kern::sqdist_min(p.data(), p.size(), p.dim(), x.data(), p.torus());
        const double v = dist_power(sq, q.gamma);
        sum += v;
        sumsq += v * v;
    }
    const double nd = static_cast<double>(q.sample_count);
    DistortionStats s;
    s.sample_count = q.sample_count;
    s.power_mean = sum / nd;
    const double var = std::max(0.0, sumsq / nd - s.power_mean * s.power_mean);
    s.power_se = std::sqrt(var / nd);
    s.value = std::pow(s.power_mean, 1.0 / q.gamma);
    return s;
}

double distortion_exact_1d(const PointSet& p, double gamma) {
    if (p.dim() != 1) throw DimensionMismatch("exact path is one-dimensional");
    if (std::isinf(gamma)) return covering_radius_1d(p);
    if (!(gamma > 0.0)) throw ParameterOutOfRange("gamma must be positive");
    const Gaps1D g = gaps_1d(p);
    const double e = gamma + 1.0;
    double integral = std::pow(g.left, e) / e + std::pow(g.right, e) / e;
    for (double gap : g.interior) integral += 2.0 * std::pow(gap / 2.0, e) / e;
    return std::pow(integral, 1.0 / gamma);
}

double distortion(const PointSet& p, const DistortionQuery& q) {
    if (std::isinf(q.gamma)) {
        if (p.dim() == 1) return covering_radius_1d(p);
        const double per_axis =
            std::pow(static_cast<double>(q.sample_count), 1.0 / p.dim());
        const std::size_t res = std::max<std::size_t>(
            2, static_cast<std::size_t>(std::floor(per_axis)));
        return covering_radius(p, res).estimate;
    }
    if (p.dim() == 1) return distortion_exact_1d(p, q.gamma);
    return distortion_mc(p, q).value;
}

std::vector<double> voronoi_weights(const PointSet& p, std::size_t sample_count,
                                    RngStream rng) {
    if (sample_count < 1) throw ParameterOutOfRange("sample_count must be positive");
    Rng r(rng);
    const std::size_t n = p.size();
    std::vector<std::size_t> counts(n, 0);
    std::vector<double> buf(n);
    std::vector<double> x(p.dim());
    for (std::size_t i = 0; i < sample_count; ++i) {
        draw_uniform(r, p.dim(), x.data());
        kern::sqdist_batch(p.data(), n, p.dim(), x.data(), p.torus(), buf.data());
        ++counts[kern::argmin(buf.data(), n)];
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = static_cast<double>(counts[i]) / static_cast<double>(sample_count);
    return w;
}

}  // namespace randinfo::pts
