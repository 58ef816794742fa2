#include "randinfo/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "randinfo/errors.hpp"

namespace randinfo::disc {
namespace {

double dot(const std::vector<double>& a, const double* x) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * x[j];
    return s;
}

void check_dim(const ConvexTestSet& k, std::size_t d) {
    if (k.dim() != d)
        throw DimensionMismatch("test set and point dimension differ");
}

}  // namespace

ConvexTestSet ConvexTestSet::halfspace(std::vector<double> a, double b) {
    ConvexTestSet k;
    k.kind = Kind::halfspace;
    k.a = std::move(a);
    k.b = b;
    return k;
}

ConvexTestSet ConvexTestSet::slab(std::vector<double> a, double b_lo, double b_hi) {
    if (!(b_lo < b_hi)) throw ParameterOutOfRange("slab needs b_lo < b_hi");
    ConvexTestSet k;
    k.kind = Kind::slab;
    k.a = std::move(a);
    k.b_lo = b_lo;
    k.b_hi = b_hi;
    return k;
}

ConvexTestSet ConvexTestSet::ball(std::vector<double> center, double radius) {
    if (!(radius > 0.0)) throw ParameterOutOfRange("ball radius must be positive");
    ConvexTestSet k;
    k.kind = Kind::ball;
    k.center = std::move(center);
    k.radius = radius;
    return k;
}

ConvexTestSet ConvexTestSet::axis_box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size())
        throw DimensionMismatch("box corners have different dimension");
    for (std::size_t j = 0; j < lo.size(); ++j)
        if (!(lo[j] < hi[j])) throw ParameterOutOfRange("box needs lo < hi");
    ConvexTestSet k;
    k.kind = Kind::axis_box;
    k.lo = std::move(lo);
    k.hi = std::move(hi);
    return k;
}

std::size_t ConvexTestSet::dim() const {
    switch (kind) {
        case Kind::halfspace:
        case Kind::slab:
            return a.size();
        case Kind::ball:
            return center.size();
        case Kind::axis_box:
            return lo.size();
    }
    return 0;
}

bool ConvexTestSet::contains(const double* x, std::size_t d) const {
    switch (kind) {
        case Kind::halfspace:
            return dot(a, x) <= b;
        case Kind::slab: {
            // Strict interior with a roundoff guard, so points sitting exactly
            // on a boundary level never leak in through floating error.
            const double t = dot(a, x);
            const double eps =
                1e-9 * std::max({1.0, std::fabs(b_lo), std::fabs(b_hi)});
            return t > b_lo + eps && t < b_hi - eps;
        }
        case Kind::ball: {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double t = x[j] - center[j];
                s += t * t;
            }
            return s <= radius * radius;
        }
        case Kind::axis_box:
            for (std::size_t j = 0; j < d; ++j)
                if (x[j] < lo[j] || x[j] > hi[j]) return false;
            return true;
    }
    return false;
}

double halfspace_cube_volume(const std::vector<double>& a, double b) {
    std::vector<double> pos;
    double offset = b;
    for (double ai : a) {
        if (ai == 0.0) continue;  // the cut is constant along this axis
        if (ai < 0.0) {
            offset -= ai;  // reflect x_i -> 1 - x_i
            pos.push_back(-ai);
        } else {
            pos.push_back(ai);
        }
    }
    const std::size_t d = pos.size();
    if (d == 0) throw ZeroNormal("halfspace normal must be nonzero");
    if (d > 30) throw TooManySubsets("inclusion-exclusion over 2^d subsets capped");

    double total = 0.0;
    for (double ai : pos) total += ai;
    if (offset <= 0.0) return 0.0;
    if (offset >= total) return 1.0;

    // (1/(d! prod a_i)) sum over subsets S of (-1)^|S| max(b - sum_S a_i, 0)^d
    double sum = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
        double t = offset;
        int bits = 0;
        for (std::size_t i = 0; i < d; ++i)
            if ((mask >> i) & 1u) {
                t -= pos[i];
                ++bits;
            }
        if (t <= 0.0) continue;
        const double term = std::pow(t, static_cast<double>(d));
        sum += (bits % 2 == 0) ? term : -term;
    }
    double denom = 1.0;
    for (std::size_t i = 1; i <= d; ++i) denom *= static_cast<double>(i);
    for (double ai : pos) denom *= ai;
    return std::clamp(sum / denom, 0.0, 1.0);
}

namespace {

double exact_volume(const ConvexTestSet& k) {
    switch (k.kind) {
        case ConvexTestSet::Kind::halfspace:
            return halfspace_cube_volume(k.a, k.b);
        case ConvexTestSet::Kind::slab:
            return std::max(0.0, halfspace_cube_volume(k.a, k.b_hi) -
                                     halfspace_cube_volume(k.a, k.b_lo));
        case ConvexTestSet::Kind::axis_box: {
            double v = 1.0;
            for (std::size_t j = 0; j < k.lo.size(); ++j)
                v *= std::max(0.0, std::min(k.hi[j], 1.0) - std::max(k.lo[j], 0.0));
            return v;
        }
        default:
            throw UnsupportedKind("no exact volume for this kind");
    }
}

VolumeEstimate mc_volume(const ConvexTestSet& k, std::size_t d,
                         std::size_t sample_count, Rng& r) {
    std::vector<double> x(d);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < sample_count; ++i) {
        pts::draw_uniform(r, d, x.data());
        if (k.contains(x.data(), d)) ++inside;
    }
    const double n = static_cast<double>(sample_count);
    const double p = static_cast<double>(inside) / n;
    return {p, std::sqrt(std::max(0.0, p * (1.0 - p)) / n)};
}

}  // namespace

DiscrepancyWitness local_discrepancy(const pts::PointSet& p,
                                     const ConvexTestSet& k,
                                     std::size_t sample_count, RngStream rng) {
    check_dim(k, p.dim());
    DiscrepancyWitness w;
    w.set = k;
    std::size_t inside = 0;
    std::vector<double> x(p.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.dim(); ++j) x[j] = p.coord(i, j);
        if (k.contains(x.data(), p.dim())) ++inside;
    }
    w.count_fraction = static_cast<double>(inside) / static_cast<double>(p.size());
    if (k.kind == ConvexTestSet::Kind::ball) {
        Rng r(rng);
        const VolumeEstimate v = mc_volume(k, p.dim(), sample_count, r);
        w.volume = v.value;
        w.volume_error = v.standard_error;
    } else {
        w.volume = exact_volume(k);
        w.volume_error = 0.0;
    }
    w.value = std::fabs(w.count_fraction - w.volume);
    return w;
}

ConvexTestSet dual_slab_witness(const lat::LatticeBasis& basis,
                                const pts::PointSet& points) {
    const lat::ShortestVector h = lat::shortest_vector(lat::dual_basis(basis));
    const std::size_t d = points.dim();
    if (d != static_cast<std::size_t>(h.vector.size()))
        throw DimensionMismatch("point set and basis dimension differ");
    double t_center = 0.0;
    for (std::size_t j = 0; j < d; ++j) t_center += 0.5 * h.vector(j);
    const double k0 = std::floor(t_center);
    std::vector<double> normal(d);
    for (std::size_t j = 0; j < d; ++j) normal[j] = h.vector(j);
    const auto slab = ConvexTestSet::slab(std::move(normal), k0, k0 + 1.0);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) x[j] = points.coord(i, j);
        const double t = dot(slab.a, x.data());
        if (t > k0 + 1e-9 && t < k0 + 1.0 - 1e-9)
            throw NumericalFailure("lattice point found inside the dual slab");
    }
    return slab;
}

namespace {

// Largest empty open slab orthogonal to one axis, including the two edge
// regions before the first and after the last coordinate.
ConvexTestSet largest_axis_gap(const pts::PointSet& p, std::size_t axis) {
    std::vector<double> c(p.col(axis), p.col(axis) + p.size());
    std::sort(c.begin(), c.end());
    std::vector<double> a(p.dim(), 0.0);
    a[axis] = 1.0;
    double best_lo = -1.0, best_hi = c.front();
    double best = c.front();
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        if (c[i + 1] - c[i] > best) {
            best = c[i + 1] - c[i];
            best_lo = c[i];
            best_hi = c[i + 1];
        }
    if (1.0 - c.back() > best) {
        best_lo = c.back();
        best_hi = 2.0;
    }
    if (!(best_lo < best_hi)) {  // all mass at one spot; degenerate fallback
        best_lo = -1.0;
        best_hi = c.front() > 0.0 ? c.front() : 2.0;
    }
    return ConvexTestSet::slab(std::move(a), best_lo, best_hi);
}

constexpr std::size_t kBallVolumeSamples = 1 << 12;

}  // namespace

DiscrepancyWitness iso_lower_search(const pts::PointSet& p, std::size_t budget,
                                    RngStream rng) {
    if (budget < 1) throw ParameterOutOfRange("budget must be at least 1");
    const std::size_t d = p.dim();
    DiscrepancyWitness best;
    best.value = -1.0;

    auto consider = [&](const ConvexTestSet& k, std::uint64_t cand) {
        const RngStream vol_stream{
            derive_seed(rng.seed, "iso/vol/" + std::to_string(cand)), rng.stream_id};
        const DiscrepancyWitness w =
            local_discrepancy(p, k, kBallVolumeSamples, vol_stream);
        if (w.value > best.value) best = w;
    };

    std::uint64_t t = 0;
    for (std::size_t axis = 0; axis < d && t < budget; ++axis, ++t)
        consider(largest_axis_gap(p, axis), t);

    if (d <= 4 && t < budget) {
        // deterministic empty-ball probe at the worst grid node
        const std::size_t res = d <= 3 ? 9 : 5;
        std::vector<std::size_t> idx(d, 0);
        std::vector<double> x(d), bestx(d);
        double bestdist = -1.0;
        for (;;) {
            for (std::size_t j = 0; j < d; ++j)
                x[j] = (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(res);
            const double dist = pts::dist_to_set(x.data(), d, p);
            if (dist > bestdist) {
                bestdist = dist;
                bestx = x;
            }
            std::size_t j = 0;
            while (j < d) {
                if (++idx[j] < res) break;
                idx[j] = 0;
                ++j;
            }
            if (j == d) break;
        }
        if (bestdist > 0.0) {
            consider(ConvexTestSet::ball(bestx, bestdist), t);
            ++t;
        }
    }

    for (; t < budget; ++t) {
        Rng r(derive_seed(rng.seed, "iso/cand/" + std::to_string(t)), rng.stream_id);
        std::vector<double> a(d);
        switch (t % 4) {
            case 0: {  // halfspace with offset spanning the cube's support
                double norm = 0.0;
                for (auto& v : a) {
                    v = r.next_normal();
                    norm += v * v;
                }
                norm = std::sqrt(norm);
                if (norm == 0.0) continue;
                double lo = 0.0, hi = 0.0;
                for (auto& v : a) {
                    v /= norm;
                    if (v < 0.0) lo += v;
                    else hi += v;
                }
                consider(ConvexTestSet::halfspace(std::move(a), lo + (hi - lo) * r.next_double()), t);
                break;
            }
            case 1: {  // random slab
                double norm = 0.0;
                for (auto& v : a) {
                    v = r.next_normal();
                    norm += v * v;
                }
                norm = std::sqrt(norm);
                if (norm == 0.0) continue;
                double lo = 0.0, hi = 0.0;
                for (auto& v : a) {
                    v /= norm;
                    if (v < 0.0) lo += v;
                    else hi += v;
                }
                double u = lo + (hi - lo) * r.next_double();
                double v2 = lo + (hi - lo) * r.next_double();
                if (u > v2) std::swap(u, v2);
                if (u == v2) v2 = u + 1e-6;
                consider(ConvexTestSet::slab(std::move(a), u, v2), t);
                break;
            }
            case 2: {  // empty ball around a random center
                std::vector<double> c(d);
                pts::draw_uniform(r, d, c.data());
                const double dist = pts::dist_to_set(c.data(), d, p);
                if (dist > 0.0) consider(ConvexTestSet::ball(std::move(c), dist), t);
                break;
            }
            default: {  // random axis box
                std::vector<double> lo(d), hi(d);
                for (std::size_t j = 0; j < d; ++j) {
                    double u = r.next_double(), v = r.next_double();
                    if (u > v) std::swap(u, v);
                    lo[j] = u;
                    hi[j] = v == u ? u + 1e-6 : v;
                }
                consider(ConvexTestSet::axis_box(std::move(lo), std::move(hi)), t);
                break;
            }
        }
    }
    if (best.value < 0.0) {
        // nothing generated a usable set; fall back to the full cube
        best = local_discrepancy(
            p, ConvexTestSet::halfspace(std::vector<double>(d, 1.0), d + 1.0),
            kBallVolumeSamples, rng);
    }
    return best;
}

VolumeEstimate neighborhood_volume(const ConvexTestSet& k, double rho, Side side,
                                   std::size_t sample_count, RngStream rng) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterOutOfRange("rho must be in [0,1]");
    if (k.kind != ConvexTestSet::Kind::ball &&
        k.kind != ConvexTestSet::Kind::axis_box)
        throw UnsupportedKind("shell volume needs a ball or axis box");
    const std::size_t d = k.dim();
    Rng r(rng);
    std::vector<double> x(d);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < sample_count; ++i) {
        pts::draw_uniform(r, d, x.data());
        double dist_out;  // distance from x to K
        double dist_in;   // distance from x to the complement of K
        if (k.kind == ConvexTestSet::Kind::ball) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double t = x[j] - k.center[j];
                s += t * t;
            }
            const double dc = std::sqrt(s);
            dist_out = std::max(0.0, dc - k.radius);
            dist_in = std::max(0.0, k.radius - dc);
        } else {
            double out_sq = 0.0;
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < d; ++j) {
                const double below = k.lo[j] - x[j];
                const double above = x[j] - k.hi[j];
                const double excess = std::max({below, above, 0.0});
                out_sq += excess * excess;
                margin = std::min(margin, std::min(x[j] - k.lo[j], k.hi[j] - x[j]));
            }
            dist_out = std::sqrt(out_sq);
            dist_in = std::max(0.0, margin);
        }
        const bool inside = k.contains(x.data(), d);
        if (side == Side::outer) {
            if (!inside && dist_out <= rho) ++hits;
        } else {
            if (inside && dist_in <= rho) ++hits;
        }
    }
    const double n = static_cast<double>(sample_count);
    const double p = static_cast<double>(hits) / n;
    return {p, std::sqrt(std::max(0.0, p * (1.0 - p)) / n)};
}

KappaSum kappa_sum(std::size_t d) {
    if (d < 1) throw ParameterOutOfRange("d must be at least 1");
    const double dd = static_cast<double>(d);
    std::vector<double> logs(d);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= d; ++j) {
        const double jj = static_cast<double>(j);
        const double log_binom =
            std::lgamma(dd + 1.0) - std::lgamma(jj + 1.0) - std::lgamma(dd - jj + 1.0);
        logs[j - 1] = log_binom + 0.5 * jj * std::log(M_PI) -
                      std::lgamma(1.0 + 0.5 * jj);
        peak = std::max(peak, logs[j - 1]);
    }
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - peak);
    KappaSum k;
    k.log_sum = peak + std::log(acc);
    k.sum = std::exp(k.log_sum);
    k.log_gap = k.log_sum - 1.5 * std::cbrt(2.0 * M_PI) * std::pow(dd, 2.0 / 3.0);
    return k;
}

}  // namespace randinfo::disc
