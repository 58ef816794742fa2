#pragma once

#include <cstddef>
#include <vector>

#include "randinfo/lattice.hpp"
#include "randinfo/pointset.hpp"
#include "randinfo/rng.hpp"

namespace randinfo::disc {

// Convex test set, implicitly intersected with the unit cube. Membership is
// closed for halfspaces, balls and boxes, and strictly interior for slabs
// (the empty-slab construction needs open slabs).
struct ConvexTestSet {
    enum class Kind { halfspace, slab, ball, axis_box };
    Kind kind = Kind::halfspace;
    std::vector<double> a;  // normal for halfspace and slab
    double b = 0.0;         // halfspace offset: <a, x> <= b
    double b_lo = 0.0, b_hi = 0.0;  // slab: b_lo < <a, x> < b_hi
    std::vector<double> center;
    double radius = 0.0;
    std::vector<double> lo, hi;  // axis box corners

    static ConvexTestSet halfspace(std::vector<double> a, double b);
    static ConvexTestSet slab(std::vector<double> a, double b_lo, double b_hi);
    static ConvexTestSet ball(std::vector<double> center, double radius);
    static ConvexTestSet axis_box(std::vector<double> lo, std::vector<double> hi);

    std::size_t dim() const;
    bool contains(const double* x, std::size_t d) const;
};

struct DiscrepancyWitness {
    ConvexTestSet set;
    double count_fraction = 0.0;
    double volume = 0.0;
    double volume_error = 0.0;  // half-width; zero for exact-volume kinds
    double value = 0.0;         // |count_fraction - volume|
};

// Exact volume of [0,1]^d cut by <a, x> <= b.
double halfspace_cube_volume(const std::vector<double>& a, double b);

// Exact membership counts; exact volumes except for balls, which are
// estimated by Monte Carlo with `sample_count` draws.
DiscrepancyWitness local_discrepancy(const pts::PointSet& p,
                                     const ConvexTestSet& k,
                                     std::size_t sample_count, RngStream rng);

// Open slab between adjacent dual-hyperplane levels whose closure contains
// the cube center; it holds no lattice point, so its local discrepancy equals
// its volume.
ConvexTestSet dual_slab_witness(const lat::LatticeBasis& basis,
                                const pts::PointSet& points);

// Best witness over a deterministic prefix (largest empty axis slab per axis,
// one empty-ball probe) followed by a seeded round-robin stream of halfspaces,
// slabs, empty balls and axis boxes. Budget counts candidate sets; the stream
// is prefix-stable, so a larger budget never returns a smaller value.
DiscrepancyWitness iso_lower_search(const pts::PointSet& p, std::size_t budget,
                                    RngStream rng);

struct VolumeEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

enum class Side { inner, outer };

// Monte Carlo volume of the inner or outer rho-shell of a ball or axis box.
VolumeEstimate neighborhood_volume(const ConvexTestSet& k, double rho, Side side,
                                   std::size_t sample_count, RngStream rng);

struct KappaSum {
    double sum = 0.0;
    double log_sum = 0.0;
    double log_gap = 0.0;  // log_sum - (3/2)(2 pi)^(1/3) d^(2/3)
};

// Sum over j of C(d,j) pi^(j/2) / Gamma(1 + j/2), evaluated in log space.
KappaSum kappa_sum(std::size_t d);

}  // namespace randinfo::disc
