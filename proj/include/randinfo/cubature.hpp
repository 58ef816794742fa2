#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "randinfo/pointset.hpp"
#include "randinfo/rng.hpp"

namespace randinfo::cub {

using Integrand = std::function<double(const std::vector<double>&)>;

struct CubatureRule {
    pts::PointSet points;
    std::vector<double> weights;  // aligned with points, finite

    CubatureRule(pts::PointSet points, std::vector<double> weights);
};

// Weight 1/n on every point.
CubatureRule equal_weight_rule(const pts::PointSet& p);

// Weights proportional to the sampled nearest-cell volumes.
CubatureRule voronoi_rule(const pts::PointSet& p, std::size_t sample_count,
                          RngStream rng);

// Divide by the weight sum; the heaviest index stays the heaviest.
CubatureRule normalize_weights(const CubatureRule& rule);

double apply_rule(const CubatureRule& rule, const Integrand& f);

// Worst-case integration error over the s-Hoelder ball, computed as the
// exponent-s distortion of the point set.
double holder_wce(const pts::PointSet& p, double s, std::size_t sample_count,
                  std::uint64_t seed);

// |MC integral of dist(.,points)^s minus the rule applied to it|. The rule
// term vanishes identically on the rule's own points, and the MC term reuses
// the distortion sample stream, so estimates with equal seeds share samples
// bit for bit.
double fooling_gap(const CubatureRule& rule, double s,
                   std::size_t sample_count, std::uint64_t seed);

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t sample_count = 0;
};

// Plain Monte Carlo mean over the cube with a sample-variance error bar.
McEstimate mc_integrate(const Integrand& f, std::size_t dim, std::size_t n,
                        RngStream rng);

}  // namespace randinfo::cub
