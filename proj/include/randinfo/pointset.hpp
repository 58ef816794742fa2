#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "randinfo/rng.hpp"

namespace randinfo::pts {

// Finite point set in [0,1)^dim. Distances are Euclidean, computed modulo 1
// per coordinate when torus is set. Storage is coordinate-major so the batch
// distance kernels can stream one coordinate at a time.
class PointSet {
  public:
    PointSet(std::size_t dim, std::vector<double> coords_colmajor, bool torus);

    static PointSet from_rows(std::size_t dim,
                              const std::vector<std::vector<double>>& rows,
                              bool torus = false);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return n_; }
    bool torus() const { return torus_; }

    double coord(std::size_t i, std::size_t j) const {
        return coords_[j * n_ + i];
    }
    const double* col(std::size_t j) const { return coords_.data() + j * n_; }
    const double* data() const { return coords_.data(); }
    std::vector<double> point(std::size_t i) const;

    // Copy with one extra point appended.
    PointSet with_point(const std::vector<double>& x) const;

  private:
    std::size_t dim_;
    std::size_t n_;
    bool torus_;
    std::vector<double> coords_;
};

struct DistortionQuery {
    double gamma = 2.0;  // exponent in (0, inf]; inf selects the covering radius
    std::size_t sample_count = 1 << 14;
    std::uint64_t seed = 0;
};

struct DistortionStats {
    double value = 0.0;       // (mean of dist^gamma)^(1/gamma)
    double power_mean = 0.0;  // mean of dist^gamma over the samples
    double power_se = 0.0;    // standard error of power_mean
    std::size_t sample_count = 0;
};

struct CoveringRadius {
    double estimate = 0.0;     // grid maximum, never exceeds the true radius
    double upper_bound = 0.0;  // estimate plus the grid-cell half-diagonal
};

PointSet sample_uniform(std::size_t dim, std::size_t n, RngStream rng);

// Uniform on the cube minus the ball of radius n^(-beta) around the center.
PointSet planted_hole_points(std::size_t dim, std::size_t n, double beta,
                             RngStream rng);

double dist_to_set(const double* x, std::size_t dim, const PointSet& p);
double dist_to_set(const std::vector<double>& x, const PointSet& p);

// Grid scan with `resolution` nodes per axis; exact in dimension one.
CoveringRadius covering_radius(const PointSet& p, std::size_t resolution);

double separation_distance(const PointSet& p);

// Monte Carlo estimate of (integral of dist^gamma)^(1/gamma); always MC,
// any dimension.
DistortionStats distortion_mc(const PointSet& p, const DistortionQuery& q);

// Closed form for dim 1 via sorted gaps.
double distortion_exact_1d(const PointSet& p, double gamma);

// Dispatches: gamma = inf to the covering radius, dim 1 to the closed form,
// otherwise Monte Carlo.
double distortion(const PointSet& p, const DistortionQuery& q);

std::vector<double> voronoi_weights(const PointSet& p, std::size_t sample_count,
                                    RngStream rng);

// Stream id used for distortion sampling; shared with the cubature module so
// its integrand estimates reuse the identical sample sequence.
inline constexpr std::uint64_t kDistortionStream = 0xD157;

// Draws one uniform point into x[0..dim); the common sample source for all
// Monte Carlo integrals over the cube.
inline void draw_uniform(Rng& r, std::size_t dim, double* x) {
    for (std::size_t j = 0; j < dim; ++j) x[j] = r.next_double();
}

// dist^gamma from a squared distance, with gamma = 2 kept exact. Both the
// distortion estimator and the cubature fooling-gap estimator route through
// this so shared samples produce bit-equal terms.
inline double dist_power(double sq, double gamma) {
    return gamma == 2.0 ? sq : std::pow(sq, 0.5 * gamma);
}

}  // namespace randinfo::pts
