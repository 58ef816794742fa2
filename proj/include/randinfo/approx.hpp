#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "randinfo/pointset.hpp"
#include "randinfo/rng.hpp"

namespace randinfo::apx {

// Compactly supported C^2 bump (1-r)_+^4 (4r+1); equals 1 at r = 0.
double wendland_weight(double r);

struct MLSConfig {
    std::size_t degree = 1;         // total degree reproduced exactly
    double scale_multiplier = 1.5;  // factor on the k-th neighbor distance
    std::size_t max_scale_doublings = 4;
};

// dim(P_degree^d) = C(degree + dim, dim): coefficients a local fit matches.
std::size_t monomial_count(std::size_t dim, std::size_t degree);

// scale_multiplier times the distance from y to its k-th nearest point of p,
// k = monomial_count. A multiplier above one keeps at least k points strictly
// inside the support ball.
double local_scale(const pts::PointSet& p, const std::vector<double>& y,
                   const MLSConfig& config);

struct ShapeFunctions {
    std::vector<double> values;  // one entry per point, zero off support
    double abs_sum = 0.0;
    double scale = 0.0;  // support radius actually used
};

// Minimum-energy coefficients with polynomial reproduction:
//   argmin sum u_i^2 / w_i  s.t.  sum u_i pi(x_i) = pi(y) for deg(pi) <= m,
// where w_i = weight(|x_i - y| / scale). Solved through the weighted moment
// matrix. Throws SingularMoments when the geometry inside the ball cannot
// determine all coefficients; a positive scale_override replaces the local
// estimate.
ShapeFunctions mls_shape_functions(const std::vector<double>& y,
                                   const pts::PointSet& p,
                                   const MLSConfig& config,
                                   double scale_override = 0.0);

// sum_i f_values[i] u_i(y) per evaluation point. A degenerate moment matrix
// gets the scale doubled up to max_scale_doublings times before the error
// escapes.
std::vector<double> mls_evaluate(
    const std::vector<double>& f_values, const pts::PointSet& p,
    const std::vector<std::vector<double>>& eval_points,
    const MLSConfig& config);

// Monte Carlo estimate of || f - reconstruction ||_{L_q} over the cube;
// q = infinity takes the sample maximum.
double lq_error(const std::function<double(const std::vector<double>&)>& f,
                const std::vector<double>& f_values, const pts::PointSet& p,
                double q, const MLSConfig& config, std::size_t sample_count,
                Rng& rng);

}  // namespace randinfo::apx
