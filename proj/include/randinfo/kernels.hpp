#pragma once

#include <cstddef>

// Batch distance kernels over coordinate-major point storage:
// coords[j*n + i] holds coordinate j of point i. The scalar variants are the
// reference; SIMD variants are selected at runtime and must produce bit-equal
// results (same per-element operation order, fused multiply-add throughout,
// min is exact). Set RANDINFO_FORCE_SCALAR=1 to pin the scalar path.

namespace randinfo::kern {

// Squared distance from y to every point, written to out[0..n).
void sqdist_batch(const double* coords, std::size_t n, std::size_t d,
                  const double* y, bool torus, double* out);

// Minimum squared distance from y to the set.
double sqdist_min(const double* coords, std::size_t n, std::size_t d,
                  const double* y, bool torus);

// Index of the smallest element, lowest index on ties.
std::size_t argmin(const double* v, std::size_t n);

// Reference implementations, always available.
void sqdist_batch_scalar(const double* coords, std::size_t n, std::size_t d,
                         const double* y, bool torus, double* out);
double sqdist_min_scalar(const double* coords, std::size_t n, std::size_t d,
                         const double* y, bool torus);

// "avx2", "neon", or "scalar".
const char* active_backend();

}  // namespace randinfo::kern
