#include "randinfo/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>

#if defined(__x86_64__) || defined(_M_X64)
#define RANDINFO_X86 1
#include <cpuid.h>
#include <immintrin.h>
#elif defined(__aarch64__)
#define RANDINFO_NEON 1
#include <arm_neon.h>
#endif

namespace randinfo::kern {
namespace {

// One element, the canonical operation order every variant must follow:
// diff, optional torus fold (abs then min with 1-diff), then fma into the
// accumulator, coordinates in increasing j.
inline double sqdist_one(const double* coords, std::size_t n, std::size_t d,
                         const double* y, bool torus, std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double t = coords[j * n + i] - y[j];
        if (torus) {
            t = std::fabs(t);
            t = std::fmin(t, 1.0 - t);
        }
        acc = std::fma(t, t, acc);
    }
    return acc;
}

#if defined(RANDINFO_X86)

__attribute__((target("avx2,fma"))) void sqdist_batch_avx2(
    const double* coords, std::size_t n, std::size_t d, const double* y,
    bool torus, double* out) {
    const __m256d ones = _mm256_set1_pd(1.0);
    const __m256d absmask =
        _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < d; ++j) {
            __m256d t = _mm256_sub_pd(_mm256_loadu_pd(coords + j * n + i),
                                      _mm256_set1_pd(y[j]));
            if (torus) {
                t = _mm256_and_pd(t, absmask);
                t = _mm256_min_pd(t, _mm256_sub_pd(ones, t));
            }
            acc = _mm256_fmadd_pd(t, t, acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) out[i] = sqdist_one(coords, n, d, y, torus, i);
}

__attribute__((target("avx2,fma"))) double sqdist_min_avx2(
    const double* coords, std::size_t n, std::size_t d, const double* y,
    bool torus) {
    const __m256d ones = _mm256_set1_pd(1.0);
    const __m256d absmask =
        _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
    __m256d best = _mm256_set1_pd(HUGE_VAL);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < d; ++j) {
            __m256d t = _mm256_sub_pd(_mm256_loadu_pd(coords + j * n + i),
                                      _mm256_set1_pd(y[j]));
            if (torus) {
                t = _mm256_and_pd(t, absmask);
                t = _mm256_min_pd(t, _mm256_sub_pd(ones, t));
            }
            acc = _mm256_fmadd_pd(t, t, acc);
        }
        best = _mm256_min_pd(best, acc);
    }
    __m128d lo = _mm256_castpd256_pd128(best);
    __m128d hi = _mm256_extractf128_pd(best, 1);
    lo = _mm_min_pd(lo, hi);
    double m = std::fmin(_mm_cvtsd_f64(lo),
                         _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) m = std::fmin(m, sqdist_one(coords, n, d, y, torus, i));
    return m;
}

bool cpu_has_avx2() {
    unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
    if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
    const bool fma = ecx & (1u << 12);
    const bool osxsave = ecx & (1u << 27);
    const bool avx = ecx & (1u << 28);
    if (!(fma && osxsave && avx)) return false;
    if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
    if (!(ebx & (1u << 5))) return false;
    std::uint32_t xlo, xhi;
    __asm__ volatile("xgetbv" : "=a"(xlo), "=d"(xhi) : "c"(0));
    return (xlo & 0x6) == 0x6;  // XMM and YMM state enabled by the OS
}

#endif  // RANDINFO_X86

#if defined(RANDINFO_NEON)

void sqdist_batch_neon(const double* coords, std::size_t n, std::size_t d,
                       const double* y, bool torus, double* out) {
    const float64x2_t ones = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t j = 0; j < d; ++j) {
            float64x2_t t =
                vsubq_f64(vld1q_f64(coords + j * n + i), vdupq_n_f64(y[j]));
            if (torus) {
                t = vabsq_f64(t);
                t = vminq_f64(t, vsubq_f64(ones, t));
            }
            acc = vfmaq_f64(acc, t, t);
        }
        vst1q_f64(out + i, acc);
    }
    for (; i < n; ++i) out[i] = sqdist_one(coords, n, d, y, torus, i);
}

double sqdist_min_neon(const double* coords, std::size_t n, std::size_t d,
                       const double* y, bool torus) {
    const float64x2_t ones = vdupq_n_f64(1.0);
    float64x2_t best = vdupq_n_f64(HUGE_VAL);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t j = 0; j < d; ++j) {
            float64x2_t t =
                vsubq_f64(vld1q_f64(coords + j * n + i), vdupq_n_f64(y[j]));
            if (torus) {
                t = vabsq_f64(t);
                t = vminq_f64(t, vsubq_f64(ones, t));
            }
            acc = vfmaq_f64(acc, t, t);
        }
        best = vminq_f64(best, acc);
    }
    double m = std::fmin(vgetq_lane_f64(best, 0), vgetq_lane_f64(best, 1));
    for (; i < n; ++i) m = std::fmin(m, sqdist_one(coords, n, d, y, torus, i));
    return m;
}

#endif  // RANDINFO_NEON

struct Dispatch {
    void (*batch)(const double*, std::size_t, std::size_t, const double*, bool,
                  double*);
    double (*min)(const double*, std::size_t, std::size_t, const double*, bool);
    const char* name;
};

const Dispatch& dispatch() {
    static const Dispatch table = [] {
        const char* force = std::getenv("RANDINFO_FORCE_SCALAR");
        const bool forced = force && force[0] && force[0] != '0';
#if defined(RANDINFO_X86)
        if (!forced && cpu_has_avx2())
            return Dispatch{sqdist_batch_avx2, sqdist_min_avx2, "avx2"};
#elif defined(RANDINFO_NEON)
        if (!forced)
            return Dispatch{sqdist_batch_neon, sqdist_min_neon, "neon"};
#else
        (void)forced;
#endif
        return Dispatch{sqdist_batch_scalar, sqdist_min_scalar, "scalar"};
    }();
    return table;
}

}  // namespace

void sqdist_batch_scalar(const double* coords, std::size_t n, std::size_t d,
                         const double* y, bool torus, double* out) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = sqdist_one(coords, n, d, y, torus, i);
}

double sqdist_min_scalar(const double* coords, std::size_t n, std::size_t d,
                         const double* y, bool torus) {
    double m = HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i)
        m = std::fmin(m, sqdist_one(coords, n, d, y, torus, i));
    return m;
}

void sqdist_batch(const double* coords, std::size_t n, std::size_t d,
                  const double* y, bool torus, double* out) {
    dispatch().batch(coords, n, d, y, torus, out);
}

double sqdist_min(const double* coords, std::size_t n, std::size_t d,
                  const double* y, bool torus) {
    return dispatch().min(coords, n, d, y, torus);
}

std::size_t argmin(const double* v, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

const char* active_backend() { return dispatch().name; }

}  // namespace randinfo::kern
