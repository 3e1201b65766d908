// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// cpuid check, so nothing here may be called on a CPU without AVX2/FMA.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace qpinn::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }
inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }

// [re, im, re, im] -> [im, re, im, re]
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }
// [a0, a1] -> [a1, a0]
inline __m256d swap_halves(__m256d v) { return _mm256_permute2f128_pd(v, v, 0x01); }

void rotate_real(cplx* amps, std::size_t dim, unsigned target, double c, double s) {
    double* d = raw(amps);
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    if (target == 0) {
        const __m256d sgn_s = _mm256_setr_pd(-s, -s, s, s);
        for (std::size_t i = 0; i < dim; i += 2) {
            const __m256d v = _mm256_loadu_pd(d + 2 * i);
            _mm256_storeu_pd(d + 2 * i, _mm256_fmadd_pd(sgn_s, swap_halves(v), _mm256_mul_pd(vc, v)));
        }
        return;
    }
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; i += 2) {
            double* p0 = d + 2 * i;
            double* p1 = d + 2 * (i + stride);
            const __m256d v0 = _mm256_loadu_pd(p0);
            const __m256d v1 = _mm256_loadu_pd(p1);
            _mm256_storeu_pd(p0, _mm256_fnmadd_pd(vs, v1, _mm256_mul_pd(vc, v0)));
            _mm256_storeu_pd(p1, _mm256_fmadd_pd(vs, v0, _mm256_mul_pd(vc, v1)));
        }
    }
}

void phase_pair(cplx* amps, std::size_t dim, unsigned target, double c, double s) {
    double* d = raw(amps);
    const __m256d vc = _mm256_set1_pd(c);
    if (target == 0) {
        const __m256d k = _mm256_setr_pd(s, -s, -s, s);
        for (std::size_t i = 0; i < dim; i += 2) {
            const __m256d v = _mm256_loadu_pd(d + 2 * i);
            _mm256_storeu_pd(d + 2 * i, _mm256_fmadd_pd(k, swap_re_im(v), _mm256_mul_pd(vc, v)));
        }
        return;
    }
    const __m256d k_lo = _mm256_setr_pd(s, -s, s, -s);
    const __m256d k_hi = _mm256_setr_pd(-s, s, -s, s);
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; i += 2) {
            double* p0 = d + 2 * i;
            double* p1 = d + 2 * (i + stride);
            const __m256d v0 = _mm256_loadu_pd(p0);
            const __m256d v1 = _mm256_loadu_pd(p1);
            _mm256_storeu_pd(p0, _mm256_fmadd_pd(k_lo, swap_re_im(v0), _mm256_mul_pd(vc, v0)));
            _mm256_storeu_pd(p1, _mm256_fmadd_pd(k_hi, swap_re_im(v1), _mm256_mul_pd(vc, v1)));
        }
    }
}

void rotate_x(cplx* amps, std::size_t dim, unsigned target, double c, double s) {
    double* d = raw(amps);
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d k = _mm256_setr_pd(s, -s, s, -s);
    if (target == 0) {
        for (std::size_t i = 0; i < dim; i += 2) {
            const __m256d v = _mm256_loadu_pd(d + 2 * i);
            const __m256d other = swap_re_im(swap_halves(v));
            _mm256_storeu_pd(d + 2 * i, _mm256_fmadd_pd(k, other, _mm256_mul_pd(vc, v)));
        }
        return;
    }
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; i += 2) {
            double* p0 = d + 2 * i;
            double* p1 = d + 2 * (i + stride);
            const __m256d v0 = _mm256_loadu_pd(p0);
            const __m256d v1 = _mm256_loadu_pd(p1);
            _mm256_storeu_pd(p0, _mm256_fmadd_pd(k, swap_re_im(v1), _mm256_mul_pd(vc, v0)));
            _mm256_storeu_pd(p1, _mm256_fmadd_pd(k, swap_re_im(v0), _mm256_mul_pd(vc, v1)));
        }
    }
}

double expect_z(const cplx* amps, std::size_t dim, unsigned target) {
    const double* d = raw(amps);
    __m256d acc = _mm256_setzero_pd();
    if (target == 0) {
        const __m256d sgn = _mm256_setr_pd(1.0, 1.0, -1.0, -1.0);
        for (std::size_t i = 0; i < dim; i += 2) {
            const __m256d v = _mm256_loadu_pd(d + 2 * i);
            acc = _mm256_fmadd_pd(_mm256_mul_pd(sgn, v), v, acc);
        }
        return hsum(acc);
    }
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; i += 2) {
            const __m256d v0 = _mm256_loadu_pd(d + 2 * i);
            const __m256d v1 = _mm256_loadu_pd(d + 2 * (i + stride));
            acc = _mm256_fmadd_pd(v0, v0, acc);
            acc = _mm256_fnmadd_pd(v1, v1, acc);
        }
    }
    return hsum(acc);
}

double norm_sq(const cplx* amps, std::size_t dim) {
    const double* d = raw(amps);
    if (dim < 2) return std::norm(amps[0]);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < dim; i += 2) {
        const __m256d v = _mm256_loadu_pd(d + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    return hsum(acc);
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double quad_form(const double* m, const double* x, double* y, std::size_t dim) {
    if (dim % 4 != 0) return scalar_kernels().quad_form(m, x, y, dim);
    std::size_t i = 0;
    for (; i + 4 <= dim; i += 4) {
        const double* r0 = m + i * dim;
        const double* r1 = r0 + dim;
        const double* r2 = r1 + dim;
        const double* r3 = r2 + dim;
        __m256d a0 = _mm256_setzero_pd();
        __m256d a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd();
        __m256d a3 = _mm256_setzero_pd();
        for (std::size_t k = 0; k < dim; k += 4) {
            const __m256d xv = _mm256_loadu_pd(x + k);
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + k), xv, a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + k), xv, a1);
            a2 = _mm256_fmadd_pd(_mm256_loadu_pd(r2 + k), xv, a2);
            a3 = _mm256_fmadd_pd(_mm256_loadu_pd(r3 + k), xv, a3);
        }
        // Transpose-reduce the four accumulators into y[i..i+3].
        const __m256d s01 = _mm256_hadd_pd(a0, a1);
        const __m256d s23 = _mm256_hadd_pd(a2, a3);
        const __m256d lo = _mm256_permute2f128_pd(s01, s23, 0x20);
        const __m256d hi = _mm256_permute2f128_pd(s01, s23, 0x31);
        _mm256_storeu_pd(y + i, _mm256_add_pd(lo, hi));
    }
    return dot(x, y, dim);
}

void rank_update(double* r, const double* xs, const double* w, std::size_t count,
                 std::size_t dim) {
    if (dim % 4 != 0) {
        scalar_kernels().rank_update(r, xs, w, count, dim);
        return;
    }
    for (std::size_t i = 0; i < dim; ++i) {
        double* row = r + i * dim;
        std::size_t j = 0;
        for (; j + 4 <= count; j += 4) {
            const double* x0 = xs + j * dim;
            const double* x1 = x0 + dim;
            const double* x2 = x1 + dim;
            const double* x3 = x2 + dim;
            const __m256d c0 = _mm256_set1_pd(w[j] * x0[i]);
            const __m256d c1 = _mm256_set1_pd(w[j + 1] * x1[i]);
            const __m256d c2 = _mm256_set1_pd(w[j + 2] * x2[i]);
            const __m256d c3 = _mm256_set1_pd(w[j + 3] * x3[i]);
            for (std::size_t k = 0; k < dim; k += 4) {
                __m256d acc = _mm256_loadu_pd(row + k);
                acc = _mm256_fmadd_pd(c0, _mm256_loadu_pd(x0 + k), acc);
                acc = _mm256_fmadd_pd(c1, _mm256_loadu_pd(x1 + k), acc);
                acc = _mm256_fmadd_pd(c2, _mm256_loadu_pd(x2 + k), acc);
                acc = _mm256_fmadd_pd(c3, _mm256_loadu_pd(x3 + k), acc);
                _mm256_storeu_pd(row + k, acc);
            }
        }
        for (; j < count; ++j) {
            const double* x0 = xs + j * dim;
            const __m256d c0 = _mm256_set1_pd(w[j] * x0[i]);
            for (std::size_t k = 0; k < dim; k += 4) {
                _mm256_storeu_pd(row + k, _mm256_fmadd_pd(c0, _mm256_loadu_pd(x0 + k),
                                                          _mm256_loadu_pd(row + k)));
            }
        }
    }
}

}  // namespace

namespace detail {

const KernelSet& avx2_set() {
    static const KernelSet set{Isa::avx2, "avx2",  &rotate_real, &phase_pair,
                               &rotate_x,  &expect_z, &norm_sq,  &quad_form,
                               &rank_update, &dot};
    return set;
}

}  // namespace detail
}  // namespace qpinn::simd
