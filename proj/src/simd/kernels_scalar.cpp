#include "qpinn/simd/kernels.hpp"

#include "kernels_internal.hpp"

namespace qpinn::simd {
namespace {

void rotate_real(cplx* amps, std::size_t dim, unsigned target, double c, double s) {
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; ++i) {
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            amps[i] = c * a0 - s * a1;
            amps[i + stride] = s * a0 + c * a1;
        }
    }
}

void phase_pair(cplx* amps, std::size_t dim, unsigned target, double c, double s) {
    const std::size_t stride = std::size_t{1} << target;
    const cplx lo{c, -s};
    const cplx hi{c, s};
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; ++i) {
            amps[i] = detail::cmul(amps[i], lo);
            amps[i + stride] = detail::cmul(amps[i + stride], hi);
        }
    }
}

void rotate_x(cplx* amps, std::size_t dim, unsigned target, double c, double s) {
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; ++i) {
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            // -i s a = (s a.im, -s a.re)
            amps[i] = cplx{c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
            amps[i + stride] = cplx{c * a1.real() + s * a0.imag(), c * a1.imag() - s * a0.real()};
        }
    }
}

double expect_z(const cplx* amps, std::size_t dim, unsigned target) {
    const std::size_t stride = std::size_t{1} << target;
    double acc = 0.0;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; ++i) {
            acc += std::norm(amps[i]) - std::norm(amps[i + stride]);
        }
    }
    return acc;
}

double norm_sq(const cplx* amps, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += std::norm(amps[i]);
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double quad_form(const double* m, const double* x, double* y, std::size_t dim) {
    for (std::size_t i = 0; i < dim; ++i) y[i] = dot(m + i * dim, x, dim);
    return dot(x, y, dim);
}

void rank_update(double* r, const double* xs, const double* w, std::size_t count,
                 std::size_t dim) {
    for (std::size_t i = 0; i < dim; ++i) {
        double* row = r + i * dim;
        for (std::size_t j = 0; j < count; ++j) {
            const double* x = xs + j * dim;
            const double a = w[j] * x[i];
            for (std::size_t k = 0; k < dim; ++k) row[k] += a * x[k];
        }
    }
}

}  // namespace

const KernelSet& scalar_kernels() {
    static const KernelSet set{Isa::scalar, "scalar",  &rotate_real, &phase_pair,
                               &rotate_x,   &expect_z, &norm_sq,     &quad_form,
                               &rank_update, &dot};
    return set;
}

}  // namespace qpinn::simd
