#pragma once

// Low-level arithmetic kernels used by the statevector engine and the compiled
// observable path. Each kernel set exposes the same signatures; the scalar set
// is the reference and the vector sets must agree with it to rounding.

#include <complex>
#include <cstddef>
#include <string_view>

namespace qpinn::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelSet {
    Isa isa;
    const char* name;

    // Real 2x2 rotation [[c, -s], [s, c]] on the pair (k, k | 1 << target).
    void (*rotate_real)(cplx* amps, std::size_t dim, unsigned target, double c, double s);
    // diag(c - i s, c + i s).
    void (*phase_pair)(cplx* amps, std::size_t dim, unsigned target, double c, double s);
    // [[c, -i s], [-i s, c]].
    void (*rotate_x)(cplx* amps, std::size_t dim, unsigned target, double c, double s);
    // Sum over k of (+1 / -1) |a_k|^2 by bit `target` of k.
    double (*expect_z)(const cplx* amps, std::size_t dim, unsigned target);
    // Sum over k of |a_k|^2.
    double (*norm_sq)(const cplx* amps, std::size_t dim);

    // y = M x for row-major dim x dim M; returns x . y.
    double (*quad_form)(const double* m, const double* x, double* y, std::size_t dim);
    // R += sum_j w[j] x_j x_j^T, x_j rows of the count x dim array xs.
    void (*rank_update)(double* r, const double* xs, const double* w, std::size_t count,
                        std::size_t dim);
    // sum_i a_i b_i
    double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelSet& scalar_kernels();

// nullptr when the build or the running CPU lacks the instruction set.
const KernelSet* avx2_kernels();

// Active set. Chosen once from the CPU features, or from QPINN_SIMD
// (scalar | avx2 | auto) when set.
const KernelSet& kernels();

// Forces the active set; returns false if `isa` is unavailable on this machine.
bool select(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace qpinn::simd
