#pragma once

#include "qpinn/simd/kernels.hpp"

namespace qpinn::simd::detail {

// Plain complex product; std::complex operator* goes through the Annex G
// NaN recovery path, which is slow and irrelevant for finite amplitudes.
inline cplx cmul(cplx a, cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

#if defined(QPINN_HAVE_AVX2)
const KernelSet& avx2_set();
#endif

}  // namespace qpinn::simd::detail
