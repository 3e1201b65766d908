#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "qpinn/simd/kernels.hpp"

namespace qpinn::simd {
namespace {

bool cpu_has_avx2() {
#if defined(QPINN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelSet* initial_set() {
    const KernelSet* best = avx2_kernels();
    if (const char* env = std::getenv("QPINN_SIMD")) {
        const std::string want{env};
        if (want == "scalar") return &scalar_kernels();
        if (want == "avx2" && best != nullptr) return best;
    }
    return best != nullptr ? best : &scalar_kernels();
}

std::atomic<const KernelSet*>& active() {
    static std::atomic<const KernelSet*> set{initial_set()};
    return set;
}

}  // namespace

const KernelSet* avx2_kernels() {
#if defined(QPINN_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &detail::avx2_set() : nullptr;
#else
    return nullptr;
#endif
}

const KernelSet& kernels() { return *active().load(std::memory_order_relaxed); }

bool select(Isa isa) {
    const KernelSet* set = isa == Isa::scalar ? &scalar_kernels() : avx2_kernels();
    if (set == nullptr) return false;
    active().store(set, std::memory_order_relaxed);
    return true;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace qpinn::simd
