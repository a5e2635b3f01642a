#include <cstdlib>
#include <string_view>

#include "dirt/simd/kernels.hpp"

namespace dirt::simd {

#if defined(DIRT_HAVE_AVX2)
const KernelTable* avx2_table_unchecked() noexcept;
#endif

bool cpu_supports_avx2() noexcept {
#if defined(DIRT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* avx2_kernels() noexcept {
#if defined(DIRT_HAVE_AVX2)
    if (cpu_supports_avx2()) return avx2_table_unchecked();
#endif
    return nullptr;
}

const KernelTable& active_kernels() noexcept {
    static const KernelTable* selected = [] {
        const char* env = std::getenv("DIRT_SIMD");
        if (env != nullptr && std::string_view(env) == "scalar") return &scalar_kernels();
        const KernelTable* avx = avx2_kernels();
        return avx != nullptr ? avx : &scalar_kernels();
    }();
    return *selected;
}

}  // namespace dirt::simd
