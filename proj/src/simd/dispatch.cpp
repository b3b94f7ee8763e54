#include <cstdlib>
#include <string_view>

#include "isbst/simd/kernels.hpp"

namespace isbst::simd {

#if defined(ISBST_HAVE_AVX2)
const LaneKernels& avx2_kernel_table();
#endif

const LaneKernels* avx2_kernels() {
#if defined(ISBST_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const LaneKernels& active_kernels() {
  static const LaneKernels& table = [&]() -> const LaneKernels& {
    const char* env = std::getenv("ISBST_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const auto* avx2 = avx2_kernels()) return *avx2;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace isbst::simd
