#include <cstdlib>
#include <cstring>

#include "insulate/kernels.hpp"

namespace insulate::kernels {

#ifdef INSULATE_WITH_AVX2
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#ifdef INSULATE_WITH_AVX2
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("INSULATE_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_table();
    const KernelTable* v = avx2_table();
    return v ? v : &scalar_table();
  }();
  return *chosen;
}

}  // namespace insulate::kernels
