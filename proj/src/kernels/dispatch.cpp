#include <cstdlib>
#include <cstring>

#include "blowup6/kernels.hpp"

namespace blowup::kernels {

#ifdef BLOWUP6_HAVE_AVX2
const KernelTable* avx2_kernels_compiled();
#endif

const KernelTable* avx2_kernels() {
#if defined(BLOWUP6_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  if (__builtin_cpu_supports("avx2")) return avx2_kernels_compiled();
#endif
  return nullptr;
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* env = std::getenv("BLOWUP6_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
    if (const auto* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace blowup::kernels
