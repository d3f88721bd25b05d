#pragma once

#include <cstddef>
#include <string>

namespace blowup::kernels {

struct Extrema {
  double max_abs = 0.0;
  double min_value = 0.0;
  bool finite = true;
};

/// Hot loops of the evolver. Every variant performs the same floating-point
/// operations in the same order per element, so results are bit-identical.
struct KernelTable {
  const char* name;
  /// out[i] = lower[i] u[i-1] + diag[i] u[i] + upper[i] u[i+1] + |u[i]| u[i],
  /// with u[-1] and u[n] taken as zero (lower[0], upper[n-1] are ignored).
  void (*heat_rhs)(std::size_t n, const double* lower, const double* diag, const double* upper,
                   const double* u, double* out);
  /// out[i] = a x[i] + b (y[i] + dt k[i]).
  void (*rk_combine)(std::size_t n, double a, const double* x, double b, const double* y, double dt,
                     const double* k, double* out);
  Extrema (*extrema)(std::size_t n, const double* u);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Chosen once: AVX2 when available unless BLOWUP6_KERNELS=scalar is set.
const KernelTable& active_kernels();

}  // namespace blowup::kernels
