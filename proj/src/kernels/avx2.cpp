#include <immintrin.h>

#include <cmath>

#include "blowup6/kernels.hpp"

namespace blowup::kernels {

namespace {

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

void heat_rhs(std::size_t n, const double* lower, const double* diag, const double* upper, const double* u,
              double* out) {
  if (n < 6) {
    scalar_kernels().heat_rhs(n, lower, diag, upper, u, out);
    return;
  }
  // Node 0 and the tail use the scalar expression verbatim.
  {
    const double lin = (0.0 * 0.0 + diag[0] * u[0]) + upper[0] * u[1];
    out[0] = lin + std::abs(u[0]) * u[0];
  }
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d um = _mm256_loadu_pd(u + i - 1);
    const __m256d u0 = _mm256_loadu_pd(u + i);
    const __m256d up = _mm256_loadu_pd(u + i + 1);
    const __m256d lo = _mm256_loadu_pd(lower + i);
    const __m256d di = _mm256_loadu_pd(diag + i);
    const __m256d hi = _mm256_loadu_pd(upper + i);
    const __m256d lin = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(lo, um), _mm256_mul_pd(di, u0)),
                                      _mm256_mul_pd(hi, up));
    const __m256d react = _mm256_mul_pd(_mm256_and_pd(u0, kAbsMask), u0);
    _mm256_storeu_pd(out + i, _mm256_add_pd(lin, react));
  }
  for (; i < n; ++i) {
    const double upv = i + 1 < n ? u[i + 1] : 0.0;
    const double hi = i + 1 < n ? upper[i] : 0.0;
    const double lin = (lower[i] * u[i - 1] + diag[i] * u[i]) + hi * upv;
    out[i] = lin + std::abs(u[i]) * u[i];
  }
}

void rk_combine(std::size_t n, double a, const double* x, double b, const double* y, double dt, const double* k,
                double* out) {
  const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b), vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d inner = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vdt, _mm256_loadu_pd(k + i)));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)), _mm256_mul_pd(vb, inner)));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * (y[i] + dt * k[i]);
}

Extrema extrema(std::size_t n, const double* u) {
  if (n < 4) return scalar_kernels().extrema(n, u);
  __m256d mx = _mm256_setzero_pd();
  __m256d mn = _mm256_set1_pd(u[0]);
  __m256d bad = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(INFINITY);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(u + i);
    const __m256d a = _mm256_and_pd(v, kAbsMask);
    // |v| < inf is false for both inf and NaN.
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(a, inf, _CMP_NLT_UQ));
    mx = _mm256_max_pd(mx, a);
    mn = _mm256_min_pd(mn, v);
  }
  alignas(32) double bx[4], bn[4];
  _mm256_store_pd(bx, mx);
  _mm256_store_pd(bn, mn);
  Extrema e;
  e.finite = _mm256_movemask_pd(bad) == 0;
  e.max_abs = std::max(std::max(bx[0], bx[1]), std::max(bx[2], bx[3]));
  e.min_value = std::min(std::min(bn[0], bn[1]), std::min(bn[2], bn[3]));
  for (; i < n; ++i) {
    if (!std::isfinite(u[i])) e.finite = false;
    e.max_abs = std::max(e.max_abs, std::abs(u[i]));
    e.min_value = std::min(e.min_value, u[i]);
  }
  return e;
}

}  // namespace

const KernelTable* avx2_kernels_compiled() {
  static const KernelTable table{"avx2", heat_rhs, rk_combine, extrema};
  return &table;
}

}  // namespace blowup::kernels
