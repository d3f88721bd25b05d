#include <cmath>

#include "blowup6/kernels.hpp"

namespace blowup::kernels {

namespace {

void heat_rhs(std::size_t n, const double* lower, const double* diag, const double* upper, const double* u,
              double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double um = i > 0 ? u[i - 1] : 0.0;
    const double up = i + 1 < n ? u[i + 1] : 0.0;
    const double lo = i > 0 ? lower[i] : 0.0;
    const double hi = i + 1 < n ? upper[i] : 0.0;
    const double lin = (lo * um + diag[i] * u[i]) + hi * up;
    out[i] = lin + std::abs(u[i]) * u[i];
  }
}

void rk_combine(std::size_t n, double a, const double* x, double b, const double* y, double dt, const double* k,
                double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * (y[i] + dt * k[i]);
}

Extrema extrema(std::size_t n, const double* u) {
  Extrema e;
  if (n == 0) return e;
  double mx = 0.0, mn = u[0];
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = u[i];
    if (!std::isfinite(v)) finite = false;
    mx = std::max(mx, std::abs(v));
    mn = std::min(mn, v);
  }
  e.max_abs = mx;
  e.min_value = mn;
  e.finite = finite;
  return e;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", heat_rhs, rk_combine, extrema};
  return table;
}

}  // namespace blowup::kernels
