#pragma once

#include <algorithm>

namespace blowup {

/// Repo-wide smooth cutoff: eta = 1 on [0, 1], 0 on [2, inf), quintic
/// smoothstep 1 - s^3 (10 - 15 s + 6 s^2), s = xi - 1, in between (C^2).
inline double eta(double xi) {
  const double s = std::clamp(xi - 1.0, 0.0, 1.0);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

inline double eta_prime(double xi) {
  if (xi <= 1.0 || xi >= 2.0) return 0.0;
  const double s = xi - 1.0;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s);
}

inline double eta_second(double xi) {
  if (xi <= 1.0 || xi >= 2.0) return 0.0;
  const double s = xi - 1.0;
  return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

}  // namespace blowup
