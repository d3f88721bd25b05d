#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "blowup6/errors.hpp"

namespace blowup {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-13;
  int max_panels = 20000;
  bool throw_on_failure = true;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss 7-point weights on Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

/// One Gauss-Kronrod 7/15 panel: {kronrod value, |kronrod - gauss|}.
template <class F>
std::pair<double, double> gauss_kronrod15(F&& f, double a, double b) {
  using namespace detail;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[j] * s;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * s;
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

/// Globally adaptive Gauss-Kronrod quadrature on [a, b]: the panel with the
/// largest error estimate is bisected until the summed estimate is below
/// max(abs_tol, rel_tol * |I|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  QuadratureResult res;
  if (a == b) return res;
  if (!std::isfinite(a) || !std::isfinite(b))
    throw InvalidArgument("integrate: interval endpoints must be finite");
  const double sign = b > a ? 1.0 : -1.0;
  if (b < a) std::swap(a, b);

  std::priority_queue<detail::Panel> heap;
  auto push = [&](double lo, double hi) {
    auto [v, e] = gauss_kronrod15(f, lo, hi);
    heap.push({lo, hi, v, e});
    res.value += v;
    res.error += e;
  };
  push(a, b);
  res.panels = 1;
  while (res.error > std::max(opts.abs_tol, opts.rel_tol * std::abs(res.value))) {
    if (res.panels >= opts.max_panels || !std::isfinite(res.value)) {
      res.converged = false;
      break;
    }
    const detail::Panel worst = heap.top();
    heap.pop();
    res.value -= worst.value;
    res.error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      res.value += worst.value;
      res.error += worst.error;
      res.converged = false;
      break;
    }
    push(worst.a, mid);
    push(mid, worst.b);
    ++res.panels;
  }
  // Re-sum to shed cancellation from the running updates.
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  res.value = sign * v;
  res.error = e;
  if (!res.converged && opts.throw_on_failure)
    throw NumericalError("adaptive quadrature did not converge (error estimate " +
                         std::to_string(e) + ")");
  return res;
}

/// Sum of adaptive integrals over consecutive breakpoints.
template <class F>
QuadratureResult integrate_pieces(F&& f, const std::vector<double>& breaks,
                                  const QuadratureOptions& opts = {}) {
  QuadratureResult total;
  total.panels = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const auto r = integrate(f, breaks[i], breaks[i + 1], opts);
    total.value += r.value;
    total.error += r.error;
    total.panels += r.panels;
    total.converged = total.converged && r.converged;
  }
  return total;
}

}  // namespace blowup
