#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blowup6/errors.hpp"

namespace blowup {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct OdeOptions {
  double rtol = 1e-11;
  double atol = 1e-14;
  double max_step = 0.0;  // 0 = unbounded
  long max_steps = 5'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
/// Integration runs forward or backward; the step size carries over between
/// successive `advance` calls so dense output points cost nothing extra.
template <std::size_t N, class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, double x0, OdeState<N> y0, OdeOptions opts = {})
      : rhs_(std::move(rhs)), x_(x0), y_(y0), opts_(opts) {}

  [[nodiscard]] double x() const { return x_; }
  [[nodiscard]] const OdeState<N>& y() const { return y_; }
  [[nodiscard]] const OdeStats& stats() const { return stats_; }

  /// Integrate to x1. `on_step(x, y)` is called after every accepted step.
  template <class Observer>
  const OdeState<N>& advance(double x1, Observer&& on_step) {
    if (x1 == x_) return y_;
    const double dir = x1 > x_ ? 1.0 : -1.0;
    if (h_ == 0.0) h_ = initial_step(x1);
    h_ = dir * std::abs(h_);
    while (dir * (x1 - x_) > 0.0) {
      if (++steps_ > opts_.max_steps) throw NumericalError("ODE integration exceeded max_steps");
      double h = h_;
      if (opts_.max_step > 0.0) h = dir * std::min(std::abs(h), opts_.max_step);
      bool last = false;
      if (dir * (x_ + h - x1) >= 0.0) {
        h = x1 - x_;
        last = true;
      }
      OdeState<N> y_new, err;
      step(h, y_new, err);
      double err_norm = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
        err_norm = std::max(err_norm, std::abs(err[i]) / sc);
      }
      if (!std::isfinite(err_norm)) err_norm = 1e10;
      if (err_norm <= 1.0) {
        x_ = last ? x1 : x_ + h;
        y_ = y_new;
        k1_ = k7_;  // FSAL
        ++stats_.accepted;
        on_step(x_, y_);
        const double fac = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
        if (!last) h_ = h * fac;
      } else {
        ++stats_.rejected;
        h_ = h * std::max(0.1, 0.9 * std::pow(err_norm, -0.25));
        if (std::abs(h_) < 1e-15 * std::max(1.0, std::abs(x_)))
          throw NumericalError("ODE step size underflow at x = " + std::to_string(x_));
      }
    }
    return y_;
  }

  const OdeState<N>& advance(double x1) {
    return advance(x1, [](double, const OdeState<N>&) {});
  }

 private:
  double initial_step(double x1) {
    k1_ = rhs_(x_, y_);
    have_k1_ = true;
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts_.atol + opts_.rtol * std::abs(y_[i]);
      d0 = std::max(d0, std::abs(y_[i]) / sc);
      d1 = std::max(d1, std::abs(k1_[i]) / sc);
    }
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, std::abs(x1 - x_));
    if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);
    return h;
  }

  void step(double h, OdeState<N>& y_new, OdeState<N>& err) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    if (!have_k1_) {
      k1_ = rhs_(x_, y_);
      have_k1_ = true;
    }
    OdeState<N> t;
    for (std::size_t i = 0; i < N; ++i) t[i] = y_[i] + h * a21 * k1_[i];
    const OdeState<N> k2 = rhs_(x_ + c2 * h, t);
    for (std::size_t i = 0; i < N; ++i) t[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
    const OdeState<N> k3 = rhs_(x_ + c3 * h, t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
    const OdeState<N> k4 = rhs_(x_ + c4 * h, t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const OdeState<N> k5 = rhs_(x_ + c5 * h, t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const OdeState<N> k6 = rhs_(x_ + h, t);
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y_[i] + h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7_ = rhs_(x_ + h, y_new);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7_[i]);
  }

  Rhs rhs_;
  double x_;
  OdeState<N> y_;
  OdeOptions opts_;
  OdeStats stats_;
  double h_ = 0.0;
  long steps_ = 0;
  OdeState<N> k1_{}, k7_{};
  bool have_k1_ = false;
};

template <std::size_t N, class Rhs>
DormandPrince<N, Rhs> make_dormand_prince(Rhs rhs, double x0, OdeState<N> y0,
                                          OdeOptions opts = {}) {
  return DormandPrince<N, Rhs>(std::move(rhs), x0, y0, opts);
}

}  // namespace blowup
