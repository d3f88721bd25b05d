#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "blowup6/radial_function.hpp"
#include "blowup6/rational.hpp"

namespace blowup {

/// Closed-form ground state of Delta Q + Q^p = 0 in R^n (n = 6, p = 2):
/// Q(r) = (1 + r^2/(n(n-2)))^{-(n-2)/2}, its scaling generator
/// Lambda Q = ((n-2)/2 + r d/dr) Q, and the potential V = p Q^{p-1}.
struct GroundStateModel {
  int n = 6;
  double p = 2.0;            // (n+2)/(n-2)
  double kappa = 1152.0;     // Lambda Q ~ -kappa r^{-(n-2)}
  double core_scale2 = 24.0; // n(n-2)

  static GroundStateModel dimension_six();

  /// Q_lambda(r) = lambda^{-(n-2)/2} Q(r/lambda). Throws on lambda <= 0.
  [[nodiscard]] double Q(double r, double lambda = 1.0) const;
  /// d/dr Q_lambda(r).
  [[nodiscard]] double dQ(double r, double lambda = 1.0) const;
  [[nodiscard]] double LambdaQ(double r) const;
  [[nodiscard]] double dLambdaQ(double r) const;
  [[nodiscard]] double V(double r) const;
  /// Radius where Lambda Q changes sign, sqrt(n(n-2)).
  [[nodiscard]] double LambdaQ_zero() const;
  /// Far-field limit of the Wronskian-normalized second solution, -1/(kappa (n-2)).
  [[nodiscard]] double gamma_tail_constant() const;
};

double eval_Q(double r, double lambda);
double eval_LambdaQ(double r);
double eval_V(double r);

struct GammaGridSpec {
  double r_min = 1e-3;
  double r_max = 100.0;
  std::size_t nodes = 4000;
};

/// Second homogeneous solution of H_y = Delta + V, normalized so the
/// Wronskian (Gamma' LambdaQ - Gamma LambdaQ') r^{n-1} equals one.
struct SecondSolution {
  GroundStateModel model;
  RadialFunction gamma;        // exact derivative samples attached
  double tail_constant = 0.0;  // -1/(kappa (n-2))
  double anchor_radius = 0.0;
  double max_wronskian_deviation = 0.0;

  /// Gamma(r); beyond the grid it continues through the integral representation.
  [[nodiscard]] double value(double r) const;
  [[nodiscard]] double derivative(double r) const;
  [[nodiscard]] double wronskian(double r) const;

  // Integral of 1/((Lambda Q)^2 s^{n-1}) from the anchor to r_max.
  double representation_integral_at_rmax = 0.0;
};

/// Seeds Gamma at `anchor_radius` from the reduction-of-order representation,
/// continues it outward by the same integral and inward (across the zero of
/// Lambda Q) by integrating H_y Gamma = 0. Throws InvalidArgument for an anchor
/// too close to sqrt(n(n-2)) or an inadequate grid, NumericalError when the
/// Wronskian drifts beyond `wronskian_tol`.
SecondSolution build_Gamma(const GroundStateModel& model, double anchor_radius = 6.0,
                           const GammaGridSpec& grid = {}, double wronskian_tol = 1e-6);

/// Variation of parameters: T = -Gamma int_0^r LambdaQ g s^{n-1} + LambdaQ int_0^r Gamma g s^{n-1},
/// the solution of H_y T = g regular at the origin. Returned on Gamma's grid.
RadialFunction solve_inhomogeneous(const SecondSolution& gamma, const std::function<double(double)>& g);
RadialFunction solve_inhomogeneous(const SecondSolution& gamma, const RadialFunction& g);

/// Second-order discrete H_y f = f'' + (n-1)/r f' + V f at interior nodes
/// (entries 0 and N-1 are set to zero).
std::vector<double> apply_H(const GroundStateModel& model, const RadialFunction& f);

/// First inner corrector: H_y T1 + Lambda Q = 0 with T1(0) = 0, bounded at infinity.
struct CorrectorT1 {
  RadialFunction by_variation_of_parameters;
  RadialFunction by_direct_bvp;
  RadialFunction split_prime;         // -Gamma int_0^r (Lambda Q)^2 s^{n-1}
  RadialFunction split_double_prime;  // Lambda Q int_0^r Gamma Lambda Q s^{n-1}
  double max_route_deviation = 0.0;   // sup |T_vp - T_bvp| / sup |T_vp| on r <= 50
  double limit = 0.0;                 // -tail_constant * int_0^inf (Lambda Q)^2 s^{n-1}
  double tail_coefficient = 0.0;      // T1 ~ limit + tail_coefficient / r^2

  /// T1(r) for any r >= 0: interpolated on the grid, quadratic near the
  /// origin, limit + c r^{-2} beyond r_max.
  [[nodiscard]] double value(double r) const;
  [[nodiscard]] double derivative(double r) const;
};

CorrectorT1 build_T1(const SecondSolution& gamma, double cross_tol = 1e-4);

/// Two-point boundary-value solve of H_y T = g on [0, r_max] by second-order
/// differences: T(0) = t0 pinned, far-field (r^3 T')' = 0 at r_max.
RadialFunction solve_radial_bvp(const GroundStateModel& model, std::span<const double> grid,
                                const std::function<double(double)>& g, double t0 = 0.0);

/// int_0^inf (Lambda Q)^2 r^{n-1} dr, and its value after the substitution
/// s = r^2/(n(n-2)): raw = normalization * reduced, with
/// reduced = int_0^inf (1-s)^2 s^{(n-2)/2} (1+s)^{-n} ds.
struct LambdaQIntegral {
  double raw = 0.0;
  double raw_error = 0.0;
  double reduced = 0.0;
  double normalization = 0.0;   // ((n-2)/2)^2 (n(n-2))^{n/2} / 2
  double truncated_raw = 0.0;   // quadrature on [0, 50] only, no tail
  double tail = 0.0;            // analytic tail beyond the quadrature cut
  int panels = 0;
};

LambdaQIntegral integral_LambdaQ_squared(const GroundStateModel& model = GroundStateModel::dimension_six(),
                                         double quadrature_cut = 100.0);

/// Exact value of the reduced integral from the partial-fraction expansion
/// in t = 1 + s (2/15 for n = 6).
Rational reduced_integral_partial_fractions(const GroundStateModel& model = GroundStateModel::dimension_six());

}  // namespace blowup
