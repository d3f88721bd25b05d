#pragma once

#include <functional>
#include <span>
#include <vector>

#include "blowup6/profile.hpp"
#include "blowup6/radial_function.hpp"

namespace blowup {

struct EnergyReport {
  double t = 0.0;
  double tau = 0.0;
  double grad_term = 0.0;   // (1/2) int_{|x|<1} |grad u|^2
  double cubic_term = 0.0;  // (1/3) int_{|x|<1} |u|^3
  double e_loc = 0.0;       // grad_term - cubic_term
  double grad_error = 0.0;
  double cubic_error = 0.0;
};

struct EnergyQuadrature {
  double rel_tol = 1e-10;
  int max_panels = 200000;
};

/// Local energy on the unit ball of a radial function given with its radial
/// derivative. `scales` are radii where the integrands change character; the
/// quadrature runs in log r with a breakpoint at each of them.
EnergyReport local_energy(const std::function<double(double)>& u, const std::function<double(double)>& du,
                          std::span<const double> scales, const EnergyQuadrature& q = {});

/// Grid samples: the derivative is used if attached, else estimated from the
/// samples. InvalidArgument if the grid misses [0, 1] or has fewer than 3 nodes.
EnergyReport local_energy(const RadialFunction& u, const EnergyQuadrature& q = {});

/// E_loc(Q_lambda).
EnergyReport local_energy_Q(double lambda, const EnergyQuadrature& q = {});

/// E_loc(u_app(., t)) at T - t = e^{-tau}, analytic gradient.
EnergyReport local_energy_uapp(const BlowupProfile& profile, double tau, const EnergyQuadrature& q = {});

struct ThetaIntegrals {
  double tau = 0.0;
  double I3 = 0.0;        // int_{|z| < tau^{19/30}} (1 + (alpha/tau) e1(z))^{-3} dz
  double I3_floor = 0.0;  // same with (1 + alpha c1 |z|^2 / tau)^{-3}
  double Igrad = 0.0;     // int_{|x|<1} |grad Theta|^2 dx (scale free)
  [[nodiscard]] double I3_ratio() const;     // I3 / (tau^3 log tau)
  [[nodiscard]] double Igrad_ratio() const;  // Igrad / (tau^2 log tau)
};

ThetaIntegrals theta_scaling_integrals(const HermiteBasis& basis, double tau, double alpha = 0.0);

}  // namespace blowup
