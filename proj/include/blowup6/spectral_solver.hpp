#pragma once

#include <functional>
#include <span>
#include <vector>

#include "blowup6/radial_function.hpp"

namespace blowup {

using Potential = std::function<double(double)>;

/// V(r) = 2 Q(r) for n = 6.
Potential ground_state_potential();
Potential zero_potential();

struct ShootingOptions {
  double mu_lo = -5.0;
  double mu_hi = 5.0;
  double scan_step = 0.05;
  double mu_tol = 1e-9;
  double start_radius = 1e-3;
  std::size_t output_nodes = 4001;  // uniform samples of psi on [0, R]
  double rtol = 1e-12;
};

/// Dirichlet eigenpair of -(Delta + V) psi = mu psi on the ball B_R (radial).
struct EigenResult {
  double R = 0.0;
  int index = 0;
  double mu = 0.0;
  RadialFunction psi;  // psi(0) = 1
  int zeros = 0;       // interior zeros on (0, R)
  double boundary_value = 0.0;  // psi(R) at the converged mu
  double residual = 0.0;        // sup |H psi + mu psi| / sup |psi| (4th-order stencil)
};

struct ShotResult {
  double boundary_value = 0.0;
  int sign_changes = 0;  // on (0, R], endpoint included
};

ShotResult shoot_radial(double mu, double R, const Potential& V, const ShootingOptions& opts = {});

/// Shooting from psi(0) = 1, psi'(0) = 0 with bisection on the Sturm count.
/// Throws NumericalError if no bracket exists in [mu_lo, mu_hi] or the zero
/// count of the converged eigenfunction is not index - 1.
EigenResult solve_dirichlet_eigen(double R, int index, const Potential& V = ground_state_potential(),
                                  const ShootingOptions& opts = {});

struct Mu1Extrapolation {
  std::vector<double> R;
  std::vector<double> mu1;
  double limit = 0.0;
  bool monotone = true;  // mu1 non-increasing in R (domain monotonicity)
  double max_violation = 0.0;
};

Mu1Extrapolation estimate_mu1_infinity(std::span<const double> R_list,
                                       const Potential& V = ground_state_potential(),
                                       double monotone_tol = 1e-9);

struct DecayReport {
  double R = 0.0;
  bool positive = true;
  double envelope_constant = 0.0;  // sup psi (1+r)^{(n-1)/2} e^{sqrt|mu| r} on (0, 0.9 R)
  double psi_at_origin = 0.0;
};

/// Positivity and exponential-decay envelope of the ground eigenfunction.
/// Throws NumericalError on a sign change.
DecayReport decay_check(const EigenResult& result);

struct GapReport {
  std::vector<double> R;
  std::vector<double> mu2;
  std::vector<double> scaled;  // mu2 * R^power
  double min_scaled = 0.0;
  double band_ratio = 0.0;     // max/min of scaled
  bool passed = false;         // min > 0 and band_ratio <= 4
};

/// mu_2^{(R)} R^{power} across R (power = n - 2 = 4 for the spectral-gap bound).
/// Throws NumericalError when some mu_2 <= 0.
GapReport gap_scaling_check(std::span<const double> R_list, const Potential& V = ground_state_potential(),
                            double power = 4.0);

/// Bounded solution of Delta p + (1 - chi_M) V p = 0 with p = 1 on r <= M.
struct PerturbedSolution {
  double M = 0.0;
  double r_max = 0.0;
  RadialFunction pm;
  double lower_bound = 0.0;  // inf p over (M, r_max)
  bool within_bounds = false;  // 0 < p <= 1 everywhere computed
};

PerturbedSolution solve_pM(double M, double r_max, const Potential& V = ground_state_potential(),
                           std::size_t nodes = 8001);

/// Smallest M in {M_start, M_start + step, ...} <= M_stop whose p_M stays in (0, 1].
/// Returns a negative value if none qualifies.
double smallest_admissible_M(double M_start = 5.0, double M_stop = 40.0, double step = 1.0,
                             const Potential& V = ground_state_potential());

/// Lowest `count` Dirichlet eigenvalues of the second-order finite-volume
/// discretization with `cells` uniform cells (Sturm-sequence bisection).
std::vector<double> fd_dirichlet_eigenvalues(double R, std::size_t cells, const Potential& V, int count);

/// 4th-order discrete sup |H psi + mu psi| / sup |psi| on uniform samples
/// starting at r = 0 (psi extended evenly across the origin).
double eigen_residual(const RadialFunction& psi, double mu, const Potential& V, int n = 6);

}  // namespace blowup
