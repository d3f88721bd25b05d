#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup6/profile.hpp"
#include "blowup6/radial_function.hpp"

namespace blowup {

/// Initial data for a radial evolution.
struct DataSpec {
  enum class Kind { Constant, Uapp, Custom };
  Kind kind = Kind::Constant;
  double amplitude = 1.0;                         // Constant
  std::shared_ptr<const BlowupProfile> profile;   // Uapp
  double tau0 = 12.0;                             // Uapp: start at T - t0 = e^{-tau0}
  std::optional<RadialFunction> samples;          // Custom

  static DataSpec constant(double A);
  static DataSpec zero() { return constant(0.0); }
  static DataSpec uapp(std::shared_ptr<const BlowupProfile> profile, double tau0);
  static DataSpec custom(RadialFunction f);
  /// "constant:<A>", "zero", "uapp:<tau0>" (needs `profile` for uapp).
  static DataSpec parse(const std::string& text, std::shared_ptr<const BlowupProfile> profile = nullptr);
};

struct EvolutionGridSpec {
  double h0 = 0.05;       // spacing at the origin
  double growth = 1.03;   // geometric growth factor away from the core
  std::size_t core_cells = 20;
};

/// Explicit: SSP-RK3 on u. Implicit: backward Euler + Newton on u.
/// ImplicitRemainder: backward Euler on v = u - u_app, forced by the analytic
/// residual of u_app (u_app data only; u = u_app on the outer boundary).
enum class Scheme { Explicit, Implicit, ImplicitRemainder };
enum class RunStatus { Running, Completed, BlownUp, Unstable };
std::string status_name(RunStatus s);

struct EvolverOptions {
  Scheme scheme = Scheme::Explicit;
  // Explicit: dt = min(diffusive_safety / max_i |L_ii|, reaction_c / sup|u|).
  double diffusive_safety = 0.9;
  double reaction_c = 0.02;
  std::optional<double> fixed_dt;  // explicit only; still capped by the stability bound
  // Implicit (backward Euler + Newton): relative change per step targeted.
  double target_change = 5e-3;
  double initial_dt = 0.0;         // 0 = derived from target_change
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
  // Blowup flag when sup|u| exceeds this.
  double blowup_threshold = 1e12;
  bool allow_regrid = true;        // one-shot refinement when lambda < 10 h(0)
  std::size_t history_capacity = 1u << 20;
};

struct HistorySample {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double u_center = 0.0;
  double sup_abs = 0.0;
  double min_u = 0.0;
};

struct EvolutionState {
  double t = 0.0;
  std::vector<double> grid;  // grid[0] = 0; the last node carries the Dirichlet value 0
  std::vector<double> u;
  double dt = 0.0;
  long step_count = 0;
  RunStatus status = RunStatus::Running;
  double status_time = 0.0;
  bool regridded = false;
  std::deque<HistorySample> history;
  EvolverOptions options;

  // Remainder formulation: u = u_app(., T - t) + v.
  std::shared_ptr<const BlowupProfile> base;
  double remaining = 0.0;  // T - t, carried separately to avoid cancellation
  std::vector<double> v;

  // Finite-volume Laplacian coefficients for the free nodes 0..N-2.
  std::vector<double> lower, diag, upper;
  double diffusive_bound = 0.0;  // max_i |diag_i|
};

/// Places data on an origin-clustered grid of radius `domain_radius` with
/// u = 0 at the outer node. Throws InvalidArgument when the data is not
/// resolved (midpoint interpolation defect above 1% of sup|u|).
EvolutionState init(const DataSpec& data, double domain_radius, const EvolutionGridSpec& grid,
                    const EvolverOptions& options = {});

/// Largest explicit step that keeps the scheme monotone and honours the reaction bound.
double stable_dt(const EvolutionState& state);

/// One step. On overflow or NaN the state is left at the previous step and flagged.
void step(EvolutionState& state);

/// Steps until t_end (hit exactly), a terminal status, or max_steps. The
/// observer sees every accepted step.
void evolve(EvolutionState& state, double t_end, long max_steps,
            const std::function<void(const EvolutionState&)>& observer = {});

/// Remainder scheme only: steps until T - t reaches s_end. Driven by T - t
/// itself, so it works where t no longer resolves T - t.
void evolve_remaining(EvolutionState& state, double s_end, long max_steps,
                      const std::function<void(const EvolutionState&)>& observer = {});

/// Finite-volume u'' + (5/r) u' (with the symmetric limit at r = 0) of the free nodes.
std::vector<double> apply_laplacian(const EvolutionState& state, std::span<const double> u);

struct BlowupTimeEstimate {
  double T_est = 0.0;
  double width = 0.0;  // one standard error
  std::size_t samples_used = 0;
};

/// Fits 1/sup|u| (p - 1 = 1) linearly in t over the last half of the
/// history and extrapolates to zero. NumericalError without monotone growth.
BlowupTimeEstimate estimate_blowup_time(std::span<const HistorySample> history);
BlowupTimeEstimate estimate_blowup_time(const std::deque<HistorySample>& history);

/// lambda = u(0)^{-1/2}; NumericalError if u(0) <= 0.
double extract_lambda(const EvolutionState& state);
double extract_lambda(double u_center);

struct RatePoint {
  double t = 0.0;
  double lambda = 0.0;
};

struct RateFit {
  double T_est = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double a_stderr = 0.0;
  double b_stderr = 0.0;
  double residual = 0.0;  // RMS in log lambda
  double t_lo = 0.0, t_hi = 0.0;
  double decades = 0.0;   // log10 span of T_est - t
  bool b_fixed = false;
  bool reliable = false;  // decades >= 2
};

/// Least squares log lambda = a log(T-t) + b log|log(T-t)| + c. When
/// `fixed_b` is given only a and c are fitted. Throws InvalidArgument for
/// fewer than 4 points or t >= T_est.
RateFit fit_type2_rate(std::span<const RatePoint> trajectory, double T_est,
                       std::optional<double> fixed_b = std::nullopt);

/// Same, with the time argument given directly as s = T - t (avoids
/// cancellation when T - t is far below the resolution of t).
RateFit fit_type2_rate_remaining(std::span<const double> remaining, std::span<const double> lambda,
                                 std::optional<double> fixed_b = std::nullopt);

struct TrackingOptions {
  double tau0 = 12.0;
  double shrink = 2.0;            // run until T - t = e^{-tau0} / shrink
  double domain_radius = 4.0;
  double cells_per_lambda = 40.0; // h(0) = lambda0(tau0) / cells_per_lambda
  double growth = 1.03;
  double target_change = 5e-3;
  long max_steps = 1000000;
};

struct TrackingReport {
  RunStatus status = RunStatus::Running;
  long steps = 0;
  std::size_t nodes = 0;
  double worst_deviation = 0.0;  // sup_t sup_x |u - u_app| / sup_x |u_app|
  std::vector<double> remaining; // T - t per accepted step
  std::vector<double> lambda;    // u(0)^{-1/2}
  std::vector<HistorySample> history;
  RateFit fit;        // b fixed at -15/8
  RateFit fit_free;   // a and b both free
};

/// Evolution seeded with u_app at tau0 (remainder scheme), compared with
/// u_app along the way until T - t has shrunk by `shrink`.
TrackingReport track_uapp(std::shared_ptr<const BlowupProfile> profile, const TrackingOptions& opts = {});

}  // namespace blowup
