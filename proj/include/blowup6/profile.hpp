#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "blowup6/ground_state.hpp"
#include "blowup6/selfsimilar_basis.hpp"

namespace blowup {

// Time enters through s = T - t > 0 throughout: near blowup t itself is not
// representable (T - e^{-40} == T in double precision).

struct RateFunctions {
  double lambda0 = 0.0;  // (T-t)^{5/4} tau^{-15/8}
  double sigma = 0.0;    // -(5/4 + 15/(8 tau)) (T-t)^{3/2} tau^{-15/4}
  double tau = 0.0;      // -log(T-t)
};

/// Throws InvalidArgument unless 0 < t < T and tau > 1.
RateFunctions eval_rate_functions(double t, double T);
RateFunctions rates_from_remaining(double s);

/// d log(lambda0)/dt = -(5/4)(1 + 3/(2 tau))/(T-t).
double log_lambda0_rate(double s);

struct Cutoffs {
  double chi1 = 0.0;   // eta(tau |z|)
  double chi2 = 0.0;   // 1 - chi1
  double chi_in = 0.0; // eta(|y| / R_in)
};

/// Pieces of u_app at one point, kept apart for output and diagnostics.
struct UappTerms {
  double Q_term = 0.0;      // Q_lambda0(x)
  double T1_term = 0.0;     // -((5/4 + 15/(8 tau))/(T-t)) T1(y) chi1
  double theta_term = 0.0;  // -Theta (1 - chi1)
  double theta = 0.0;
  double chi1 = 0.0;
  double z = 0.0;
  double y = 0.0;
  [[nodiscard]] double value() const { return Q_term + T1_term + theta_term; }
};

class BlowupProfile {
 public:
  /// Builds the Hermite basis and T1 from scratch.
  static BlowupProfile standard(double T = 1.0);

  BlowupProfile(double T, HermiteBasis basis, std::shared_ptr<const CorrectorT1> corrector,
                double inner_radius = 20.0);

  [[nodiscard]] double T() const { return T_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] const HermiteBasis& basis() const { return basis_; }
  [[nodiscard]] const CorrectorT1& corrector() const { return *corrector_; }
  [[nodiscard]] const GroundStateModel& model() const { return model_; }

  /// Copy with alpha replaced (sensitivity controls).
  [[nodiscard]] BlowupProfile with_alpha(double alpha) const;
  /// Copy whose T1 is multiplied by `factor` (matching sensitivity control).
  [[nodiscard]] BlowupProfile with_T1_scale(double factor) const;

  /// T1 and dT1/dy as used by u_app (including any sensitivity scale).
  [[nodiscard]] double T1(double y) const { return t1_scale_ * corrector_->value(y); }
  [[nodiscard]] double dT1(double y) const { return t1_scale_ * corrector_->derivative(y); }
  [[nodiscard]] double T1_limit() const { return t1_scale_ * corrector_->limit; }

  /// Theta = (T-t)^{-1} (1 + (alpha/tau) e1(z))^{-1}; InvalidArgument on a nonpositive base.
  [[nodiscard]] double theta(double x, double s) const;
  [[nodiscard]] double theta_dx(double x, double s) const;
  [[nodiscard]] double theta_laplacian(double x, double s) const;
  [[nodiscard]] double theta_dt(double x, double s) const;
  /// Closed-form residual mu = d_t Theta - Delta Theta - Theta^2.
  [[nodiscard]] double theta_residual_mu(double x, double s) const;
  /// Residual of the barrier profile with alpha/2 in place of alpha.
  [[nodiscard]] double barrier_residual(double x, double s) const;
  /// The positive root |z| of e1 (1 + (alpha/2tau) e1 - 4 alpha c1) = 8 n alpha c1^2.
  [[nodiscard]] double barrier_zero_z(double tau) const;

  [[nodiscard]] Cutoffs cutoffs(double x, double s) const;
  [[nodiscard]] UappTerms terms(double x, double s) const;
  [[nodiscard]] double u_app(double x, double s) const { return terms(x, s).value(); }
  /// d/dx u_app, by the chain rule through every piece.
  [[nodiscard]] double u_app_dx(double x, double s) const;

  /// d_t u_app - Delta u_app - |u_app| u_app. The identities Delta Q + Q^2 = 0 and
  /// H_y T1 = -Lambda Q are applied symbolically; everything else is analytic.
  [[nodiscard]] double pde_residual(double x, double s) const;

  // Wrappers in the (x, t) convention.
  [[nodiscard]] double theta_at(double x, double t) const { return theta(x, T_ - t); }
  [[nodiscard]] double u_app_at(double x, double t) const { return u_app(x, T_ - t); }

 private:
  double T_ = 1.0;
  GroundStateModel model_;
  HermiteBasis basis_;
  std::shared_ptr<const CorrectorT1> corrector_;
  double alpha_ = 0.0;
  double inner_radius_ = 20.0;
  double t1_scale_ = 1.0;

};

/// Generic finite-difference heat residual f_t - Delta f - |f| f of a radial
/// function f(x, s), s = T - t: 4th-order central differences in x (even
/// reflection across the origin) and Richardson-extrapolated central
/// differences in t. Steps are absolute.
double fd_heat_residual(const std::function<double(double, double)>& f, double x, double s, double hx,
                        double hs);

enum class Region { Inner, Selfsimilar };
std::string region_name(Region r);

struct ResidualSample {
  double s = 0.0;
  double tau = 0.0;
  double x = 0.0;
  Region region = Region::Inner;
  double residual = 0.0;
  double normalized = 0.0;  // inner: / (d/dt of the sigma/lambda^2 scale); selfsimilar: * (T-t)^2 tau^2
  double fd_residual = 0.0;   // brute-force FD value (selfsimilar only; NaN in the inner region)
  double fd_rel_gap = 0.0;    // |fd - residual| / |residual|
};

struct ResidualSampleSpec {
  std::vector<double> taus{15.0, 25.0, 35.0};
  std::vector<double> inner_y{0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  std::vector<double> selfsimilar_z{0.5, 1.0, 2.0, 3.0, 5.0};
};

struct ResidualField {
  std::vector<ResidualSample> samples;
  double max_inner_normalized = 0.0;
  double max_selfsimilar_normalized = 0.0;
  double max_fd_gap = 0.0;  // worst FD vs reduced disagreement, selfsimilar samples
  double fd_observed_order = 0.0;  // x-stencil order from step doubling
};

ResidualField pde_residual(const BlowupProfile& profile, const ResidualSampleSpec& spec = {});

/// FD step-doubling order of the x-stencil on Theta at (z, tau).
double fd_convergence_order(const BlowupProfile& profile, double z, double tau);

struct MatchingRow {
  double tau = 0.0;
  double delta = 0.0;
  double x = 0.0;
  double inner = 0.0;  // Q_lambda0 + (sigma/lambda0^2) T1(y)
  double outer = 0.0;  // -Theta
  double mismatch = 0.0;  // |inner - outer| / |outer|
};

struct MatchingReport {
  std::vector<MatchingRow> rows;
  bool shrinking = false;          // mismatch strictly decreasing in tau for each delta
  double leading_coefficient = 0.0;  // T1(inf) * 5/4
};

MatchingReport matching_residual(const BlowupProfile& profile, std::span<const double> taus,
                                 std::span<const double> deltas = std::vector<double>{0.1, 0.2});

}  // namespace blowup
