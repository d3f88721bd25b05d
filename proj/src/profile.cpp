#include "blowup6/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blowup6/cutoff.hpp"
#include "blowup6/errors.hpp"

namespace blowup {

RateFunctions rates_from_remaining(double s) {
  if (!(s > 0.0)) throw InvalidArgument("rate functions: need t < T");
  const double tau = -std::log(s);
  if (!(tau > 1.0)) throw InvalidArgument("rate functions: tau = -log(T-t) must exceed 1");
  RateFunctions r;
  r.tau = tau;
  r.lambda0 = std::pow(s, 1.25) * std::pow(tau, -1.875);
  r.sigma = -(1.25 + 1.875 / tau) * std::pow(s, 1.5) * std::pow(tau, -3.75);
  return r;
}

RateFunctions eval_rate_functions(double t, double T) {
  if (!(t > 0.0 && t < T)) throw InvalidArgument("eval_rate_functions: t must lie in (0, T)");
  return rates_from_remaining(T - t);
}

double log_lambda0_rate(double s) {
  const double tau = rates_from_remaining(s).tau;
  return -1.25 * (1.0 + 1.5 / tau) / s;
}

namespace {

// A(s) = lambda0'/lambda0 = sigma/lambda0^2 and its time derivative.
double rate_A(double s, double tau) { return -(1.25 + 1.875 / tau) / s; }
double rate_A_dot(double s, double tau) {
  return (1.875 / (tau * tau) - 1.25 - 1.875 / tau) / (s * s);
}

}  // namespace

BlowupProfile BlowupProfile::standard(double T) {
  const auto model = GroundStateModel::dimension_six();
  auto gamma = build_Gamma(model);
  auto t1 = std::make_shared<const CorrectorT1>(build_T1(gamma));
  return BlowupProfile(T, build_basis(6, 2.0), std::move(t1));
}

BlowupProfile::BlowupProfile(double T, HermiteBasis basis, std::shared_ptr<const CorrectorT1> corrector,
                             double inner_radius)
    : T_(T),
      model_(GroundStateModel::dimension_six()),
      basis_(std::move(basis)),
      corrector_(std::move(corrector)),
      alpha_(basis_.alpha),
      inner_radius_(inner_radius) {
  if (!(T > 0.0)) throw InvalidArgument("BlowupProfile: T must be positive");
  if (!(alpha_ > 0.0)) throw InvalidArgument("BlowupProfile: alpha must be positive");
  if (!corrector_) throw InvalidArgument("BlowupProfile: missing T1");
  if (!(inner_radius > 0.0)) throw InvalidArgument("BlowupProfile: inner radius must be positive");
}

BlowupProfile BlowupProfile::with_alpha(double alpha) const {
  if (!(alpha > 0.0)) throw InvalidArgument("with_alpha: alpha must be positive");
  BlowupProfile p = *this;
  p.alpha_ = alpha;
  return p;
}

BlowupProfile BlowupProfile::with_T1_scale(double factor) const {
  BlowupProfile p = *this;
  p.t1_scale_ = factor;
  return p;
}

namespace {

// e1(z) = c1 (|z|^2 + b0); Theta depends on x through w = (alpha/tau) e1(z).
struct ThetaParts {
  double s, tau, a, b0, w, base;
};

ThetaParts theta_parts(const HermiteBasis& basis, double alpha, double x, double s) {
  const double tau = rates_from_remaining(s).tau;
  ThetaParts p{};
  p.s = s;
  p.tau = tau;
  p.a = alpha * basis.c[1] / tau;
  p.b0 = basis.monic[1].coeff(0).to_double();
  p.w = p.a * (x * x / s + p.b0);
  p.base = 1.0 + p.w;
  if (!(p.base > 0.0))
    throw InvalidArgument("Theta: nonpositive base 1 + (alpha/tau) e1(z); tau out of range");
  return p;
}

double mu_closed_form(const HermiteBasis& basis, double alpha, double x, double s) {
  const auto p = theta_parts(basis, alpha, x, s);
  const double c1 = basis.c[1];
  const double z2 = x * x / s;
  const double e1 = c1 * (z2 + p.b0);
  const double grad2 = 4.0 * c1 * c1 * z2;
  const double inv = 1.0 / p.base;
  const double pref = 1.0 / (s * s * p.tau * p.tau);
  return pref * (alpha * inv * inv * e1 - 2.0 * alpha * alpha * inv * inv * inv * grad2);
}

}  // namespace

double BlowupProfile::theta(double x, double s) const {
  const auto p = theta_parts(basis_, alpha_, x, s);
  return 1.0 / (s * p.base);
}

double BlowupProfile::theta_dx(double x, double s) const {
  const auto p = theta_parts(basis_, alpha_, x, s);
  const double wx = 2.0 * p.a * x / s;
  return -wx / (s * p.base * p.base);
}

double BlowupProfile::theta_laplacian(double x, double s) const {
  const auto p = theta_parts(basis_, alpha_, x, s);
  const double wx = 2.0 * p.a * x / s;
  const double lap_w = 2.0 * model_.n * p.a / s;
  const double inv = 1.0 / p.base;
  return (2.0 * inv * inv * inv * wx * wx - inv * inv * lap_w) / s;
}

double BlowupProfile::theta_dt(double x, double s) const {
  const auto p = theta_parts(basis_, alpha_, x, s);
  const double ac = alpha_ * basis_.c[1];
  const double z2 = x * x / s;
  const double wt = ac * (z2 / (s * p.tau) - (z2 + p.b0) / (p.tau * p.tau * s));
  const double inv = 1.0 / p.base;
  return inv / (s * s) - inv * inv * wt / s;
}

double BlowupProfile::theta_residual_mu(double x, double s) const {
  return mu_closed_form(basis_, alpha_, x, s);
}

double BlowupProfile::barrier_residual(double x, double s) const {
  return mu_closed_form(basis_, 0.5 * alpha_, x, s);
}

double BlowupProfile::barrier_zero_z(double tau) const {
  const double c1 = basis_.c[1];
  const double qa = alpha_ / (2.0 * tau);
  const double qb = 1.0 - 4.0 * alpha_ * c1;
  const double qc = -8.0 * model_.n * alpha_ * c1 * c1;
  const double e = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
  const double z2 = e / c1 - basis_.monic[1].coeff(0).to_double();
  if (!(z2 > 0.0)) throw NumericalError("barrier_zero_z: no positive root");
  return std::sqrt(z2);
}

Cutoffs BlowupProfile::cutoffs(double x, double s) const {
  const auto r = rates_from_remaining(s);
  Cutoffs c;
  c.chi1 = eta(r.tau * x / std::sqrt(s));
  c.chi2 = 1.0 - c.chi1;
  c.chi_in = eta(x / r.lambda0 / inner_radius_);
  return c;
}

UappTerms BlowupProfile::terms(double x, double s) const {
  const auto r = rates_from_remaining(s);
  UappTerms u;
  u.y = x / r.lambda0;
  u.z = x / std::sqrt(s);
  u.chi1 = eta(r.tau * u.z);
  u.theta = theta(x, s);
  u.Q_term = model_.Q(x, r.lambda0);
  u.T1_term = rate_A(s, r.tau) * T1(u.y) * u.chi1;
  u.theta_term = -u.theta * (1.0 - u.chi1);
  return u;
}

double BlowupProfile::u_app_dx(double x, double s) const {
  const auto r = rates_from_remaining(s);
  const double lam = r.lambda0;
  const double y = x / lam;
  const double k = r.tau / std::sqrt(s);
  const double chi = eta(k * x), dchi = k * eta_prime(k * x);
  const double A = rate_A(s, r.tau);
  return model_.dQ(x, lam) + A * (dT1(y) / lam * chi + T1(y) * dchi) -
         (theta_dx(x, s) * (1.0 - chi) - theta(x, s) * dchi);
}

double BlowupProfile::pde_residual(double x, double s) const {
  const auto r = rates_from_remaining(s);
  const double tau = r.tau, lam = r.lambda0;
  const double A = rate_A(s, tau), Ad = rate_A_dot(s, tau);
  const double y = x / lam;
  const double Q = model_.Q(x, lam);
  const double LQ = model_.LambdaQ(y);

  const double k = tau / std::sqrt(s);
  const double xi = k * x;
  const double chi = eta(xi), dchi = k * eta_prime(xi), d2chi = k * k * eta_second(xi);
  const double lap_chi = x > 0.0 ? d2chi + (model_.n - 1) * dchi / x : model_.n * d2chi;
  const double chi_t = eta_prime(xi) * xi * (1.0 / tau + 0.5) / s;

  const double t1 = T1(y), dt1 = dT1(y);
  const double th = theta(x, s), thx = theta_dx(x, s), th_lap = theta_laplacian(x, s), tht = theta_dt(x, s);

  const double W = A * t1 * chi - th * (1.0 - chi);
  const double u = Q + W;
  const double W_t = Ad * t1 * chi - A * A * y * dt1 * chi + A * t1 * chi_t - tht * (1.0 - chi) + th * chi_t;
  // Delta W without the A chi lambda^-2 (-Lambda Q - V T1) piece, which is folded in below.
  const double rest = A * (2.0 * dt1 / lam * dchi + t1 * lap_chi) -
                      (th_lap * (1.0 - chi) - 2.0 * thx * dchi - th * lap_chi);
  const double unbalanced = -A * LQ * (1.0 - chi) / (lam * lam);
  double reaction;
  if (u >= 0.0)
    reaction = 2.0 * Q * th * (1.0 - chi) - W * W;
  else
    reaction = 2.0 * A * chi * Q * t1 + Q * Q + u * u;
  return unbalanced + reaction + W_t - rest;
}

double fd_heat_residual(const std::function<double(double, double)>& f, double x, double s, double hx,
                        double hs) {
  if (!(hx > 0.0 && hs > 0.0 && hs < s)) throw InvalidArgument("fd_heat_residual: bad steps");
  auto F = [&](double xx) { return f(std::abs(xx), s); };
  const double fm2 = F(x - 2 * hx), fm1 = F(x - hx), f0 = F(x), fp1 = F(x + hx), fp2 = F(x + 2 * hx);
  const double d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * hx * hx);
  double lap;
  if (x == 0.0) {
    lap = 6.0 * d2;
  } else {
    const double d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * hx);
    lap = d2 + 5.0 / x * d1;
  }
  auto D = [&](double h) { return (f(x, s + h) - f(x, s - h)) / (2 * h); };
  const double ds = (4.0 * D(0.5 * hs) - D(hs)) / 3.0;
  return -ds - lap - std::abs(f0) * f0;
}

std::string region_name(Region r) { return r == Region::Inner ? "inner" : "selfsimilar"; }

ResidualField pde_residual(const BlowupProfile& profile, const ResidualSampleSpec& spec) {
  ResidualField field;
  auto uapp = [&profile](double x, double s) { return profile.u_app(x, s); };
  for (double tau : spec.taus) {
    if (!(tau >= 10.0 && tau <= 45.0)) throw InvalidArgument("pde_residual: tau outside [10, 45]");
    const double s = std::exp(-tau);
    const auto r = rates_from_remaining(s);
    for (double y : spec.inner_y) {
      ResidualSample smp;
      smp.s = s;
      smp.tau = tau;
      smp.x = y * r.lambda0;
      smp.region = Region::Inner;
      smp.residual = profile.pde_residual(smp.x, s);
      smp.normalized = smp.residual * s * s;
      smp.fd_residual = std::numeric_limits<double>::quiet_NaN();
      field.max_inner_normalized = std::max(field.max_inner_normalized, std::abs(smp.normalized));
      field.samples.push_back(smp);
    }
    for (double z : spec.selfsimilar_z) {
      ResidualSample smp;
      smp.s = s;
      smp.tau = tau;
      smp.x = z * std::sqrt(s);
      smp.region = Region::Selfsimilar;
      smp.residual = profile.pde_residual(smp.x, s);
      smp.normalized = smp.residual * s * s * tau * tau;
      smp.fd_residual = fd_heat_residual(uapp, smp.x, s, 2e-3 * std::sqrt(s), 1e-3 * s);
      smp.fd_rel_gap = std::abs(smp.fd_residual - smp.residual) / std::abs(smp.residual);
      field.max_selfsimilar_normalized = std::max(field.max_selfsimilar_normalized, std::abs(smp.normalized));
      field.max_fd_gap = std::max(field.max_fd_gap, smp.fd_rel_gap);
      field.samples.push_back(smp);
    }
  }
  if (!spec.taus.empty()) field.fd_observed_order = fd_convergence_order(profile, 1.0, spec.taus.front());
  for (const auto& smp : field.samples)
    if (!std::isfinite(smp.residual)) throw NumericalError("pde_residual: non-finite residual");
  return field;
}

double fd_convergence_order(const BlowupProfile& profile, double z, double tau) {
  const double s = std::exp(-tau);
  const double x = z * std::sqrt(s);
  const double exact = profile.theta_laplacian(x, s);
  auto lap = [&](double h) {
    auto F = [&](double xx) { return profile.theta(std::abs(xx), s); };
    const double d2 = (-F(x - 2 * h) + 16 * F(x - h) - 30 * F(x) + 16 * F(x + h) - F(x + 2 * h)) / (12 * h * h);
    const double d1 = (F(x - 2 * h) - 8 * F(x - h) + 8 * F(x + h) - F(x + 2 * h)) / (12 * h);
    return d2 + 5.0 / x * d1;
  };
  const double h = 0.1 * x;
  const double e1 = std::abs(lap(h) - exact), e2 = std::abs(lap(0.5 * h) - exact);
  return std::log2(e1 / e2);
}

MatchingReport matching_residual(const BlowupProfile& profile, std::span<const double> taus,
                                 std::span<const double> deltas) {
  MatchingReport rep;
  rep.leading_coefficient = profile.T1_limit() * 1.25;
  rep.shrinking = true;
  for (double delta : deltas) {
    double prev = std::numeric_limits<double>::infinity();
    for (double tau : taus) {
      if (!(tau >= 10.0)) throw InvalidArgument("matching_residual: tau must be >= 10");
      const double s = std::exp(-tau);
      const auto r = rates_from_remaining(s);
      MatchingRow row;
      row.tau = tau;
      row.delta = delta;
      row.x = std::pow(s, 0.5 + delta);
      row.inner = profile.model().Q(row.x, r.lambda0) +
                  r.sigma / (r.lambda0 * r.lambda0) * profile.T1(row.x / r.lambda0);
      row.outer = -profile.theta(row.x, s);
      row.mismatch = std::abs(row.inner - row.outer) / std::abs(row.outer);
      if (!(row.mismatch < prev)) rep.shrinking = false;
      prev = row.mismatch;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace blowup
