#include <cmath>
#include <random>
#include <sstream>

#include "blowup6/cli.hpp"
#include "blowup6/ground_state.hpp"
#include "blowup6/profile.hpp"
#include "blowup6/selfsimilar_basis.hpp"
#include "blowup6/spectral_solver.hpp"

namespace blowup::cli {

namespace {

CheckResult make(std::string name, double value, double tol, std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tol;
  c.passed = std::isfinite(value) && value <= tol;
  c.detail = std::move(detail);
  return c;
}

std::string str(double v) { return format_double(v); }

}  // namespace

std::vector<CheckResult> run_verify_suite(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const auto model = GroundStateModel::dimension_six();

  // (Lambda Q)^2 integral, after removing the bubble normalization.
  const auto ig = integral_LambdaQ_squared(model);
  out.push_back(make("lambdaq_integral_reduced", std::abs(ig.reduced - 2.0 / 15.0) / (2.0 / 15.0), 1e-8,
                     "reduced " + str(ig.reduced) + ", raw " + str(ig.raw) + ", normalization " + str(ig.normalization)));
  const Rational exact = reduced_integral_partial_fractions(model);
  out.push_back(make("lambdaq_integral_exact", exact == Rational(2, 15) ? 0.0 : 1.0, 0.0,
                     "partial fractions give " + str(exact.to_double())));

  // Second solution and corrector.
  GammaGridSpec gs;
  gs.nodes = cfg.verify.gamma_nodes;
  const auto gamma = build_Gamma(model, 6.0, gs);
  double wdev = 0.0;
  for (double r : gamma.gamma.grid())
    if (r >= 0.1 && r <= 50.0) wdev = std::max(wdev, std::abs(gamma.wronskian(r) - 1.0));
  out.push_back(make("wronskian", wdev, 1e-6, "max |W r^5 - 1| on [0.1, 50]"));

  const auto t1 = build_T1(gamma, 1.0);
  out.push_back(make("t1_limit", std::abs(t1.limit - 0.8) / 0.8, 1e-8, "limit " + str(t1.limit)));
  out.push_back(make("t1_routes", t1.max_route_deviation, 1e-4, "variation of parameters vs finite volume"));
  double tail = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double r = 10.0 + 0.1 * k;
    tail = std::max(tail, std::abs(t1.value(r) - 0.8) * r * r);
  }
  out.push_back(make("t1_tail_bounded", tail, 2.0 * std::abs(t1.tail_coefficient),
                     "max |T1 - 4/5| r^2 on [10, 50]; tail coefficient " + str(t1.tail_coefficient)));

  // Self-similar basis.
  const auto basis = build_basis();
  for (int i = 0; i < 3; ++i) {
    const bool exact_ok = apply_Az(basis.n, basis.monic[i]) == Rational(-i) * basis.monic[i];
    out.push_back(make("az_eigen_e" + std::to_string(i), exact_ok ? 0.0 : 1.0, 0.0, "exact rational arithmetic"));
  }
  const double c1 = basis.c[1];
  const auto mom = cubic_moments(basis, 1e300);
  out.push_back(make("rho_e1_cubed", std::abs(mom.e1_cubed - 8.0 * c1) / (8.0 * c1), 1e-8, "(e1^2, e1) vs 8 c1"));
  out.push_back(make("rho_grad_e1_sq_e1", std::abs(mom.grad_e1_sq_e1 - 4.0 * c1) / (4.0 * c1), 1e-8,
                     "(|grad e1|^2, e1) vs 4 c1"));

  const double alpha = basis.alpha * cfg.verify.alpha_scale;
  out.push_back(make("alpha_identity", std::abs(alpha - 2.0 * alpha * alpha * mom.grad_e1_sq_e1) / alpha, 1e-10,
                     "alpha - 2 alpha^2 (|grad e1|^2, e1), alpha = " + str(alpha)));
  out.push_back(make("alpha_c1", std::abs(alpha * c1 - 0.125) / 0.125, 1e-10, "alpha c1 vs 1/8"));

  // Closed-form Theta residual against brute finite differences.
  const auto base_profile = BlowupProfile::standard(cfg.T);
  const auto profile = cfg.verify.alpha_scale == 1.0 ? base_profile : base_profile.with_alpha(alpha);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> zdist(0.0, 5.0), tdist(10.0, 40.0);
  double worst_mu = 0.0;
  for (int k = 0; k < cfg.verify.samples; ++k) {
    double z = zdist(rng);
    if (z < 1e-3) z = 1e-3;
    const double tau = tdist(rng);
    const double s = std::exp(-tau);
    const double x = z * std::sqrt(s);
    const double mu = profile.theta_residual_mu(x, s);
    const double fd = fd_heat_residual([&](double xx, double ss) { return profile.theta(xx, ss); }, x, s,
                                       1e-3 * std::sqrt(s), 1e-3 * s);
    // Floor the denominator near zeros of mu at 1% of its natural scale.
    const double scale = std::max(std::abs(mu), 1e-2 * alpha / (s * s * tau * tau));
    worst_mu = std::max(worst_mu, std::abs(fd - mu) / scale);
  }
  out.push_back(make("theta_residual_closed_form", worst_mu, cfg.tol,
                     std::to_string(cfg.verify.samples) + " samples, z in (0, 5), tau in (10, 40)"));

  double worst_rate = 0.0;
  for (int k = 0; k < cfg.verify.samples; ++k) {
    const double tau = tdist(rng);
    const double s = std::exp(-tau);
    const double h = 1e-4;
    const double fd = -(std::log(rates_from_remaining(s * (1 + h)).lambda0) -
                        std::log(rates_from_remaining(s * (1 - h)).lambda0)) / (2.0 * h * s);
    const double formula = -1.25 * (1.0 + 1.5 / tau) / s;
    worst_rate = std::max({worst_rate, std::abs(fd - formula) / std::abs(formula),
                           std::abs(log_lambda0_rate(s) - formula) / std::abs(formula)});
  }
  out.push_back(make("rate_ode", worst_rate, cfg.tol, "d log(lambda0)/dt vs -(5/4)(1 + 3/(2 tau))/(T - t)"));

  double worst_barrier = 0.0;
  for (double tau : {12.0, 20.0, 30.0, 40.0}) {
    const double s = std::exp(-tau);
    const double x = profile.barrier_zero_z(tau) * std::sqrt(s);
    worst_barrier = std::max(worst_barrier, std::abs(profile.barrier_residual(x, s)) * s * s * tau * tau / alpha);
  }
  out.push_back(make("barrier_identity", worst_barrier, 1e-10, "barrier residual at its zero, scaled"));

  const auto e1 = solve_dirichlet_eigen(10.0, 1);
  auto neg = make("mu1_negative", e1.residual, 1e-6, "mu1(R=10) = " + str(e1.mu));
  neg.passed = neg.passed && e1.mu < 0.0;
  out.push_back(neg);
  return out;
}

}  // namespace blowup::cli
