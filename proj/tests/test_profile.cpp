#include <doctest.h>

#include <cmath>
#include <random>

#include "blowup6/errors.hpp"
#include "blowup6/profile.hpp"

using namespace blowup;

namespace {

const BlowupProfile& prof() {
  static const BlowupProfile p = BlowupProfile::standard(1.0);
  return p;
}

}  // namespace

TEST_CASE("rate functions") {
  const double tau = 20.0, s = std::exp(-tau);
  const auto r = rates_from_remaining(s);
  CHECK(r.tau == doctest::Approx(tau));
  CHECK(r.lambda0 == doctest::Approx(std::pow(s, 1.25) * std::pow(tau, -1.875)).epsilon(1e-14));
  // sigma = lambda0 * d(lambda0)/dt.
  const double h = 1e-5;
  const double dl = -(rates_from_remaining(s * (1 + h)).lambda0 - rates_from_remaining(s * (1 - h)).lambda0) / (2 * h * s);
  CHECK(r.sigma == doctest::Approx(r.lambda0 * dl).epsilon(1e-8));
  CHECK(log_lambda0_rate(s) == doctest::Approx(-1.25 * (1 + 1.5 / tau) / s).epsilon(1e-14));
  const auto t = eval_rate_functions(1.0 - std::exp(-3.0), 1.0);
  CHECK(t.tau == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(rates_from_remaining(0.0), InvalidArgument);
  CHECK_THROWS_AS(rates_from_remaining(0.5), InvalidArgument);
  CHECK_THROWS_AS(eval_rate_functions(1.0, 1.0), InvalidArgument);
}

TEST_CASE("closed-form Theta residual matches finite differences") {
  const auto& p = prof();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> zd(0.05, 5.0), td(10.0, 40.0);
  for (int k = 0; k < 40; ++k) {
    const double z = zd(rng), tau = td(rng), s = std::exp(-tau), x = z * std::sqrt(s);
    const double mu = p.theta_residual_mu(x, s);
    const double fd = fd_heat_residual([&](double xx, double ss) { return p.theta(xx, ss); }, x, s,
                                       1e-3 * std::sqrt(s), 1e-3 * s);
    const double scale = std::max(std::abs(mu), 1e-2 * p.alpha() / (s * s * tau * tau));
    CHECK(std::abs(fd - mu) / scale < 1e-6);
  }
}

TEST_CASE("barrier residual vanishes at its computed zero") {
  const auto& p = prof();
  for (double tau : {12.0, 25.0, 40.0}) {
    const double s = std::exp(-tau);
    const double z0 = p.barrier_zero_z(tau);
    const double scale = p.alpha() / (s * s * tau * tau);
    CHECK(std::abs(p.barrier_residual(z0 * std::sqrt(s), s)) / scale < 1e-10);
    CHECK(std::abs(p.barrier_residual(1.1 * z0 * std::sqrt(s), s)) / scale > 1e-4);
  }
}

TEST_CASE("u_app: rate band and sign structure") {
  const auto& p = prof();
  for (double tau : {15.0, 25.0, 35.0}) {
    const double s = std::exp(-tau);
    const double scaled = p.u_app(0.0, s) * std::pow(s, 2.5) * std::pow(tau, -3.75);
    CHECK(scaled == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p.u_app(0.0, s) > 0.0);
    CHECK(p.u_app(std::sqrt(s), s) < 0.0);
  }
}

TEST_CASE("analytic gradient of u_app matches central differences") {
  const auto& p = prof();
  for (double tau : {15.0, 30.0}) {
    const double s = std::exp(-tau);
    const double lam = rates_from_remaining(s).lambda0;
    for (double x : {0.5 * lam, 3.0 * lam, 30.0 * lam, 0.5 * std::sqrt(s) / tau, 1.5 * std::sqrt(s) / tau,
                     0.3 * std::sqrt(s), 2.0 * std::sqrt(s), 0.2}) {
      const double h = 1e-5 * x;
      const double fd = (p.u_app(x + h, s) - p.u_app(x - h, s)) / (2 * h);
      const double an = p.u_app_dx(x, s);
      CHECK(an == doctest::Approx(fd).epsilon(1e-5).scale(1e-6 * std::abs(p.u_app(x, s)) / x));
    }
  }
}

TEST_CASE("PDE residual field: sizes and FD agreement") {
  const auto field = pde_residual(prof());
  CHECK(field.max_inner_normalized < 5.0);
  CHECK(field.max_selfsimilar_normalized < 5.0);
  CHECK(field.max_fd_gap < 1e-5);
  CHECK(field.fd_observed_order == doctest::Approx(4.0).epsilon(0.05));
  bool inner = false, ss = false;
  for (const auto& smp : field.samples) {
    inner = inner || smp.region == Region::Inner;
    ss = ss || smp.region == Region::Selfsimilar;
  }
  CHECK(inner);
  CHECK(ss);
}

TEST_CASE("matching: mismatch shrinks with tau; a wrong T1 does not match") {
  const std::vector<double> taus{15.0, 25.0, 35.0, 45.0};
  const auto good = matching_residual(prof(), taus);
  CHECK(good.shrinking);
  CHECK(good.leading_coefficient == doctest::Approx(1.0).epsilon(1e-8));
  double worst_good = 0.0;
  for (const auto& r : good.rows)
    if (r.tau == 45.0) worst_good = std::max(worst_good, r.mismatch);
  const auto bad = matching_residual(prof().with_T1_scale(0.9), taus);
  double best_bad = 1e300;
  for (const auto& r : bad.rows)
    if (r.tau == 45.0) best_bad = std::min(best_bad, r.mismatch);
  CHECK(best_bad > 10.0 * worst_good);
}

TEST_CASE("Theta positivity guard") {
  // 1 + (alpha/tau) e1(0) < 0 once alpha > tau / (12 c1), about 309 at tau = 12.
  const auto p = prof().with_alpha(400.0);
  CHECK_THROWS_AS((void)p.theta(0.0, std::exp(-12.0)), InvalidArgument);
}
