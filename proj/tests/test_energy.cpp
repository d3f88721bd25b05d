#include <doctest.h>

#include <cmath>
#include <vector>

#include "blowup6/energy.hpp"
#include "blowup6/errors.hpp"
#include "blowup6/ground_state.hpp"

using namespace blowup;

namespace {

const BlowupProfile& prof() {
  static const BlowupProfile p = BlowupProfile::standard(1.0);
  return p;
}

}  // namespace

TEST_CASE("zero data has zero energy") {
  std::vector<double> s{0.0};
  auto e = local_energy([](double) { return 0.0; }, [](double) { return 0.0; }, s);
  CHECK(e.grad_term == 0.0);
  CHECK(e.cubic_term == 0.0);
  CHECK(e.e_loc == 0.0);
}

TEST_CASE("concentrated bubble: E_loc -> E(Q) = 38.4 pi^3") {
  // int Q^3 r^5 dr = 6912 B(3, 3) = 230.4 and |grad Q|^2 integrates to the same.
  const double EQ = 38.4 * std::pow(M_PI, 3);
  const auto e = local_energy_Q(1e-3);
  CHECK(e.e_loc == doctest::Approx(EQ).epsilon(1e-6));
  CHECK(e.grad_term == doctest::Approx(115.2 * std::pow(M_PI, 3)).epsilon(1e-6));
  CHECK(e.e_loc == e.grad_term - e.cubic_term);
}

TEST_CASE("unit-scale bubble: E_loc(Q) on the unit ball is negative") {
  // At lambda = 1 the unit ball holds almost no gradient; the sign flips once the bubble fits inside.
  CHECK(local_energy_Q(1.0).e_loc < 0.0);
  CHECK(local_energy_Q(0.1).e_loc > 0.0);
}

TEST_CASE("grid overload agrees with the closed form") {
  const auto m = GroundStateModel::dimension_six();
  const double lam = 0.2;
  std::vector<double> r, v, d;
  for (int i = 0; i <= 4000; ++i) {
    const double x = 1.2 * i / 4000.0;
    r.push_back(x);
    v.push_back(m.Q(x, lam));
    d.push_back(m.dQ(x, lam));
  }
  const auto exact = local_energy_Q(lam);
  const auto with_d = local_energy(RadialFunction(r, v, d));
  CHECK(with_d.e_loc == doctest::Approx(exact.e_loc).epsilon(1e-8));
  const auto est = local_energy(RadialFunction(r, v));
  CHECK(est.e_loc == doctest::Approx(exact.e_loc).epsilon(1e-4));
  CHECK_THROWS_AS(local_energy(RadialFunction({0.0, 0.5, 0.9}, {1.0, 1.0, 1.0})), InvalidArgument);
}

TEST_CASE("E_loc(u_app) decreases and turns negative") {
  std::vector<double> e;
  std::vector<double> taus{15.0, 20.0, 25.0, 30.0, 35.0};
  for (double tau : taus) {
    const auto rep = local_energy_uapp(prof(), tau);
    CHECK(rep.grad_term >= 0.0);
    CHECK(rep.cubic_term >= 0.0);
    e.push_back(rep.e_loc);
  }
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] < e[i - 1]);
  CHECK(e[2] < 0.0);
  // |E_loc| outgrows tau^2 log tau.
  const auto g = [](double t) { return t * t * std::log(t); };
  CHECK(std::abs(e.back()) / g(35.0) > 2.0 * std::abs(e.front()) / g(15.0));
}

TEST_CASE("quadrature converged: tightening the tolerance moves nothing") {
  EnergyQuadrature loose, tight;
  loose.rel_tol = 1e-9;
  tight.rel_tol = 1e-12;
  const auto a = local_energy_uapp(prof(), 25.0, loose);
  const auto b = local_energy_uapp(prof(), 25.0, tight);
  CHECK(a.grad_term == doctest::Approx(b.grad_term).epsilon(1e-6));
  CHECK(a.cubic_term == doctest::Approx(b.cubic_term).epsilon(1e-6));
}

TEST_CASE("Theta scaling integrals") {
  std::vector<ThetaIntegrals> v;
  for (double tau : {50.0, 100.0, 200.0}) v.push_back(theta_scaling_integrals(prof().basis(), tau));
  double lo = 1e300, hi = 0.0, glo = 1e300, ghi = 0.0;
  for (const auto& t : v) {
    CHECK(t.I3 > t.I3_floor);
    lo = std::min(lo, t.I3_ratio());
    hi = std::max(hi, t.I3_ratio());
    const double g3 = t.Igrad / std::pow(t.tau, 3);
    glo = std::min(glo, g3);
    ghi = std::max(ghi, g3);
  }
  CHECK(hi / lo <= 2.0);
  // The gradient integral runs out to |z| = e^{tau/2}: it grows like tau^3, so it is tau^3 that is banded.
  CHECK(ghi / glo <= 1.25);
  CHECK(v.back().Igrad_ratio() > 2.0 * v.front().Igrad_ratio());
  CHECK_THROWS_AS(theta_scaling_integrals(prof().basis(), 5.0), InvalidArgument);
}
