#include <doctest.h>

#include <cmath>
#include <functional>

#include "blowup6/errors.hpp"
#include "blowup6/ground_state.hpp"

using namespace blowup;

namespace {

// Composite Simpson on [a, b]; independent of the adaptive quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

const SecondSolution& gamma6() {
  static const SecondSolution g = build_Gamma(GroundStateModel::dimension_six());
  return g;
}

const CorrectorT1& t1() {
  static const CorrectorT1 t = build_T1(gamma6());
  return t;
}

}  // namespace

TEST_CASE("Q solves Delta Q + Q^2 = 0") {
  const auto m = GroundStateModel::dimension_six();
  for (double r : {0.3, 1.0, 4.0, 10.0, 30.0}) {
    const double h = 1e-3 * std::max(1.0, r);
    const double d2 = (m.Q(r + h) - 2 * m.Q(r) + m.Q(r - h)) / (h * h);
    const double d1 = (m.Q(r + h) - m.Q(r - h)) / (2 * h);
    const double res = d2 + 5.0 / r * d1 + m.Q(r) * m.Q(r);
    CHECK(std::abs(res) <= 1e-5 * std::abs(d2) + 1e-12);
    CHECK(m.dQ(r) == doctest::Approx(d1).epsilon(1e-6));
  }
}

TEST_CASE("Lambda Q is minus the scaling derivative and vanishes at sqrt(24)") {
  const auto m = GroundStateModel::dimension_six();
  for (double r : {0.0, 0.5, 2.0, 7.0, 25.0}) {
    const double h = 1e-5;
    const double dlam = (m.Q(r, 1 + h) - m.Q(r, 1 - h)) / (2 * h);
    CHECK(m.LambdaQ(r) == doctest::Approx(-dlam).epsilon(1e-8));
  }
  CHECK(m.LambdaQ_zero() == doctest::Approx(std::sqrt(24.0)).epsilon(1e-12));
  CHECK(std::abs(m.LambdaQ(std::sqrt(24.0))) < 1e-14);
  CHECK(m.V(3.0) == doctest::Approx(2.0 * m.Q(3.0)));
}

TEST_CASE("integral of (Lambda Q)^2 r^5 against Simpson on an algebraic map") {
  const auto m = GroundStateModel::dimension_six();
  // r = sqrt(24) tan(theta): integrand becomes smooth on [0, pi/2).
  auto f = [&](double th) {
    if (th >= M_PI / 2) return 0.0;
    const double r = std::sqrt(24.0) * std::tan(th);
    const double l = m.LambdaQ(r);
    const double c = std::cos(th);
    return l * l * std::pow(r, 5) * std::sqrt(24.0) / (c * c);
  };
  const double oracle = simpson(f, 0.0, M_PI / 2, 20000);
  const auto ig = integral_LambdaQ_squared(m);
  CHECK(oracle == doctest::Approx(18432.0 / 5.0).epsilon(1e-9));
  CHECK(ig.raw == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(ig.reduced == doctest::Approx(2.0 / 15.0).epsilon(1e-10));
  CHECK(ig.normalization == doctest::Approx(27648.0));
  CHECK(reduced_integral_partial_fractions(m) == Rational(2, 15));
}

TEST_CASE("Gamma: Wronskian, origin singularity, far-field constant") {
  const auto& g = gamma6();
  for (double r : g.gamma.grid())
    if (r >= 0.1 && r <= 50.0) REQUIRE(std::abs(g.wronskian(r) - 1.0) <= 1e-6);
  CHECK(g.tail_constant == doctest::Approx(-1.0 / 4608.0).epsilon(1e-14));
  // (Gamma' Lambda Q) r^5 = 1 with Gamma ~ a r^{-4}, Lambda Q(0) = 2 gives a = -1/8.
  CHECK(g.value(1e-3) * 1e-12 == doctest::Approx(-0.125).epsilon(1e-4));
  // Approach to the constant is slow: monotone shrinking gap only.
  const double c = g.tail_constant;
  CHECK(std::abs(g.value(100.0) - c) < std::abs(g.value(50.0) - c));
  CHECK(std::abs(g.value(50.0) - c) < std::abs(g.value(20.0) - c));
}

TEST_CASE("variation of parameters reproduces a manufactured solution") {
  const auto m = GroundStateModel::dimension_six();
  // f = exp(-r^2/4); g = H f computed by hand.
  auto f = [](double r) { return std::exp(-0.25 * r * r); };
  auto g = [&](double r) {
    const double e = std::exp(-0.25 * r * r);
    const double fp = -0.5 * r * e, fpp = (-0.5 + 0.25 * r * r) * e;
    return fpp + (r > 0 ? 5.0 / r * fp : 5.0 * -0.5 * e) + m.V(r) * e;
  };
  const auto T = solve_inhomogeneous(gamma6(), g);
  // The regular solution with T(0) = 0 is f - (f(0)/Lambda Q(0)) Lambda Q.
  for (double r : {0.5, 1.0, 3.0, 8.0, 20.0}) {
    const double want = f(r) - 0.5 * m.LambdaQ(r);
    CHECK(T(r) == doctest::Approx(want).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("finite-volume BVP agrees with the manufactured solution") {
  const auto m = GroundStateModel::dimension_six();
  auto g = [&](double r) {
    const double e = std::exp(-0.25 * r * r);
    const double fp = -0.5 * r * e, fpp = (-0.5 + 0.25 * r * r) * e;
    return fpp + (r > 0 ? 5.0 / r * fp : -2.5 * e) + m.V(r) * e;
  };
  std::vector<double> grid;
  for (int i = 0; i <= 8000; ++i) grid.push_back(0.01 * i);
  const auto T = solve_radial_bvp(m, grid, g, 1.0);
  for (double r : {0.0, 1.0, 3.0, 10.0})
    CHECK(T(r) == doctest::Approx(std::exp(-0.25 * r * r)).epsilon(1e-3).scale(1.0));
}

TEST_CASE("T1: limit 4/5, equation residual, route agreement") {
  const auto& t = t1();
  CHECK(t.limit == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(t.max_route_deviation <= 1e-4);
  const auto m = GroundStateModel::dimension_six();
  for (double r : {0.5, 2.0, 5.0, 12.0, 30.0}) {
    const double h = 1e-3;
    const double d2 = (t.value(r + h) - 2 * t.value(r) + t.value(r - h)) / (h * h);
    const double d1 = (t.value(r + h) - t.value(r - h)) / (2 * h);
    const double HT = d2 + 5.0 / r * d1 + m.V(r) * t.value(r);
    CHECK(HT == doctest::Approx(-m.LambdaQ(r)).epsilon(1e-4).scale(1e-3));
  }
  // |T1 - 4/5| r^2 settles to the tail coefficient; T1(50) itself sits 0.023 below 4/5.
  double prev = 0.0;
  for (double r : {20.0, 30.0, 40.0, 50.0}) {
    const double w = std::abs(t.value(r) - 0.8) * r * r;
    CHECK(w <= 2.0 * std::abs(t.tail_coefficient));
    if (prev > 0.0) CHECK(std::abs(w - prev) / prev < 0.1);
    prev = w;
  }
  CHECK(t.value(50.0) == doctest::Approx(0.8 + t.tail_coefficient / 2500.0).epsilon(1e-3));
}

TEST_CASE("input validation") {
  const auto m = GroundStateModel::dimension_six();
  CHECK_THROWS_AS((void)m.Q(1.0, 0.0), InvalidArgument);
  GammaGridSpec bad;
  bad.r_max = 20.0;
  CHECK_THROWS_AS(build_Gamma(m, 6.0, bad), InvalidArgument);
}
