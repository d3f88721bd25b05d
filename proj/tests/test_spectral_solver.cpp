#include <doctest.h>

#include <cmath>
#include <vector>

#include "blowup6/errors.hpp"
#include "blowup6/spectral_solver.hpp"

using namespace blowup;

TEST_CASE("V = 0: Dirichlet eigenvalues are (j_{2,m}/R)^2") {
  // Radial eigenfunctions of the 6D ball are r^{-2} J_2(k r).
  const double j21 = 5.135622301840683, j22 = 8.417244140399856;
  const double R = 10.0;
  const auto e1 = solve_dirichlet_eigen(R, 1, zero_potential());
  const auto e2 = solve_dirichlet_eigen(R, 2, zero_potential());
  CHECK(e1.mu == doctest::Approx((j21 / R) * (j21 / R)).epsilon(1e-9));
  CHECK(e2.mu == doctest::Approx((j22 / R) * (j22 / R)).epsilon(1e-9));
}

TEST_CASE("ground-state potential: signs, residuals, Sturm ordering") {
  for (double R : {10.0, 20.0, 40.0}) {
    const auto e1 = solve_dirichlet_eigen(R, 1);
    const auto e2 = solve_dirichlet_eigen(R, 2);
    const auto e3 = solve_dirichlet_eigen(R, 3);
    CHECK(e1.mu < 0.0);
    CHECK(e2.mu > 0.0);
    CHECK(e1.mu < e2.mu);
    CHECK(e2.mu < e3.mu);
    CHECK(e1.zeros == 0);
    CHECK(e2.zeros == 1);
    CHECK(e3.zeros == 2);
    CHECK(e1.residual <= 1e-6);
    CHECK(e2.residual <= 1e-6);
    // Second-order finite volume on 4000 cells as the independent oracle.
    const auto fd = fd_dirichlet_eigenvalues(R, 4000, ground_state_potential(), 2);
    CHECK(e1.mu == doctest::Approx(fd[0]).epsilon(1e-4));
    CHECK(e2.mu == doctest::Approx(fd[1]).epsilon(5e-3));
    const auto d = decay_check(e1);
    CHECK(d.positive);
  }
}

TEST_CASE("mu_1 decreases with R and converges") {
  const std::vector<double> Rs{10.0, 20.0, 40.0};
  const auto ex = estimate_mu1_infinity(Rs);
  CHECK(ex.monotone);
  CHECK(ex.limit == doctest::Approx(-0.2817484733).epsilon(1e-7));
}

TEST_CASE("spectral gap scales like R^{-4}") {
  const std::vector<double> Rs{10.0, 20.0, 40.0};
  const auto g = gap_scaling_check(Rs);
  CHECK(g.passed);
  CHECK(g.min_scaled > 1000.0);
  CHECK(g.band_ratio < 1.5);
}

TEST_CASE("p_M: bounds and the V = 0 control") {
  const auto p = solve_pM(20.0, 400.0);
  CHECK(p.within_bounds);
  CHECK(p.lower_bound > 0.0);
  CHECK(p.lower_bound <= 1.0);
  const auto flat = solve_pM(20.0, 400.0, zero_potential());
  for (double v : flat.pm.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  const double M1 = smallest_admissible_M();
  CHECK(M1 > 0.0);
  CHECK(M1 <= 20.0);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(solve_dirichlet_eigen(2.0, 1), InvalidArgument);
  CHECK_THROWS_AS(solve_dirichlet_eigen(10.0, 4), InvalidArgument);
}
