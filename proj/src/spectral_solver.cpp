#include "blowup6/spectral_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blowup6/cutoff.hpp"
#include "blowup6/errors.hpp"
#include "blowup6/ground_state.hpp"
#include "blowup6/ode.hpp"

namespace blowup {

namespace {
constexpr int kDim = 6;
}

Potential ground_state_potential() {
  const auto model = GroundStateModel::dimension_six();
  return [model](double r) { return model.V(r); };
}

Potential zero_potential() {
  return [](double) { return 0.0; };
}

namespace {

auto radial_rhs(double mu, const Potential& V) {
  return [mu, &V](double r, const OdeState<2>& y) {
    return OdeState<2>{y[1], -(kDim - 1) / r * y[1] - (V(r) + mu) * y[0]};
  };
}

OdeState<2> origin_series(double mu, double V0, double r0) {
  const double a = (V0 + mu) / (2.0 * kDim);
  return {1.0 - a * r0 * r0, -2.0 * a * r0};
}

OdeOptions shooting_ode_options(const ShootingOptions& opts) {
  OdeOptions o;
  o.rtol = opts.rtol;
  o.atol = 1e-16;
  o.max_step = 0.05;
  return o;
}

}  // namespace

ShotResult shoot_radial(double mu, double R, const Potential& V, const ShootingOptions& opts) {
  if (!(R > opts.start_radius)) throw InvalidArgument("shoot_radial: radius too small");
  const double r0 = opts.start_radius;
  auto ode = make_dormand_prince<2>(radial_rhs(mu, V), r0, origin_series(mu, V(0.0), r0),
                                    shooting_ode_options(opts));
  ShotResult res;
  double prev = ode.y()[0];
  ode.advance(R, [&](double, const OdeState<2>& y) {
    if ((y[0] < 0.0) != (prev < 0.0) && y[0] != 0.0) ++res.sign_changes;
    if (y[0] != 0.0) prev = y[0];
  });
  res.boundary_value = ode.y()[0];
  return res;
}

double eigen_residual(const RadialFunction& psi, double mu, const Potential& V, int n) {
  const auto r = psi.grid();
  const auto f = psi.values();
  const std::size_t N = r.size();
  if (r[0] != 0.0) throw InvalidArgument("eigen_residual: samples must start at the origin");
  const double h = r[1] - r[0];
  auto at = [&](long i) { return f[static_cast<std::size_t>(std::labs(i))]; };  // even extension
  double worst = 0.0, sup = 0.0;
  for (double v : f) sup = std::max(sup, std::abs(v));
  for (std::size_t i = 0; i + 2 < N; ++i) {
    const long k = static_cast<long>(i);
    const double d2 = (-at(k - 2) + 16 * at(k - 1) - 30 * at(k) + 16 * at(k + 1) - at(k + 2)) / (12 * h * h);
    double lap;
    if (i == 0) {
      lap = n * d2;
    } else {
      const double d1 = (at(k - 2) - 8 * at(k - 1) + 8 * at(k + 1) - at(k + 2)) / (12 * h);
      lap = d2 + (n - 1) / r[i] * d1;
    }
    const double res = lap + V(r[i]) * f[i] + mu * f[i];
    worst = std::max(worst, std::abs(res));
  }
  return worst / sup;
}

EigenResult solve_dirichlet_eigen(double R, int index, const Potential& V, const ShootingOptions& opts) {
  if (!(R >= 5.0)) throw InvalidArgument("solve_dirichlet_eigen: R must be >= 5");
  if (index < 1 || index > 3) throw InvalidArgument("solve_dirichlet_eigen: index must be 1, 2 or 3");

  auto count = [&](double mu) { return shoot_radial(mu, R, V, opts).sign_changes; };
  double lo = opts.mu_lo, hi = opts.mu_lo;
  if (count(lo) >= index)
    throw NumericalError("solve_dirichlet_eigen: eigenvalue " + std::to_string(index) +
                         " lies below the scanned window");
  bool found = false;
  for (double mu = opts.mu_lo + opts.scan_step; mu <= opts.mu_hi + 1e-12; mu += opts.scan_step) {
    if (count(mu) >= index) {
      hi = mu;
      found = true;
      break;
    }
    lo = mu;
  }
  if (!found)
    throw NumericalError("solve_dirichlet_eigen: no bracket for eigenvalue " + std::to_string(index) +
                         " in [" + std::to_string(opts.mu_lo) + ", " + std::to_string(opts.mu_hi) + "]");
  while (hi - lo > opts.mu_tol) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) >= index ? hi : lo) = mid;
  }

  EigenResult out;
  out.R = R;
  out.index = index;
  out.mu = 0.5 * (lo + hi);

  // Dense samples on a uniform grid including the origin.
  const std::size_t N = opts.output_nodes;
  std::vector<double> grid(N), psi(N), dpsi(N);
  for (std::size_t i = 0; i < N; ++i) grid[i] = R * static_cast<double>(i) / static_cast<double>(N - 1);
  grid.back() = R;
  psi[0] = 1.0;
  dpsi[0] = 0.0;
  const double r0 = std::min(opts.start_radius, 0.5 * grid[1]);
  auto ode = make_dormand_prince<2>(radial_rhs(out.mu, V), r0, origin_series(out.mu, V(0.0), r0),
                                    shooting_ode_options(opts));
  for (std::size_t i = 1; i < N; ++i) {
    const auto& y = ode.advance(grid[i]);
    psi[i] = y[0];
    dpsi[i] = y[1];
  }
  out.boundary_value = psi.back();
  for (std::size_t i = 1; i + 1 < N; ++i)
    if ((psi[i] < 0.0) != (psi[i - 1] < 0.0)) ++out.zeros;
  out.psi = RadialFunction(std::move(grid), std::move(psi), std::move(dpsi));
  if (out.zeros != index - 1)
    throw NumericalError("solve_dirichlet_eigen: eigenfunction " + std::to_string(index) + " has " +
                         std::to_string(out.zeros) + " interior zeros");
  out.residual = eigen_residual(out.psi, out.mu, V);
  return out;
}

Mu1Extrapolation estimate_mu1_infinity(std::span<const double> R_list, const Potential& V,
                                       double monotone_tol) {
  if (R_list.size() < 3) throw InvalidArgument("estimate_mu1_infinity: need at least 3 radii");
  for (std::size_t i = 1; i < R_list.size(); ++i)
    if (!(R_list[i] > R_list[i - 1])) throw InvalidArgument("estimate_mu1_infinity: radii must increase");
  Mu1Extrapolation out;
  for (double R : R_list) {
    out.R.push_back(R);
    out.mu1.push_back(solve_dirichlet_eigen(R, 1, V).mu);
  }
  for (std::size_t i = 1; i < out.mu1.size(); ++i) {
    const double v = out.mu1[i] - out.mu1[i - 1];
    if (v > 0.0) out.max_violation = std::max(out.max_violation, v);
  }
  out.monotone = out.max_violation <= monotone_tol;
  // Aitken delta-squared on the last three values; the convergence in R is
  // exponential, so a vanishing second difference means we are converged.
  const std::size_t k = out.mu1.size();
  const double a = out.mu1[k - 3], b = out.mu1[k - 2], c = out.mu1[k - 1];
  const double denom = (c - b) - (b - a);
  out.limit = (std::abs(denom) > 1e-14 && std::abs(c - b) < std::abs(b - a))
                  ? c - (c - b) * (c - b) / denom
                  : c;
  return out;
}

DecayReport decay_check(const EigenResult& result) {
  if (result.index != 1) throw InvalidArgument("decay_check: needs the ground (index 1) eigenfunction");
  DecayReport rep;
  rep.R = result.R;
  rep.psi_at_origin = result.psi.values()[0];
  const double rate = std::sqrt(std::abs(result.mu));
  const auto r = result.psi.grid();
  const auto f = result.psi.values();
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (!(f[i] > 0.0)) {
      rep.positive = false;
      throw NumericalError("decay_check: ground eigenfunction changes sign at r = " + std::to_string(r[i]));
    }
    if (r[i] < 0.9 * result.R) {
      const double env = f[i] * std::pow(1.0 + r[i], 0.5 * (kDim - 1)) * std::exp(rate * r[i]);
      rep.envelope_constant = std::max(rep.envelope_constant, env);
    }
  }
  return rep;
}

GapReport gap_scaling_check(std::span<const double> R_list, const Potential& V, double power) {
  if (R_list.empty()) throw InvalidArgument("gap_scaling_check: empty radius list");
  GapReport rep;
  for (double R : R_list) {
    const double mu2 = solve_dirichlet_eigen(R, 2, V).mu;
    if (!(mu2 > 0.0))
      throw NumericalError("gap_scaling_check: mu_2 <= 0 at R = " + std::to_string(R));
    rep.R.push_back(R);
    rep.mu2.push_back(mu2);
    rep.scaled.push_back(mu2 * std::pow(R, power));
  }
  const auto [mn, mx] = std::minmax_element(rep.scaled.begin(), rep.scaled.end());
  rep.min_scaled = *mn;
  rep.band_ratio = *mx / *mn;
  rep.passed = rep.min_scaled > 0.0 && rep.band_ratio <= 4.0;
  return rep;
}

PerturbedSolution solve_pM(double M, double r_max, const Potential& V, std::size_t nodes) {
  if (!(M > 0.0)) throw InvalidArgument("solve_pM: M must be positive");
  if (!(r_max >= 10.0 * M)) throw InvalidArgument("solve_pM: r_max must be at least 10 M");
  std::vector<double> grid(nodes), p(nodes), dp(nodes);
  for (std::size_t i = 0; i < nodes; ++i) grid[i] = r_max * static_cast<double>(i) / static_cast<double>(nodes - 1);
  grid.back() = r_max;

  auto rhs = [&](double r, const OdeState<2>& y) {
    const double w = 1.0 - eta(r / M);
    return OdeState<2>{y[1], -(kDim - 1) / r * y[1] - w * V(r) * y[0]};
  };
  OdeOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  o.max_step = 0.25 * M;
  auto ode = make_dormand_prince<2>(rhs, M, OdeState<2>{1.0, 0.0}, o);

  PerturbedSolution out;
  out.M = M;
  out.r_max = r_max;
  out.lower_bound = 1.0;
  bool ok = true;
  for (std::size_t i = 0; i < nodes; ++i) {
    if (grid[i] <= M) {
      p[i] = 1.0;
      dp[i] = 0.0;
      continue;
    }
    const auto& y = ode.advance(grid[i]);
    p[i] = y[0];
    dp[i] = y[1];
    out.lower_bound = std::min(out.lower_bound, p[i]);
    if (!(p[i] > 0.0 && p[i] <= 1.0)) ok = false;
  }
  out.within_bounds = ok;
  out.pm = RadialFunction(std::move(grid), std::move(p), std::move(dp));
  return out;
}

double smallest_admissible_M(double M_start, double M_stop, double step, const Potential& V) {
  for (double M = M_start; M <= M_stop + 1e-12; M += step)
    if (solve_pM(M, 10.0 * M, V, 4001).within_bounds) return M;
  return -1.0;
}

std::vector<double> fd_dirichlet_eigenvalues(double R, std::size_t cells, const Potential& V, int count) {
  if (cells < 4 || count < 1) throw InvalidArgument("fd_dirichlet_eigenvalues: bad arguments");
  // Unknowns at r_i = i h, i = 0 .. cells-1; psi(R) = 0.
  const std::size_t N = cells;
  const double h = R / static_cast<double>(cells);
  auto area = [](double r) { return std::pow(r, kDim - 1); };
  auto volume = [](double a, double b) { return (std::pow(b, kDim) - std::pow(a, kDim)) / kDim; };
  std::vector<double> diag(N), off(N > 0 ? N - 1 : 0);
  std::vector<double> w(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = h * static_cast<double>(i);
    w[i] = volume(std::max(0.0, r - 0.5 * h), r + 0.5 * h);
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double r = h * static_cast<double>(i);
    const double a_plus = area(r + 0.5 * h) / h;
    const double a_minus = i == 0 ? 0.0 : area(r - 0.5 * h) / h;
    diag[i] = (a_plus + a_minus) / w[i] - V(r);
    if (i + 1 < N) off[i] = -a_plus / std::sqrt(w[i] * w[i + 1]);
  }
  // Sturm count: number of eigenvalues < x.
  auto below = [&](double x) {
    int c = 0;
    double q = diag[0] - x;
    if (q < 0) ++c;
    for (std::size_t i = 1; i < N; ++i) {
      if (q == 0.0) q = 1e-300;
      q = diag[i] - x - off[i - 1] * off[i - 1] / q;
      if (q < 0) ++c;
    }
    return c;
  };
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double rad = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < N ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - rad);
    hi = std::max(hi, diag[i] + rad);
  }
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      (below(m) >= k ? b : a) = m;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

}  // namespace blowup
