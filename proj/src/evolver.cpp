#include "blowup6/evolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "blowup6/errors.hpp"
#include "blowup6/kernels.hpp"
#include "blowup6/tridiagonal.hpp"

namespace blowup {

DataSpec DataSpec::constant(double A) {
  DataSpec d;
  d.kind = Kind::Constant;
  d.amplitude = A;
  return d;
}

DataSpec DataSpec::uapp(std::shared_ptr<const BlowupProfile> profile, double tau0) {
  if (!profile) throw InvalidArgument("DataSpec::uapp: missing profile");
  if (!(tau0 >= 10.0 && tau0 <= 45.0)) throw InvalidArgument("DataSpec::uapp: tau0 outside [10, 45]");
  DataSpec d;
  d.kind = Kind::Uapp;
  d.profile = std::move(profile);
  d.tau0 = tau0;
  return d;
}

DataSpec DataSpec::custom(RadialFunction f) {
  if (f.empty()) throw InvalidArgument("DataSpec::custom: empty samples");
  DataSpec d;
  d.kind = Kind::Custom;
  d.samples = std::move(f);
  return d;
}

DataSpec DataSpec::parse(const std::string& text, std::shared_ptr<const BlowupProfile> profile) {
  auto number = [&](std::size_t pos) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text.substr(pos), &used);
      if (used != text.size() - pos) throw InvalidArgument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw InvalidArgument("data spec '" + text + "': expected a number");
    }
  };
  if (text == "zero") return zero();
  if (text.rfind("constant:", 0) == 0) return constant(number(9));
  if (text.rfind("uapp:", 0) == 0) {
    if (!profile) throw InvalidArgument("data spec uapp needs a profile");
    return uapp(std::move(profile), number(5));
  }
  throw InvalidArgument("data spec '" + text + "': expected constant:<A>, zero or uapp:<tau0>");
}

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::Completed: return "completed";
    case RunStatus::BlownUp: return "blown_up";
    case RunStatus::Unstable: return "unstable";
  }
  return "unknown";
}

namespace {

void build_operator(EvolutionState& st) {
  const auto& r = st.grid;
  const std::size_t N = r.size();
  const std::size_t M = N - 1;  // free nodes
  st.lower.assign(M, 0.0);
  st.diag.assign(M, 0.0);
  st.upper.assign(M, 0.0);
  auto face = [&](std::size_t i) {
    const double m = 0.5 * (r[i] + r[i + 1]);
    return std::pow(m, 5) / (r[i + 1] - r[i]);
  };
  double bound = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const double a = i == 0 ? 0.0 : 0.5 * (r[i - 1] + r[i]);
    const double b = 0.5 * (r[i] + r[i + 1]);
    const double w = (std::pow(b, 6) - std::pow(a, 6)) / 6.0;
    const double fp = face(i) / w;
    const double fm = i == 0 ? 0.0 : face(i - 1) / w;
    st.lower[i] = fm;
    st.upper[i] = fp;
    st.diag[i] = -(fm + fp);
    bound = std::max(bound, fm + fp);
  }
  st.diffusive_bound = bound;
}

void rhs(const EvolutionState& st, const double* u, double* out) {
  kernels::active_kernels().heat_rhs(st.diag.size(), st.lower.data(), st.diag.data(), st.upper.data(), u, out);
}

void push_history(EvolutionState& st) {
  const auto e = kernels::active_kernels().extrema(st.u.size(), st.u.data());
  st.history.push_back({st.step_count, st.t, st.dt, st.u[0], e.max_abs, e.min_value});
  while (st.history.size() > st.options.history_capacity) st.history.pop_front();
}

std::function<double(double)> data_function(const DataSpec& data, double& t0) {
  t0 = 0.0;
  switch (data.kind) {
    case DataSpec::Kind::Constant: {
      const double A = data.amplitude;
      return [A](double) { return A; };
    }
    case DataSpec::Kind::Uapp: {
      const auto prof = data.profile;
      const double s0 = std::exp(-data.tau0);
      t0 = prof->T() - s0;
      return [prof, s0](double r) { return prof->u_app(r, s0); };
    }
    case DataSpec::Kind::Custom: {
      const auto f = *data.samples;
      return [f](double r) {
        if (r < f.r_min()) return f.values()[0];
        return f(r);
      };
    }
  }
  throw InvalidArgument("unknown data kind");
}

}  // namespace

EvolutionState init(const DataSpec& data, double domain_radius, const EvolutionGridSpec& gs,
                    const EvolverOptions& options) {
  if (!(domain_radius > 0.0)) throw InvalidArgument("init: domain radius must be positive");
  if (!(gs.h0 > 0.0 && gs.h0 < domain_radius / 10.0)) throw InvalidArgument("init: h0 out of range");
  if (!(gs.growth >= 1.0 && gs.growth <= 1.5)) throw InvalidArgument("init: growth must lie in [1, 1.5]");
  if (data.kind == DataSpec::Kind::Custom && data.samples->r_max() < domain_radius * (1 - 1e-12))
    throw InvalidArgument("init: custom data does not cover the domain");

  EvolutionState st;
  st.options = options;
  st.grid = origin_clustered_grid(gs.h0, gs.growth, domain_radius, gs.core_cells);
  double t0 = 0.0;
  const auto f = data_function(data, t0);
  st.t = t0;
  const std::size_t N = st.grid.size();
  st.u.assign(N - 1, 0.0);
  double sup = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i) {
    st.u[i] = f(st.grid[i]);
    if (!std::isfinite(st.u[i])) throw InvalidArgument("init: data not finite on the grid");
    sup = std::max(sup, std::abs(st.u[i]));
  }
  if (sup > 0.0) {
    for (std::size_t i = 0; i + 2 < N; ++i) {
      const double mid = 0.5 * (st.grid[i] + st.grid[i + 1]);
      const double defect = std::abs(f(mid) - 0.5 * (st.u[i] + st.u[i + 1]));
      if (defect > 1e-2 * sup)
        throw InvalidArgument("init: data not resolved near r = " + std::to_string(mid) +
                              " (midpoint defect " + std::to_string(defect / sup) + " of sup|u|)");
    }
  }
  build_operator(st);
  if (options.scheme == Scheme::ImplicitRemainder) {
    if (data.kind != DataSpec::Kind::Uapp)
      throw InvalidArgument("init: the remainder scheme needs u_app data");
    st.base = data.profile;
    st.remaining = std::exp(-data.tau0);
    st.v.assign(st.u.size(), 0.0);
  }
  st.dt = 0.0;
  push_history(st);
  return st;
}

double stable_dt(const EvolutionState& st) {
  const auto e = kernels::active_kernels().extrema(st.u.size(), st.u.data());
  double dt = st.options.diffusive_safety / st.diffusive_bound;
  if (e.max_abs > 0.0) dt = std::min(dt, st.options.reaction_c / e.max_abs);
  return dt;
}

std::vector<double> apply_laplacian(const EvolutionState& st, std::span<const double> u) {
  if (u.size() != st.diag.size()) throw InvalidArgument("apply_laplacian: size mismatch");
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double um = i > 0 ? u[i - 1] : 0.0;
    const double up = i + 1 < u.size() ? u[i + 1] : 0.0;
    out[i] = st.lower[i] * um + st.diag[i] * u[i] + st.upper[i] * up;
  }
  return out;
}

namespace {

void maybe_regrid(EvolutionState& st) {
  if (!st.options.allow_regrid || st.regridded || st.base || !(st.u[0] > 0.0)) return;
  const double h0 = st.grid[1] - st.grid[0];
  if (1.0 / std::sqrt(st.u[0]) >= 10.0 * h0) return;
  // Refine the core by 4 and interpolate.
  std::vector<double> vals(st.u.begin(), st.u.end());
  vals.push_back(0.0);
  const RadialFunction old(st.grid, vals);
  double growth = (st.grid.back() - st.grid[st.grid.size() - 2]) / (st.grid[st.grid.size() - 2] - st.grid[st.grid.size() - 3]);
  growth = std::clamp(growth, 1.0, 1.5);
  st.grid = origin_clustered_grid(0.25 * h0, growth, st.grid.back());
  st.u.resize(st.grid.size() - 1);
  for (std::size_t i = 0; i + 1 < st.grid.size(); ++i) st.u[i] = old(st.grid[i]);
  build_operator(st);
  st.regridded = true;
}

void explicit_step(EvolutionState& st) {
  const auto& K = kernels::active_kernels();
  const std::size_t M = st.u.size();
  double dt = stable_dt(st);
  if (st.options.fixed_dt) dt = std::min(dt, *st.options.fixed_dt);
  if (st.dt > 0.0 && st.dt < dt) dt = st.dt;  // caller clipped (end of run)
  std::vector<double> k(M), u1(M), u2(M), u3(M);
  rhs(st, st.u.data(), k.data());
  K.rk_combine(M, 0.0, st.u.data(), 1.0, st.u.data(), dt, k.data(), u1.data());
  rhs(st, u1.data(), k.data());
  K.rk_combine(M, 0.75, st.u.data(), 0.25, u1.data(), dt, k.data(), u2.data());
  rhs(st, u2.data(), k.data());
  K.rk_combine(M, 1.0 / 3.0, st.u.data(), 2.0 / 3.0, u2.data(), dt, k.data(), u3.data());
  const auto e = K.extrema(M, u3.data());
  if (!e.finite) {
    st.status = RunStatus::BlownUp;
    st.status_time = st.t;
    return;
  }
  st.u.swap(u3);
  st.t += dt;
  st.dt = dt;
  ++st.step_count;
  if (e.max_abs > st.options.blowup_threshold) {
    st.status = RunStatus::BlownUp;
    st.status_time = st.t;
  }
}

// Backward Euler solved by Newton; returns false if Newton fails.
bool backward_euler(const EvolutionState& st, double dt, std::vector<double>& v) {
  const std::size_t M = st.u.size();
  v = st.u;
  std::vector<double> F(M), G(M);
  Tridiagonal J(M);
  for (int it = 0; it < st.options.newton_max_iter; ++it) {
    rhs(st, v.data(), F.data());
    double vmax = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      G[i] = -(v[i] - st.u[i] - dt * F[i]);
      J.diag[i] = 1.0 - dt * (st.diag[i] + 2.0 * std::abs(v[i]));
      if (i + 1 < M) {
        J.upper[i] = -dt * st.upper[i];
        J.lower[i] = -dt * st.lower[i + 1];
      }
      vmax = std::max(vmax, std::abs(v[i]));
    }
    std::vector<double> delta;
    try {
      delta = solve_tridiagonal(J, G);
    } catch (const NumericalError&) {
      return false;
    }
    double dmax = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      v[i] += delta[i];
      dmax = std::max(dmax, std::abs(delta[i]));
    }
    if (!std::isfinite(dmax)) return false;
    if (dmax <= st.options.newton_tol * std::max(vmax, 1e-300)) return true;
  }
  return false;
}

void implicit_step(EvolutionState& st, double dt_cap) {
  const std::size_t M = st.u.size();
  const double target = st.options.target_change;
  double dt = st.dt;
  if (!(dt > 0.0)) {
    dt = st.options.initial_dt;
    if (!(dt > 0.0)) {
      std::vector<double> F(M);
      rhs(st, st.u.data(), F.data());
      const auto e = kernels::active_kernels().extrema(M, st.u.data());
      const auto f = kernels::active_kernels().extrema(M, F.data());
      dt = f.max_abs > 0.0 ? target * e.max_abs / f.max_abs : 1e-3;
    }
  }
  std::vector<double> v;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const double h = std::min(dt, dt_cap);
    if (!backward_euler(st, h, v)) {
      dt = 0.5 * h;
      continue;
    }
    const auto e = kernels::active_kernels().extrema(M, v.data());
    double change = 0.0;
    for (std::size_t i = 0; i < M; ++i) change = std::max(change, std::abs(v[i] - st.u[i]));
    const double rho = change / std::max(e.max_abs, 1e-300);
    if (rho > 2.0 * target && h > 1e-300) {
      dt = h * std::max(0.1, 0.9 * target / rho);
      continue;
    }
    st.u.swap(v);
    st.t += h;
    ++st.step_count;
    st.dt = h < dt_cap ? h * std::clamp(0.9 * target / std::max(rho, 1e-300), 0.3, 2.0) : dt;
    if (e.max_abs > st.options.blowup_threshold) {
      st.status = RunStatus::BlownUp;
      st.status_time = st.t;
    }
    return;
  }
  st.status = RunStatus::Unstable;
  st.status_time = st.t;
}

// |b+v|(b+v) - |b|b without cancellation when b and b+v share a sign.
inline double reaction_increment(double b, double v) {
  const double u = b + v;
  if (b >= 0.0 && u >= 0.0) return v * (2.0 * b + v);
  if (b <= 0.0 && u <= 0.0) return -v * (2.0 * b + v);
  return std::abs(u) * u - std::abs(b) * b;
}

bool remainder_backward_euler(const EvolutionState& st, double dt, double s_new, std::vector<double>& v) {
  const std::size_t M = st.v.size();
  std::vector<double> b(M), R(M);
  for (std::size_t i = 0; i < M; ++i) {
    b[i] = st.base->u_app(st.grid[i], s_new);
    R[i] = st.base->pde_residual(st.grid[i], s_new);
  }
  v = st.v;
  std::vector<double> G(M);
  Tridiagonal J(M);
  for (int it = 0; it < st.options.newton_max_iter; ++it) {
    double vmax = 0.0, umax = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      const double lv = (i > 0 ? st.lower[i] * v[i - 1] : 0.0) + st.diag[i] * v[i] +
                        (i + 1 < M ? st.upper[i] * v[i + 1] : 0.0);
      G[i] = -(v[i] - st.v[i] - dt * (lv + reaction_increment(b[i], v[i]) - R[i]));
      J.diag[i] = 1.0 - dt * (st.diag[i] + 2.0 * std::abs(b[i] + v[i]));
      if (i + 1 < M) {
        J.upper[i] = -dt * st.upper[i];
        J.lower[i] = -dt * st.lower[i + 1];
      }
      vmax = std::max(vmax, std::abs(v[i]));
      umax = std::max(umax, std::abs(b[i] + v[i]));
    }
    std::vector<double> delta;
    try {
      delta = solve_tridiagonal(J, G);
    } catch (const NumericalError&) {
      return false;
    }
    double dmax = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      v[i] += delta[i];
      dmax = std::max(dmax, std::abs(delta[i]));
    }
    if (!std::isfinite(dmax)) return false;
    if (dmax <= st.options.newton_tol * std::max(vmax, 1e-16 * umax)) return true;
  }
  return false;
}

// Step size from the relative change of u, as in the plain implicit scheme.
void remainder_step(EvolutionState& st, double dt_cap) {
  const std::size_t M = st.v.size();
  const double target = st.options.target_change;
  double dt = st.dt > 0.0 ? st.dt : (st.options.initial_dt > 0.0 ? st.options.initial_dt : 1e-3 * st.remaining);
  std::vector<double> v;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const double h = std::min({dt, dt_cap, 0.5 * st.remaining});
    const double s_new = st.remaining - h;
    if (!remainder_backward_euler(st, h, s_new, v)) {
      dt = 0.5 * h;
      continue;
    }
    std::vector<double> u(M);
    double change = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      u[i] = st.base->u_app(st.grid[i], s_new) + v[i];
      change = std::max(change, std::abs(u[i] - st.u[i]));
      sup = std::max(sup, std::abs(u[i]));
    }
    if (!std::isfinite(sup)) {
      st.status = RunStatus::BlownUp;
      st.status_time = st.t;
      return;
    }
    const double rho = change / std::max(sup, 1e-300);
    if (rho > 2.0 * target) {
      dt = h * std::max(0.1, 0.9 * target / rho);
      continue;
    }
    st.v.swap(v);
    st.u.swap(u);
    st.t = st.base->T() - s_new;
    st.remaining = s_new;
    ++st.step_count;
    st.dt = h < dt_cap ? h * std::clamp(0.9 * target / std::max(rho, 1e-300), 0.3, 2.0) : dt;
    if (sup > st.options.blowup_threshold) {
      st.status = RunStatus::BlownUp;
      st.status_time = st.t;
    }
    return;
  }
  st.status = RunStatus::Unstable;
  st.status_time = st.t;
}

}  // namespace

void step(EvolutionState& st) {
  if (st.status != RunStatus::Running) throw InvalidArgument("step: run already terminated");
  maybe_regrid(st);
  if (st.options.scheme == Scheme::Explicit) {
    st.dt = 0.0;
    explicit_step(st);
  } else if (st.options.scheme == Scheme::Implicit) {
    implicit_step(st, std::numeric_limits<double>::infinity());
  } else {
    remainder_step(st, std::numeric_limits<double>::infinity());
  }
  if (st.status == RunStatus::Running || st.status == RunStatus::BlownUp) push_history(st);
}

void evolve(EvolutionState& st, double t_end, long max_steps,
            const std::function<void(const EvolutionState&)>& observer) {
  long taken = 0;
  while (st.status == RunStatus::Running && st.t < t_end && taken < max_steps) {
    maybe_regrid(st);
    const double remaining = t_end - st.t;
    const long before = st.step_count;
    if (st.options.scheme == Scheme::Explicit) {
      double dt = stable_dt(st);
      if (st.options.fixed_dt) dt = std::min(dt, *st.options.fixed_dt);
      st.dt = dt >= remaining ? remaining : 0.0;
      explicit_step(st);
      if (st.dt == remaining && st.step_count > before) st.t = t_end;
    } else if (st.options.scheme == Scheme::Implicit) {
      implicit_step(st, remaining);
      if (st.step_count > before && t_end - st.t <= 1e-15 * std::abs(t_end)) st.t = t_end;
    } else {
      remainder_step(st, remaining);
      if (st.step_count > before && t_end - st.t <= 1e-15 * std::abs(t_end)) st.t = t_end;
    }
    if (st.step_count > before) {
      push_history(st);
      if (observer) observer(st);
    }
    ++taken;
  }
  if (st.status == RunStatus::Running && st.t >= t_end) {
    st.status = RunStatus::Completed;
    st.status_time = st.t;
  }
}

void evolve_remaining(EvolutionState& st, double s_end, long max_steps,
                      const std::function<void(const EvolutionState&)>& observer) {
  if (st.options.scheme != Scheme::ImplicitRemainder || !st.base)
    throw InvalidArgument("evolve_remaining: needs the remainder scheme");
  if (!(s_end > 0.0)) throw InvalidArgument("evolve_remaining: target T - t must be positive");
  long taken = 0;
  while (st.status == RunStatus::Running && st.remaining > s_end && taken < max_steps) {
    const long before = st.step_count;
    remainder_step(st, st.remaining - s_end);
    if (st.step_count > before) {
      if (st.remaining - s_end <= 1e-14 * s_end) st.remaining = s_end;
      push_history(st);
      if (observer) observer(st);
    }
    ++taken;
  }
  if (st.status == RunStatus::Running && st.remaining <= s_end) {
    st.status = RunStatus::Completed;
    st.status_time = st.t;
  }
}

BlowupTimeEstimate estimate_blowup_time(std::span<const HistorySample> h) {
  if (h.size() < 20) throw InvalidArgument("estimate_blowup_time: need at least 20 samples");
  const std::size_t start = h.size() / 2;
  for (std::size_t i = start + 1; i < h.size(); ++i)
    if (h[i].sup_abs < h[i - 1].sup_abs)
      throw NumericalError("estimate_blowup_time: sup-norm not monotone; no estimate");
  if (!(h.back().sup_abs > h[start].sup_abs) || !(h[start].sup_abs > 0.0))
    throw NumericalError("estimate_blowup_time: no growth; no estimate");
  const std::size_t n = h.size() - start;
  double mt = 0, my = 0;
  for (std::size_t i = start; i < h.size(); ++i) {
    mt += h[i].t;
    my += 1.0 / h[i].sup_abs;
  }
  mt /= n;
  my /= n;
  double stt = 0, sty = 0;
  for (std::size_t i = start; i < h.size(); ++i) {
    stt += (h[i].t - mt) * (h[i].t - mt);
    sty += (h[i].t - mt) * (1.0 / h[i].sup_abs - my);
  }
  const double slope = sty / stt;
  const double icpt = my - slope * mt;
  if (!(slope < 0.0)) throw NumericalError("estimate_blowup_time: 1/sup|u| not decreasing");
  double rss = 0;
  for (std::size_t i = start; i < h.size(); ++i) {
    const double res = 1.0 / h[i].sup_abs - (icpt + slope * h[i].t);
    rss += res * res;
  }
  const double sigma2 = n > 2 ? rss / static_cast<double>(n - 2) : 0.0;
  const double var_slope = sigma2 / stt;
  const double var_icpt = sigma2 * (1.0 / n + mt * mt / stt);
  const double cov = -mt * sigma2 / stt;
  BlowupTimeEstimate est;
  est.T_est = -icpt / slope;
  const double gi = -1.0 / slope, gs = icpt / (slope * slope);
  est.width = std::sqrt(std::max(0.0, gi * gi * var_icpt + gs * gs * var_slope + 2 * gi * gs * cov));
  est.samples_used = n;
  return est;
}

BlowupTimeEstimate estimate_blowup_time(const std::deque<HistorySample>& history) {
  std::vector<HistorySample> v(history.begin(), history.end());
  return estimate_blowup_time(std::span<const HistorySample>(v));
}

double extract_lambda(double u_center) {
  if (!(u_center > 0.0)) throw NumericalError("extract_lambda: nonpositive center value; inner bubble lost");
  return 1.0 / std::sqrt(u_center);
}

double extract_lambda(const EvolutionState& state) { return extract_lambda(state.u.at(0)); }

RateFit fit_type2_rate_remaining(std::span<const double> remaining, std::span<const double> lambda,
                                 std::optional<double> fixed_b) {
  const std::size_t n = remaining.size();
  if (n != lambda.size()) throw InvalidArgument("fit_type2_rate: size mismatch");
  if (n < 4) throw InvalidArgument("fit_type2_rate: need at least 4 points");
  const int p = fixed_b ? 2 : 3;
  // Columns: log s, [log|log s|], 1.
  std::array<std::array<double, 3>, 3> A{};
  std::array<double, 3> rhs{};
  std::vector<std::array<double, 3>> rows(n);
  std::vector<double> ys(n);
  double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = remaining[i];
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("fit_type2_rate: need 0 < T - t < 1");
    if (!(lambda[i] > 0.0)) throw InvalidArgument("fit_type2_rate: lambda must be positive");
    smin = std::min(smin, s);
    smax = std::max(smax, s);
    const double ls = std::log(s), lls = std::log(-ls);
    double y = std::log(lambda[i]);
    if (fixed_b) {
      y -= *fixed_b * lls;
      rows[i] = {ls, 1.0, 0.0};
    } else {
      rows[i] = {ls, lls, 1.0};
    }
    ys[i] = y;
    for (int a = 0; a < p; ++a) {
      rhs[a] += rows[i][a] * y;
      for (int b = 0; b < p; ++b) A[a][b] += rows[i][a] * rows[i][b];
    }
  }
  // Invert the p x p normal matrix (Gauss-Jordan with partial pivoting).
  std::array<std::array<double, 3>, 3> inv{};
  for (int i = 0; i < p; ++i) inv[i][i] = 1.0;
  auto M = A;
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int r = c + 1; r < p; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    if (M[piv][c] == 0.0) throw NumericalError("fit_type2_rate: singular normal equations");
    std::swap(M[c], M[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = M[c][c];
    for (int k = 0; k < p; ++k) {
      M[c][k] /= d;
      inv[c][k] /= d;
    }
    for (int r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = M[r][c];
      for (int k = 0; k < p; ++k) {
        M[r][k] -= f * M[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  std::array<double, 3> coef{};
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < p; ++k) coef[i] += inv[i][k] * rhs[k];
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (int a = 0; a < p; ++a) fit += coef[a] * rows[i][a];
    rss += (ys[i] - fit) * (ys[i] - fit);
  }
  const double sigma2 = n > static_cast<std::size_t>(p) ? rss / static_cast<double>(n - p) : 0.0;
  RateFit out;
  out.a = coef[0];
  out.a_stderr = std::sqrt(std::max(0.0, sigma2 * inv[0][0]));
  if (fixed_b) {
    out.b = *fixed_b;
    out.c = coef[1];
    out.b_fixed = true;
  } else {
    out.b = coef[1];
    out.c = coef[2];
    out.b_stderr = std::sqrt(std::max(0.0, sigma2 * inv[1][1]));
  }
  out.residual = std::sqrt(rss / static_cast<double>(n));
  out.decades = std::log10(smax / smin);
  out.reliable = out.decades >= 2.0;
  return out;
}

RateFit fit_type2_rate(std::span<const RatePoint> trajectory, double T_est, std::optional<double> fixed_b) {
  std::vector<double> s, l;
  double tlo = std::numeric_limits<double>::infinity(), thi = -tlo;
  for (const auto& pt : trajectory) {
    if (!(pt.t < T_est)) throw InvalidArgument("fit_type2_rate: sample at or beyond T_est");
    s.push_back(T_est - pt.t);
    l.push_back(pt.lambda);
    tlo = std::min(tlo, pt.t);
    thi = std::max(thi, pt.t);
  }
  auto fit = fit_type2_rate_remaining(s, l, fixed_b);
  fit.T_est = T_est;
  fit.t_lo = tlo;
  fit.t_hi = thi;
  return fit;
}

TrackingReport track_uapp(std::shared_ptr<const BlowupProfile> profile, const TrackingOptions& o) {
  if (!profile) throw InvalidArgument("track_uapp: profile required");
  if (!(o.shrink > 1.0)) throw InvalidArgument("track_uapp: shrink must exceed 1");
  if (!(o.cells_per_lambda >= 4.0)) throw InvalidArgument("track_uapp: need at least 4 cells per lambda");
  const double s0 = std::exp(-o.tau0);
  const double lambda0 = rates_from_remaining(s0).lambda0;
  EvolverOptions eo;
  eo.scheme = Scheme::ImplicitRemainder;
  eo.target_change = o.target_change;
  eo.initial_dt = 1e-4 * s0;
  eo.blowup_threshold = 1e300;
  eo.allow_regrid = false;
  auto st = init(DataSpec::uapp(profile, o.tau0), o.domain_radius, {lambda0 / o.cells_per_lambda, o.growth, 20}, eo);

  TrackingReport rep;
  rep.nodes = st.grid.size();
  auto record = [&](const EvolutionState& s) {
    double sup = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      const double ua = profile->u_app(s.grid[i], s.remaining);
      sup = std::max(sup, std::abs(ua));
      dev = std::max(dev, std::abs(s.u[i] - ua));
    }
    rep.worst_deviation = std::max(rep.worst_deviation, dev / sup);
    if (s.u[0] > 0.0) {
      rep.remaining.push_back(s.remaining);
      rep.lambda.push_back(extract_lambda(s));
    }
  };
  record(st);
  evolve_remaining(st, s0 / o.shrink, o.max_steps, record);
  rep.status = st.status;
  rep.steps = st.step_count;
  rep.history.assign(st.history.begin(), st.history.end());
  rep.fit = fit_type2_rate_remaining(rep.remaining, rep.lambda, -15.0 / 8.0);
  rep.fit_free = fit_type2_rate_remaining(rep.remaining, rep.lambda);
  rep.fit.T_est = rep.fit_free.T_est = profile->T();
  return rep;
}

}  // namespace blowup
