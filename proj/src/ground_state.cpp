#include "blowup6/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blowup6/errors.hpp"
#include "blowup6/ode.hpp"
#include "blowup6/quadrature.hpp"
#include "blowup6/tridiagonal.hpp"

namespace blowup {

GroundStateModel GroundStateModel::dimension_six() {
  GroundStateModel m;
  m.n = 6;
  m.p = static_cast<double>(m.n + 2) / static_cast<double>(m.n - 2);
  m.core_scale2 = static_cast<double>(m.n * (m.n - 2));
  m.kappa = std::pow(m.core_scale2, 0.5 * m.n) / (2.0 * m.n);
  return m;
}

double GroundStateModel::Q(double r, double lambda) const {
  if (!(lambda > 0.0)) throw InvalidArgument("eval_Q: scale lambda must be positive");
  const double h = 0.5 * (n - 2);
  const double x = r * r / (core_scale2 * lambda * lambda);
  return std::pow(lambda, -h) * std::pow(1.0 + x, -h);
}

double GroundStateModel::dQ(double r, double lambda) const {
  if (!(lambda > 0.0)) throw InvalidArgument("eval_Q: scale lambda must be positive");
  const double h = 0.5 * (n - 2);
  const double x = r * r / (core_scale2 * lambda * lambda);
  return -(n - 2) * r / (core_scale2 * lambda * lambda) * std::pow(lambda, -h) *
         std::pow(1.0 + x, -0.5 * n);
}

double GroundStateModel::LambdaQ(double r) const {
  const double x = r * r / core_scale2;
  return 0.5 * (n - 2) * (1.0 - x) * std::pow(1.0 + x, -0.5 * n);
}

double GroundStateModel::dLambdaQ(double r) const {
  const double x = r * r / core_scale2;
  return 0.5 * (n - 2) * (-2.0 * r / core_scale2) * std::pow(1.0 + x, -0.5 * n - 1.0) *
         ((1.0 + x) + 0.5 * n * (1.0 - x));
}

double GroundStateModel::V(double r) const { return p * std::pow(Q(r), p - 1.0); }

double GroundStateModel::LambdaQ_zero() const { return std::sqrt(core_scale2); }

double GroundStateModel::gamma_tail_constant() const { return -1.0 / (kappa * (n - 2)); }

double eval_Q(double r, double lambda) {
  if (r < 0.0) throw InvalidArgument("eval_Q: negative radius");
  return GroundStateModel::dimension_six().Q(r, lambda);
}
double eval_LambdaQ(double r) { return GroundStateModel::dimension_six().LambdaQ(r); }
double eval_V(double r) { return GroundStateModel::dimension_six().V(r); }

namespace {

QuadratureOptions tight() {
  QuadratureOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-14;
  o.max_panels = 200;
  o.throw_on_failure = false;
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// Second solution

double SecondSolution::value(double r) const {
  if (r <= gamma.r_max()) return gamma(r);
  auto f = [&](double s) {
    const double l = model.LambdaQ(s);
    return 1.0 / (l * l * std::pow(s, model.n - 1));
  };
  const double I = representation_integral_at_rmax + integrate(f, gamma.r_max(), r, tight()).value;
  return model.LambdaQ(r) * I;
}

double SecondSolution::derivative(double r) const {
  if (r <= gamma.r_max()) return gamma.derivative_at(r);
  auto f = [&](double s) {
    const double l = model.LambdaQ(s);
    return 1.0 / (l * l * std::pow(s, model.n - 1));
  };
  const double I = representation_integral_at_rmax + integrate(f, gamma.r_max(), r, tight()).value;
  const double l = model.LambdaQ(r);
  return model.dLambdaQ(r) * I + 1.0 / (l * std::pow(r, model.n - 1));
}

double SecondSolution::wronskian(double r) const {
  return (derivative(r) * model.LambdaQ(r) - value(r) * model.dLambdaQ(r)) *
         std::pow(r, model.n - 1);
}

SecondSolution build_Gamma(const GroundStateModel& model, double anchor_radius,
                           const GammaGridSpec& spec, double wronskian_tol) {
  const double zero = model.LambdaQ_zero();
  if (!(anchor_radius >= zero + 0.5))
    throw InvalidArgument("build_Gamma: anchor radius " + std::to_string(anchor_radius) +
                          " too close to the zero of Lambda Q at " + std::to_string(zero));
  if (!(spec.r_min > 0.0 && spec.r_min <= 0.05) || !(spec.r_max >= 50.0))
    throw InvalidArgument("build_Gamma: grid must cover r_min <= 0.05 and r_max >= 50");
  if (!(anchor_radius < spec.r_max))
    throw InvalidArgument("build_Gamma: anchor radius must lie inside the grid");

  const auto grid = geometric_grid(spec.r_min, spec.r_max, spec.nodes);
  const std::size_t N = grid.size();
  std::vector<double> g(N), dg(N);
  const int n = model.n;

  auto integrand = [&](double s) {
    const double l = model.LambdaQ(s);
    return 1.0 / (l * l * std::pow(s, n - 1));
  };
  auto split = static_cast<std::size_t>(
      std::lower_bound(grid.begin(), grid.end(), anchor_radius) - grid.begin());

  // Outward: integral representation, accumulated interval by interval.
  double I = 0.0, prev = anchor_radius;
  for (std::size_t i = split; i < N; ++i) {
    I += integrate(integrand, prev, grid[i], tight()).value;
    prev = grid[i];
    const double l = model.LambdaQ(grid[i]);
    g[i] = l * I;
    dg[i] = model.dLambdaQ(grid[i]) * I + 1.0 / (l * std::pow(grid[i], n - 1));
  }

  // Inward: H_y Gamma = 0 is regular across r = sqrt(n(n-2)).
  const double l0 = model.LambdaQ(anchor_radius);
  auto rhs = [&](double r, const OdeState<2>& y) {
    return OdeState<2>{y[1], -(n - 1) / r * y[1] - model.V(r) * y[0]};
  };
  OdeOptions opts;
  opts.rtol = 1e-13;
  opts.atol = 1e-300;
  auto ode = make_dormand_prince<2>(rhs, anchor_radius,
                                    OdeState<2>{0.0, 1.0 / (l0 * std::pow(anchor_radius, n - 1))},
                                    opts);
  for (std::size_t k = split; k-- > 0;) {
    const auto& y = ode.advance(grid[k]);
    g[k] = y[0];
    dg[k] = y[1];
  }

  SecondSolution out;
  out.model = model;
  out.tail_constant = model.gamma_tail_constant();
  out.anchor_radius = anchor_radius;
  out.representation_integral_at_rmax = I;
  out.gamma = RadialFunction(grid, std::move(g), std::move(dg));

  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = grid[i];
    const double w = (out.gamma.derivative()[i] * model.LambdaQ(r) -
                      out.gamma.values()[i] * model.dLambdaQ(r)) *
                     std::pow(r, n - 1);
    worst = std::max(worst, std::abs(w - 1.0));
  }
  out.max_wronskian_deviation = worst;
  if (!(worst <= wronskian_tol))
    throw NumericalError("build_Gamma: Wronskian drift " + std::to_string(worst) +
                         " exceeds tolerance");
  return out;
}

// ---------------------------------------------------------------------------
// Inhomogeneous solve

namespace {

void check_tail(const std::function<double(double)>& g, double r_max) {
  const double far = std::abs(g(r_max)), mid = std::abs(g(0.1 * r_max));
  if (!std::isfinite(far) || !std::isfinite(mid))
    throw InvalidArgument("solve_inhomogeneous: source is not finite on the grid");
  if (far == 0.0 || mid == 0.0) return;
  // Decay exponent over the last decade; bounded T needs roughly r^{-4}.
  const double k = std::log10(far / mid);
  if (k > -3.5)
    throw InvalidArgument("solve_inhomogeneous: source tail decays like r^" + std::to_string(k) +
                          ", too slowly for a bounded solution");
}

double gk15(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod15(f, a, b).first;
}

}  // namespace

RadialFunction solve_inhomogeneous(const SecondSolution& gamma,
                                   const std::function<double(double)>& g) {
  const auto& model = gamma.model;
  const auto grid = gamma.gamma.grid();
  const std::size_t N = grid.size();
  const int n = model.n;
  check_tail(g, grid.back());

  std::function<double(double)> fa = [&](double s) {
    return model.LambdaQ(s) * g(s) * std::pow(s, n - 1);
  };
  std::function<double(double)> fb = [&](double s) {
    return gamma.gamma(s) * g(s) * std::pow(s, n - 1);
  };

  // Below the first node: LambdaQ, g ~ const and Gamma ~ C r^{-(n-2)}.
  const double r0 = grid[0];
  double A = model.LambdaQ(0.0) * g(r0) * std::pow(r0, n) / n;
  double B = gamma.gamma.values()[0] * std::pow(r0, n - 2) * g(r0) * r0 * r0 / 2.0;

  std::vector<double> t(N), dt(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) {
      A += gk15(fa, grid[i - 1], grid[i]);
      B += gk15(fb, grid[i - 1], grid[i]);
    }
    const double G = gamma.gamma.values()[i], dG = gamma.gamma.derivative()[i];
    const double L = model.LambdaQ(grid[i]), dL = model.dLambdaQ(grid[i]);
    t[i] = G * A - L * B;
    dt[i] = dG * A - dL * B;
    if (!std::isfinite(t[i]) || !std::isfinite(dt[i]))
      throw NumericalError("solve_inhomogeneous: non-finite solution");
  }
  return RadialFunction(std::vector<double>(grid.begin(), grid.end()), std::move(t), std::move(dt));
}

RadialFunction solve_inhomogeneous(const SecondSolution& gamma, const RadialFunction& g) {
  const auto grid = gamma.gamma.grid();
  if (g.r_min() > grid.front() * (1 + 1e-12) || g.r_max() < grid.back() * (1 - 1e-12))
    throw InvalidArgument("solve_inhomogeneous: source does not cover the solver grid");
  const double lo = g.r_min(), hi = g.r_max();
  return solve_inhomogeneous(gamma, [&g, lo, hi](double r) { return g(std::clamp(r, lo, hi)); });
}

std::vector<double> apply_H(const GroundStateModel& model, const RadialFunction& f) {
  const auto x = f.grid();
  const auto v = f.values();
  const auto d2 = nonuniform_second_derivative(x, v);
  const auto d1 = nonuniform_first_derivative(x, v);
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    out[i] = d2[i] + (model.n - 1) / x[i] * d1[i] + model.V(x[i]) * v[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Direct BVP

RadialFunction solve_radial_bvp(const GroundStateModel& model, std::span<const double> grid,
                                const std::function<double(double)>& g, double t0) {
  validate_grid(grid);
  if (grid.front() != 0.0) throw InvalidArgument("solve_radial_bvp: grid must start at the origin");
  const std::size_t N = grid.size();
  if (N < 5) throw InvalidArgument("solve_radial_bvp: grid too small");
  const int n = model.n;
  Tridiagonal A(N);
  std::vector<double> rhs(N, 0.0);

  // Finite volumes around each node; zero flux through the origin keeps the
  // singular homogeneous mode out.
  auto face = [&](std::size_t i) {  // r^{n-1} / h at the face between i and i+1
    const double rm = 0.5 * (grid[i] + grid[i + 1]);
    return std::pow(rm, n - 1) / (grid[i + 1] - grid[i]);
  };
  auto volume = [&](std::size_t i) {
    const double a = i == 0 ? 0.0 : 0.5 * (grid[i - 1] + grid[i]);
    const double b = 0.5 * (grid[i] + grid[i + 1]);
    return (std::pow(b, n) - std::pow(a, n)) / n;
  };
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double w = volume(i);
    const double fp = face(i) / w;
    const double fm = i == 0 ? 0.0 : face(i - 1) / w;
    if (i > 0) A.lower[i - 1] = fm;
    A.diag[i] = -fp - fm + model.V(grid[i]);
    A.upper[i] = fp;
    rhs[i] = g(grid[i]);
  }
  // Far field: r^3 T' constant across the last two cells.
  {
    const double h1 = grid[N - 2] - grid[N - 3], h2 = grid[N - 1] - grid[N - 2];
    const double ra = std::pow(0.5 * (grid[N - 1] + grid[N - 2]), 3) / h2;
    const double rb = std::pow(0.5 * (grid[N - 2] + grid[N - 3]), 3) / h1;
    double cm2 = rb, cm1 = -ra - rb, cn = ra;
    // Eliminate the T_{N-3} entry with row N-2 to stay tridiagonal.
    const double f = cm2 / A.lower[N - 3];
    cm1 -= f * A.diag[N - 2];
    cn -= f * A.upper[N - 2];
    A.lower[N - 2] = cm1;
    A.diag[N - 1] = cn;
    rhs[N - 1] = -f * rhs[N - 2];
  }
  auto t = solve_tridiagonal(A, rhs);
  // Fix the Lambda Q kernel component by the value at the origin.
  const double c = (t0 - t[0]) / model.LambdaQ(0.0);
  for (std::size_t i = 0; i < N; ++i) t[i] += c * model.LambdaQ(grid[i]);
  return RadialFunction(std::vector<double>(grid.begin(), grid.end()), std::move(t));
}

// ---------------------------------------------------------------------------
// T1

double CorrectorT1::value(double r) const {
  const auto& f = by_variation_of_parameters;
  if (r < f.r_min()) return f.values()[0] * (r / f.r_min()) * (r / f.r_min());
  if (r > f.r_max()) return limit + tail_coefficient / (r * r);
  return f(r);
}

double CorrectorT1::derivative(double r) const {
  const auto& f = by_variation_of_parameters;
  if (r < f.r_min()) return 2.0 * f.values()[0] * r / (f.r_min() * f.r_min());
  if (r > f.r_max()) return -2.0 * tail_coefficient / (r * r * r);
  return f.derivative_at(r);
}

CorrectorT1 build_T1(const SecondSolution& gamma, double cross_tol) {
  const auto& model = gamma.model;
  const int n = model.n;
  CorrectorT1 out;
  auto source = [&model](double r) { return -model.LambdaQ(r); };
  out.by_variation_of_parameters = solve_inhomogeneous(gamma, source);

  // The two pieces of the representation, kept for inspection.
  {
    const auto grid = gamma.gamma.grid();
    std::vector<double> p1(grid.size()), p2(grid.size());
    std::function<double(double)> fa = [&](double s) {
      const double l = model.LambdaQ(s);
      return l * l * std::pow(s, n - 1);
    };
    std::function<double(double)> fb = [&](double s) {
      return gamma.gamma(s) * model.LambdaQ(s) * std::pow(s, n - 1);
    };
    const double r0 = grid[0];
    double A = model.LambdaQ(0.0) * model.LambdaQ(0.0) * std::pow(r0, n) / n;
    double B = gamma.gamma.values()[0] * std::pow(r0, n - 2) * model.LambdaQ(0.0) * r0 * r0 / 2.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i > 0) {
        A += gk15(fa, grid[i - 1], grid[i]);
        B += gk15(fb, grid[i - 1], grid[i]);
      }
      p1[i] = -gamma.gamma.values()[i] * A;
      p2[i] = model.LambdaQ(grid[i]) * B;
    }
    std::vector<double> g(grid.begin(), grid.end());
    out.split_prime = RadialFunction(g, std::move(p1));
    out.split_double_prime = RadialFunction(std::move(g), std::move(p2));
  }

  // Independent route: finite differences with T(0) = 0 and far-field flux condition.
  std::vector<double> bvp_grid{0.0};
  for (double r : gamma.gamma.grid()) bvp_grid.push_back(r);
  out.by_direct_bvp = solve_radial_bvp(model, bvp_grid, source, 0.0);

  double sup = 0.0, dev = 0.0;
  for (std::size_t i = 0; i < gamma.gamma.size(); ++i) {
    const double r = gamma.gamma.grid()[i];
    if (r > 50.0) break;
    const double a = out.by_variation_of_parameters.values()[i];
    const double b = out.by_direct_bvp.values()[i + 1];
    sup = std::max(sup, std::abs(a));
    dev = std::max(dev, std::abs(a - b));
  }
  out.max_route_deviation = dev / sup;
  if (!(out.max_route_deviation <= cross_tol))
    throw NumericalError("build_T1: variation-of-parameters and BVP routes disagree by " +
                         std::to_string(out.max_route_deviation));

  const auto integral = integral_LambdaQ_squared(model);
  out.limit = -gamma.tail_constant * integral.raw;
  const auto& f = out.by_variation_of_parameters;
  out.tail_coefficient = (f.values().back() - out.limit) * f.r_max() * f.r_max();
  return out;
}

// ---------------------------------------------------------------------------
// int (Lambda Q)^2 r^{n-1}

LambdaQIntegral integral_LambdaQ_squared(const GroundStateModel& model, double cut) {
  if (model.n != 6) throw InvalidArgument("integral_LambdaQ_squared: only n = 6 is supported");
  const int n = model.n;
  LambdaQIntegral out;
  out.normalization = std::pow(0.5 * (n - 2), 2) * std::pow(model.core_scale2, 0.5 * n) / 2.0;
  auto f = [&](double r) {
    const double l = model.LambdaQ(r);
    return l * l * std::pow(r, n - 1);
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-10;
  opts.rel_tol = 1e-15;
  // Breakpoints at the bubble scale and the zero of Lambda Q.
  const std::vector<double> breaks{0.0, 1.0, model.LambdaQ_zero(), 10.0, 25.0, 50.0, cut};
  const auto q = integrate_pieces(f, breaks, opts);
  if (!q.converged) throw NumericalError("integral_LambdaQ_squared: quadrature did not converge");
  const std::vector<double> head{0.0, 1.0, model.LambdaQ_zero(), 10.0, 25.0, 50.0};
  out.truncated_raw = integrate_pieces(f, head, opts).value;

  // Tail: with w = 1/s, s = r^2/24, the reduced integrand beyond S = cut^2/24
  // is (1-w)^2 (1+w)^{-6} dw on (0, 1/S); integrate its Taylor series.
  const double w_max = model.core_scale2 / (cut * cut);
  std::vector<double> series(40, 0.0);
  {
    double binom = 1.0;  // C(k+5, 5)
    for (int k = 0; k < 40; ++k) {
      if (k > 0) binom = binom * (k + 5) / k;
      const double c = (k % 2 == 0 ? 1.0 : -1.0) * binom;
      for (int j = 0; j <= 2 && k + j < 40; ++j)
        series[k + j] += c * (j == 0 ? 1.0 : (j == 1 ? -2.0 : 1.0));
    }
  }
  double tail_reduced = 0.0, wp = w_max;
  for (int k = 0; k < 40; ++k, wp *= w_max) tail_reduced += series[k] * wp / (k + 1);
  out.tail = out.normalization * tail_reduced;

  out.raw = q.value + out.tail;
  out.raw_error = q.error;
  out.reduced = out.raw / out.normalization;
  out.panels = q.panels;
  return out;
}

Rational reduced_integral_partial_fractions(const GroundStateModel& model) {
  if (model.n != 6) throw InvalidArgument("partial fractions implemented for n = 6");
  // (1-s)^2 s^2 (1+s)^{-6} with t = 1+s: numerator (t-2)^2 (t-1)^2.
  std::vector<Rational> poly{Rational(1)};
  auto mul = [&poly](Rational c0, Rational c1) {  // multiply by (c0 + c1 t)
    std::vector<Rational> out(poly.size() + 1, Rational(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      out[i] += poly[i] * c0;
      out[i + 1] += poly[i] * c1;
    }
    poly = std::move(out);
  };
  mul(-2, 1);
  mul(-2, 1);
  mul(-1, 1);
  mul(-1, 1);
  // int_1^inf t^{j-6} dt = 1/(5-j) for j <= 4.
  Rational total(0);
  for (std::size_t j = 0; j < poly.size(); ++j) {
    if (poly[j].is_zero()) continue;
    if (j >= 5) throw NumericalError("partial fractions: divergent term");
    total += poly[j] / Rational(static_cast<std::int64_t>(5 - j));
  }
  return total;
}

}  // namespace blowup
