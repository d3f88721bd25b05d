#include "blowup6/energy.hpp"

#include <algorithm>
#include <cmath>

#include "blowup6/errors.hpp"
#include "blowup6/ground_state.hpp"
#include "blowup6/quadrature.hpp"
#include "blowup6/selfsimilar_basis.hpp"

namespace blowup {

namespace {

QuadratureOptions options(const EnergyQuadrature& q) {
  QuadratureOptions o;
  o.abs_tol = 0.0;
  o.rel_tol = q.rel_tol;
  o.max_panels = q.max_panels;
  return o;
}

// int_0^1 f(r) r^5 dr with log-spaced breakpoints around the given scales.
QuadratureResult radial_integral(const std::function<double(double)>& f, std::span<const double> scales,
                                 const EnergyQuadrature& q) {
  double smallest = 1.0;
  for (double s : scales)
    if (s > 0.0) smallest = std::min(smallest, s);
  const double r0 = 1e-4 * smallest;
  std::vector<double> breaks{std::log(r0)};
  std::vector<double> pts;
  for (double s : scales)
    if (s > r0 && s < 1.0) pts.push_back(std::log(s));
  std::sort(pts.begin(), pts.end());
  for (double p : pts)
    if (p > breaks.back()) breaks.push_back(p);
  breaks.push_back(0.0);
  auto g = [&f](double xi) {
    const double r = std::exp(xi);
    return f(r) * std::pow(r, 6);  // r^5 dr = r^6 dxi
  };
  auto res = integrate_pieces(g, breaks, options(q));
  auto core = integrate([&f](double r) { return f(r) * std::pow(r, 5); }, 0.0, r0, options(q));
  res.value += core.value;
  res.error += core.error;
  return res;
}

}  // namespace

EnergyReport local_energy(const std::function<double(double)>& u, const std::function<double(double)>& du,
                          std::span<const double> scales, const EnergyQuadrature& q) {
  if (!u || !du) throw InvalidArgument("local_energy: value and derivative are required");
  const auto g = radial_integral([&du](double r) { const double d = du(r); return d * d; }, scales, q);
  const auto c = radial_integral([&u](double r) { const double v = std::abs(u(r)); return v * v * v; }, scales, q);
  EnergyReport rep;
  rep.grad_term = 0.5 * kSphereArea6 * g.value;
  rep.cubic_term = kSphereArea6 * c.value / 3.0;
  rep.grad_error = 0.5 * kSphereArea6 * g.error;
  rep.cubic_error = kSphereArea6 * c.error / 3.0;
  rep.e_loc = rep.grad_term - rep.cubic_term;
  return rep;
}

EnergyReport local_energy(const RadialFunction& u, const EnergyQuadrature& q) {
  if (u.size() < 3) throw InvalidArgument("local_energy: need at least 3 samples to differentiate");
  if (u.r_min() > 0.0 || u.r_max() < 1.0) throw InvalidArgument("local_energy: samples must cover [0, 1]");
  // Piecewise integration between nodes inside the unit ball.
  std::vector<double> breaks;
  for (double r : u.grid())
    if (r < 1.0) breaks.push_back(r);
  breaks.push_back(1.0);
  QuadratureOptions o = options(q);
  auto g = integrate_pieces([&u](double r) { const double d = u.derivative_at(r); return d * d * std::pow(r, 5); },
                            breaks, o);
  auto c = integrate_pieces([&u](double r) { const double v = std::abs(u(r)); return v * v * v * std::pow(r, 5); },
                            breaks, o);
  EnergyReport rep;
  rep.grad_term = 0.5 * kSphereArea6 * g.value;
  rep.cubic_term = kSphereArea6 * c.value / 3.0;
  rep.grad_error = 0.5 * kSphereArea6 * g.error;
  rep.cubic_error = kSphereArea6 * c.error / 3.0;
  rep.e_loc = rep.grad_term - rep.cubic_term;
  return rep;
}

EnergyReport local_energy_Q(double lambda, const EnergyQuadrature& q) {
  if (!(lambda > 0.0)) throw InvalidArgument("local_energy_Q: lambda must be positive");
  const auto m = GroundStateModel::dimension_six();
  const std::vector<double> scales{lambda, 10.0 * lambda};
  return local_energy([&](double r) { return m.Q(r, lambda); }, [&](double r) { return m.dQ(r, lambda); }, scales, q);
}

EnergyReport local_energy_uapp(const BlowupProfile& profile, double tau, const EnergyQuadrature& q) {
  if (!(tau >= 10.0 && tau <= 45.0)) throw InvalidArgument("local_energy_uapp: tau outside [10, 45]");
  const double s = std::exp(-tau);
  const auto r = rates_from_remaining(s);
  const double rs = std::sqrt(s);
  const std::vector<double> scales{r.lambda0, 10.0 * r.lambda0, rs / tau, 2.0 * rs / tau, rs, std::sqrt(tau) * rs};
  auto rep = local_energy([&](double x) { return profile.u_app(x, s); },
                          [&](double x) { return profile.u_app_dx(x, s); }, scales, q);
  rep.tau = tau;
  rep.t = profile.T() - s;
  return rep;
}

double ThetaIntegrals::I3_ratio() const { return I3 / (tau * tau * tau * std::log(tau)); }
double ThetaIntegrals::Igrad_ratio() const { return Igrad / (tau * tau * std::log(tau)); }

ThetaIntegrals theta_scaling_integrals(const HermiteBasis& basis, double tau, double alpha) {
  if (!(tau >= 10.0)) throw InvalidArgument("theta_scaling_integrals: tau must be >= 10");
  if (alpha == 0.0) alpha = basis.alpha;
  const double c1 = basis.c[1];
  const double b0 = basis.monic[1].coeff(0).to_double();
  const double a = alpha * c1 / tau;
  if (!(1.0 + a * b0 > 0.0)) throw InvalidArgument("theta_scaling_integrals: Theta base not positive");
  QuadratureOptions o;
  o.abs_tol = 0.0;
  o.rel_tol = 1e-11;
  o.max_panels = 200000;
  ThetaIntegrals out;
  out.tau = tau;
  const double Z = std::pow(tau, 19.0 / 30.0);
  // Breakpoint at the crossover |z| ~ sqrt(tau / (alpha c1)).
  const double zc = std::sqrt(1.0 / a);
  std::vector<double> br{0.0};
  if (zc < Z) br.push_back(zc);
  br.push_back(Z);
  auto f3 = [&](double z) { const double w = 1.0 / (1.0 + a * (z * z + b0)); return w * w * w * std::pow(z, 5); };
  auto f3f = [&](double z) { const double w = 1.0 / (1.0 + a * z * z); return w * w * w * std::pow(z, 5); };
  out.I3 = kSphereArea6 * integrate_pieces(f3, br, o).value;
  out.I3_floor = kSphereArea6 * integrate_pieces(f3f, br, o).value;
  // |grad_z f|^2 z^6 with f = (1 + a(z^2 + b0))^{-1}, over |z| < e^{tau/2}, in log z. With q = a z^2
  // the integrand is (4/a^2) (q / (1 + a b0 + q))^4, evaluated through log q so that it saturates
  // instead of overflowing.
  const double lz_max = 0.5 * tau;
  const double base0 = 1.0 + a * b0;
  auto fg = [&](double lz) {
    const double lq = std::log(a) + 2.0 * lz;
    const double ratio = 1.0 / (1.0 + base0 * std::exp(-lq));
    const double r2 = ratio * ratio;
    return 4.0 / (a * a) * r2 * r2;
  };
  const double lz_min = std::log(1e-3);
  std::vector<double> lbr{lz_min};
  if (std::log(zc) > lz_min && std::log(zc) < lz_max) lbr.push_back(std::log(zc));
  // Beyond |z| = 40 zc the integrand is flat; a breakpoint there keeps the panels honest.
  const double lz_flat = std::log(40.0 * zc);
  if (lz_flat > lbr.back() && lz_flat < lz_max) lbr.push_back(lz_flat);
  lbr.push_back(lz_max);
  const double head = integrate([&](double z) {
                        const double base = base0 + a * z * z;
                        const double df = 2.0 * a * z / (base * base);
                        return df * df * std::pow(z, 5);
                      }, 0.0, 1e-3, o).value;
  out.Igrad = kSphereArea6 * (head + integrate_pieces(fg, lbr, o).value);
  if (!std::isfinite(out.I3) || !std::isfinite(out.Igrad))
    throw NumericalError("theta_scaling_integrals: non-finite integral at tau = " + std::to_string(tau));
  return out;
}

}  // namespace blowup
