#include "blowup6/selfsimilar_basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "blowup6/errors.hpp"
#include "blowup6/quadrature.hpp"

namespace blowup {

RadialPolynomial::RadialPolynomial(std::initializer_list<Rational> coeffs) : coeffs_(coeffs) {
  trim();
}
RadialPolynomial::RadialPolynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

void RadialPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

double RadialPolynomial::at_radius(double r) const {
  const double s = r * r;
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * s + coeffs_[k].to_double();
  return acc;
}

RadialPolynomial RadialPolynomial::ds() const {
  std::vector<Rational> d;
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    d.push_back(coeffs_[k] * Rational(static_cast<std::int64_t>(k)));
  return RadialPolynomial(std::move(d));
}

RadialPolynomial operator+(const RadialPolynomial& a, const RadialPolynomial& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
  return RadialPolynomial(std::move(c));
}

RadialPolynomial operator-(const RadialPolynomial& a, const RadialPolynomial& b) {
  return a + Rational(-1) * b;
}

RadialPolynomial operator*(const RadialPolynomial& a, const RadialPolynomial& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return {};
  std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return RadialPolynomial(std::move(c));
}

RadialPolynomial operator*(const Rational& s, const RadialPolynomial& a) {
  std::vector<Rational> c(a.coeffs_);
  for (auto& x : c) x *= s;
  return RadialPolynomial(std::move(c));
}

bool operator==(const RadialPolynomial& a, const RadialPolynomial& b) {
  return a.coeffs_ == b.coeffs_;
}

Rational gaussian_moment_ratio(int n, int k) {
  if (n % 2 != 0) throw InvalidArgument("gaussian_moment_ratio: odd n not supported");
  // int s^k e^{-s/4} s^{n/2-1} ds / int e^{-s/4} s^{n/2-1} ds = 4^k (n/2)_k
  Rational m(1);
  for (int j = 0; j < k; ++j) m *= Rational(4 * (j + n / 2));
  return m;
}

Rational rho_pairing_ratio(int n, const RadialPolynomial& f, const RadialPolynomial& g) {
  const RadialPolynomial fg = f * g;
  Rational acc(0);
  for (std::size_t k = 0; k < fg.coeffs().size(); ++k)
    acc += fg.coeffs()[k] * gaussian_moment_ratio(n, static_cast<int>(k));
  return acc;
}

namespace {

// int_{R^6} rho dz = (4 pi)^3.
double rho_mass6() { return 64.0 * std::pow(std::numbers::pi, 3); }

}  // namespace

double rho_inner_product(const RadialPolynomial& f, const RadialPolynomial& g) {
  return rho_mass6() * rho_pairing_ratio(6, f, g).to_double();
}

double rho_inner_product(const std::function<double(double)>& f,
                         const std::function<double(double)>& g) {
  auto integrand = [&](double r) {
    return f(r) * g(r) * std::exp(-0.25 * r * r) * std::pow(r, 5);
  };
  // Weighted integrand must be negligible and decaying at the cut.
  const double at40 = std::abs(integrand(40.0)), at60 = std::abs(integrand(60.0));
  if (!std::isfinite(at40) || !std::isfinite(at60) || at60 > at40 || at60 > 1e-30)
    throw InvalidArgument("rho_inner_product: integrand not Gaussian-dominated");
  QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  opts.rel_tol = 1e-14;
  const std::vector<double> breaks{0.0, 2.0, 4.0, 6.0, 9.0, 13.0, 20.0, 60.0};
  return kSphereArea6 * integrate_pieces(integrand, breaks, opts).value;
}

RadialPolynomial apply_Az(int n, const RadialPolynomial& f) {
  const RadialPolynomial s{Rational(0), Rational(1)};
  const RadialPolynomial d1 = f.ds();
  const RadialPolynomial d2 = d1.ds();
  return Rational(4) * (s * d2) + Rational(2 * n) * d1 - s * d1;
}

HermiteBasis build_basis(int n, double p) {
  if (n != 6) throw InvalidArgument("build_basis: only n = 6 is validated");
  HermiteBasis b;
  b.n = n;
  b.p = p;
  b.monic[0] = RadialPolynomial{Rational(1)};
  b.monic[1] = RadialPolynomial{Rational(-2 * n), Rational(1)};
  b.monic[2] = RadialPolynomial{Rational(4 * n * n + 8 * n), Rational(-(4 * n + 8)), Rational(1)};
  for (int i = 0; i < 3; ++i) {
    const double norm2 = rho_inner_product(b.monic[i], b.monic[i]);
    b.c[i] = 1.0 / std::sqrt(norm2);
  }
  b.alpha = compute_alpha(b);
  return b;
}

double compute_alpha(const HermiteBasis& basis) {
  const double c1 = basis.c[1];
  const double e1_cubed = c1 * c1 * c1 * rho_inner_product(basis.monic[1] * basis.monic[1], basis.monic[1]);
  const double pm1 = basis.p - 1.0;
  return 2.0 * pm1 * pm1 / basis.p / e1_cubed;
}

CubicMoments cubic_moments(const HermiteBasis& basis, double tol) {
  const double c1 = basis.c[1];
  const RadialPolynomial s{Rational(0), Rational(1)};
  CubicMoments m;
  m.e1_cubed = c1 * c1 * c1 * rho_inner_product(basis.monic[1] * basis.monic[1], basis.monic[1]);
  // |grad e_1|^2 = c_1^2 |2 z|^2 = 4 c_1^2 s.
  m.grad_e1_sq_e1 = 4.0 * c1 * c1 * c1 * rho_inner_product(s, basis.monic[1]);

  for (int k = 0; k <= 200; ++k) {
    const double r = 0.05 * k;
    const double lhs = basis.grad_e1_squared(r);
    const double rhs = 4.0 * c1 * basis.e(1, r) + 8.0 * basis.n * c1 * c1;
    m.max_pointwise_defect = std::max(m.max_pointwise_defect, std::abs(lhs - rhs) / (c1 * c1));
  }

  auto check = [tol](double got, double want, const char* what) {
    if (!(std::abs(got - want) <= tol * std::abs(want)))
      throw NumericalError(std::string("cubic_moments: ") + what + " = " + std::to_string(got) +
                           ", expected " + std::to_string(want));
  };
  check(m.e1_cubed, 8.0 * c1, "(e1^2, e1)_rho");
  check(m.grad_e1_sq_e1, 4.0 * c1, "(|grad e1|^2, e1)_rho");
  if (!(m.max_pointwise_defect <= tol * std::max(1.0, 8.0 * basis.n)))
    throw NumericalError("cubic_moments: pointwise gradient identity fails");
  return m;
}

}  // namespace blowup
