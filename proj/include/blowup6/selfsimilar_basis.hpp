#pragma once

#include <array>
#include <functional>
#include <vector>

#include "blowup6/rational.hpp"

namespace blowup {

/// Polynomial in s = |z|^2 with exact rational coefficients (coeffs[k] * s^k).
class RadialPolynomial {
 public:
  RadialPolynomial() = default;
  RadialPolynomial(std::initializer_list<Rational> coeffs);
  explicit RadialPolynomial(std::vector<Rational> coeffs);

  [[nodiscard]] const std::vector<Rational>& coeffs() const { return coeffs_; }
  [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] Rational coeff(std::size_t k) const {
    return k < coeffs_.size() ? coeffs_[k] : Rational(0);
  }
  /// Value at |z| = r.
  [[nodiscard]] double at_radius(double r) const;
  /// d/ds.
  [[nodiscard]] RadialPolynomial ds() const;

  friend RadialPolynomial operator+(const RadialPolynomial& a, const RadialPolynomial& b);
  friend RadialPolynomial operator-(const RadialPolynomial& a, const RadialPolynomial& b);
  friend RadialPolynomial operator*(const RadialPolynomial& a, const RadialPolynomial& b);
  friend RadialPolynomial operator*(const Rational& c, const RadialPolynomial& a);
  friend bool operator==(const RadialPolynomial& a, const RadialPolynomial& b);

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// |S^{n-1}| for n = 6.
inline constexpr double kSphereArea6 = 31.006276680299820175;  // pi^3

/// Gaussian moment ratio m_k = int |z|^{2k} rho dz / int rho dz in R^n,
/// rho = exp(-|z|^2/4); equals prod_{j<k} 4 (j + n/2).
Rational gaussian_moment_ratio(int n, int k);

/// (f, g)_rho / int rho dz, exact.
Rational rho_pairing_ratio(int n, const RadialPolynomial& f, const RadialPolynomial& g);

/// Full R^6 weighted inner products. The polynomial overload is closed form;
/// the function overload integrates |S^5| int_0^inf f g e^{-r^2/4} r^5 dr by
/// adaptive quadrature and rejects super-Gaussian growth.
double rho_inner_product(const RadialPolynomial& f, const RadialPolynomial& g);
double rho_inner_product(const std::function<double(double)>& f,
                         const std::function<double(double)>& g);

/// A_z f = Delta_z f - (z/2) . grad_z f for radial polynomials in s = |z|^2:
/// 4 s f'' + 2 n f' - s f'.
RadialPolynomial apply_Az(int n, const RadialPolynomial& f);

/// Polynomial eigenfunctions e_i = c_i P_i of -A_z (eigenvalue i) in L^2_rho(R^n),
/// normalized to ||e_i||_rho = 1 with positive leading coefficient.
struct HermiteBasis {
  int n = 6;
  double p = 2.0;
  std::array<RadialPolynomial, 3> monic;  // P_0, P_1, P_2
  std::array<double, 3> c{};              // normalization constants
  double alpha = 0.0;                     // 2(p-1)^2/p / (e_1^2, e_1)_rho

  [[nodiscard]] double e(int i, double r) const { return c[i] * monic[i].at_radius(r); }
  /// |grad_z e_1|^2 at |z| = r.
  [[nodiscard]] double grad_e1_squared(double r) const { return 4.0 * c[1] * c[1] * r * r; }
};

HermiteBasis build_basis(int n = 6, double p = 2.0);

struct CubicMoments {
  double e1_cubed = 0.0;       // (e_1^2, e_1)_rho
  double grad_e1_sq_e1 = 0.0;  // (|grad e_1|^2, e_1)_rho
  double max_pointwise_defect = 0.0;  // sup_z ||grad e_1|^2 - 4 c_1 e_1 - 8 n c_1^2| / c_1^2
};

/// Computes both cubic moments and checks them against 8 c_1 and 4 c_1, plus
/// the pointwise identity |grad e_1|^2 = 4 c_1 e_1 + 8 n c_1^2. Throws
/// NumericalError if any check misses `tol` (relative).
CubicMoments cubic_moments(const HermiteBasis& basis, double tol = 1e-8);

double compute_alpha(const HermiteBasis& basis);

}  // namespace blowup
