#include "blowup6/tridiagonal.hpp"

#include <cmath>

#include "blowup6/errors.hpp"

namespace blowup {

std::vector<double> solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs) {
  const std::size_t n = a.size();
  if (rhs.size() != n || n == 0) throw InvalidArgument("solve_tridiagonal: size mismatch");
  // Same elimination as LAPACK dgtsv; after a row swap dl[i] holds the fill-in
  // on the second superdiagonal.
  std::vector<double> dl(a.lower), d(a.diag), du(a.upper);
  std::vector<double> b(rhs.begin(), rhs.end());

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) throw NumericalError("solve_tridiagonal: singular matrix");
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double tmp = d[i + 1];
      d[i + 1] = du[i] - fact * tmp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = tmp;
      const double bi = b[i];
      b[i] = b[i + 1];
      b[i + 1] = bi - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) throw NumericalError("solve_tridiagonal: singular matrix");

  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t k = n - 2; k-- > 0;) b[k] = (b[k] - du[k] * b[k + 1] - dl[k] * b[k + 2]) / d[k];
  return b;
}

std::vector<double> multiply(const Tridiagonal& a, std::span<const double> x) {
  const std::size_t n = a.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = a.diag[i] * x[i];
    if (i > 0) s += a.lower[i - 1] * x[i - 1];
    if (i + 1 < n) s += a.upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

}  // namespace blowup
