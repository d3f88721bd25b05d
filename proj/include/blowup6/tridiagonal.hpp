#pragma once

#include <span>
#include <vector>

namespace blowup {

/// Tridiagonal system A x = b, row i: lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1].
/// `lower` and `upper` have n-1 entries.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n ? n - 1 : 0), diag(n), upper(n ? n - 1 : 0) {}
  [[nodiscard]] std::size_t size() const { return diag.size(); }
};

/// Gaussian elimination with partial pivoting (the indefinite systems of the
/// implicit blowup stepper need it). Throws NumericalError on an exactly
/// singular pivot.
std::vector<double> solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs);

/// y = A x.
std::vector<double> multiply(const Tridiagonal& a, std::span<const double> x);

}  // namespace blowup
