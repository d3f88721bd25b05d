#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace blowup {

/// Samples of a radially symmetric function on a strictly increasing grid.
///
/// Every RadialFunction carries derivative samples: either supplied by the
/// producer (exact, e.g. from an ODE integration) or estimated at
/// construction with second-order nonuniform differences. Evaluation between
/// nodes is cubic Hermite, so the interpolant is C^1.
class RadialFunction {
 public:
  RadialFunction() = default;
  RadialFunction(std::vector<double> grid, std::vector<double> values);
  RadialFunction(std::vector<double> grid, std::vector<double> values,
                 std::vector<double> derivative);

  [[nodiscard]] std::span<const double> grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<const double> derivative() const { return deriv_; }
  [[nodiscard]] bool has_exact_derivative() const { return exact_deriv_; }
  [[nodiscard]] std::size_t size() const { return grid_.size(); }
  [[nodiscard]] bool empty() const { return grid_.empty(); }
  [[nodiscard]] double r_min() const { return grid_.front(); }
  [[nodiscard]] double r_max() const { return grid_.back(); }

  /// Cubic Hermite interpolation; throws outside [r_min, r_max].
  [[nodiscard]] double operator()(double r) const;
  [[nodiscard]] double derivative_at(double r) const;

  /// Derivative samples as a new function (second derivative estimated).
  [[nodiscard]] RadialFunction differentiate() const;

  /// Index i with grid[i] <= r < grid[i+1] (clamped to the last interval).
  [[nodiscard]] std::size_t locate(double r) const;

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> deriv_;
  bool exact_deriv_ = false;
};

/// Geometric grid r_min = r_0 < ... < r_{n-1} = r_max.
std::vector<double> geometric_grid(double r_min, double r_max, std::size_t nodes);

/// Grid starting at the origin: uniform spacing h0 up to r = core_cells*h0,
/// then cells growing geometrically by `growth` until r_max is reached.
/// The last node is exactly r_max.
std::vector<double> origin_clustered_grid(double h0, double growth, double r_max,
                                          std::size_t core_cells = 20);

/// Second-order first derivative on a nonuniform grid.
std::vector<double> nonuniform_first_derivative(std::span<const double> grid,
                                                std::span<const double> values);

/// Second-order second derivative on a nonuniform grid (one-sided, first
/// order, at the two endpoints).
std::vector<double> nonuniform_second_derivative(std::span<const double> grid,
                                                 std::span<const double> values);

void validate_grid(std::span<const double> grid);

}  // namespace blowup
