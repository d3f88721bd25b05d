#include "blowup6/radial_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blowup6/errors.hpp"

namespace blowup {

void validate_grid(std::span<const double> grid) {
  if (grid.size() < 3) throw InvalidArgument("radial grid needs at least 3 nodes");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0)
      throw InvalidArgument("radial grid node " + std::to_string(i) + " is negative or non-finite");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw InvalidArgument("radial grid not strictly increasing at node " + std::to_string(i));
  }
}

RadialFunction::RadialFunction(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  validate_grid(grid_);
  if (values_.size() != grid_.size()) throw InvalidArgument("values/grid size mismatch");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("RadialFunction value is not finite");
  deriv_ = nonuniform_first_derivative(grid_, values_);
}

RadialFunction::RadialFunction(std::vector<double> grid, std::vector<double> values,
                               std::vector<double> derivative)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      deriv_(std::move(derivative)),
      exact_deriv_(true) {
  validate_grid(grid_);
  if (values_.size() != grid_.size() || deriv_.size() != grid_.size())
    throw InvalidArgument("values/derivative/grid size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]) || !std::isfinite(deriv_[i]))
      throw InvalidArgument("RadialFunction sample is not finite");
}

std::size_t RadialFunction::locate(double r) const {
  auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
  std::size_t i = (it == grid_.begin()) ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
  return std::min(i, grid_.size() - 2);
}

double RadialFunction::operator()(double r) const {
  if (r < grid_.front() || r > grid_.back())
    throw InvalidArgument("RadialFunction evaluated outside its grid");
  const std::size_t i = locate(r);
  const double h = grid_[i + 1] - grid_[i];
  const double t = (r - grid_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * deriv_[i] +
         (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * deriv_[i + 1];
}

double RadialFunction::derivative_at(double r) const {
  if (r < grid_.front() || r > grid_.back())
    throw InvalidArgument("RadialFunction evaluated outside its grid");
  const std::size_t i = locate(r);
  const double h = grid_[i + 1] - grid_[i];
  const double t = (r - grid_[i]) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) / h * values_[i] + (3 * t2 - 4 * t + 1) * deriv_[i] +
         (-6 * t2 + 6 * t) / h * values_[i + 1] + (3 * t2 - 2 * t) * deriv_[i + 1];
}

RadialFunction RadialFunction::differentiate() const {
  return RadialFunction(grid_, deriv_, nonuniform_first_derivative(grid_, deriv_));
}

std::vector<double> geometric_grid(double r_min, double r_max, std::size_t nodes) {
  if (!(r_min > 0.0) || !(r_max > r_min) || nodes < 3)
    throw InvalidArgument("geometric_grid needs 0 < r_min < r_max and >= 3 nodes");
  std::vector<double> g(nodes);
  const double ratio = std::log(r_max / r_min) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) g[i] = r_min * std::exp(ratio * static_cast<double>(i));
  g.front() = r_min;
  g.back() = r_max;
  return g;
}

std::vector<double> origin_clustered_grid(double h0, double growth, double r_max,
                                          std::size_t core_cells) {
  if (!(h0 > 0.0) || !(growth >= 1.0) || !(r_max > h0 * static_cast<double>(core_cells)))
    throw InvalidArgument("origin_clustered_grid: need h0 > 0, growth >= 1, r_max > core");
  std::vector<double> g{0.0};
  double h = h0;
  for (std::size_t i = 0; i < core_cells; ++i) g.push_back(g.back() + h0);
  while (g.back() + h < r_max) {
    h *= growth;
    g.push_back(g.back() + h);
  }
  // Merge a short final cell into its neighbour.
  if (r_max - g.back() < 0.5 * h && g.size() > core_cells + 2) g.pop_back();
  g.push_back(r_max);
  return g;
}

std::vector<double> nonuniform_first_derivative(std::span<const double> x,
                                                std::span<const double> f) {
  const std::size_t n = x.size();
  if (n < 3 || f.size() != n) throw InvalidArgument("derivative needs >= 3 matching samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] +
           h1 / (h2 * (h1 + h2)) * f[i + 1];
  }
  {
    const double h1 = x[1] - x[0], h2 = x[2] - x[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
           h1 / (h2 * (h1 + h2)) * f[2];
  }
  {
    const double h1 = x[n - 2] - x[n - 3], h2 = x[n - 1] - x[n - 2];
    d[n - 1] = (2 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1] - (h1 + h2) / (h1 * h2) * f[n - 2] +
               h2 / (h1 * (h1 + h2)) * f[n - 3];
  }
  return d;
}

std::vector<double> nonuniform_second_derivative(std::span<const double> x,
                                                 std::span<const double> f) {
  const std::size_t n = x.size();
  if (n < 3 || f.size() != n) throw InvalidArgument("derivative needs >= 3 matching samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    d[i] = 2.0 / (h1 * (h1 + h2)) * f[i - 1] - 2.0 / (h1 * h2) * f[i] +
           2.0 / (h2 * (h1 + h2)) * f[i + 1];
  }
  d[0] = d[1];
  d[n - 1] = d[n - 2];
  return d;
}

}  // namespace blowup
