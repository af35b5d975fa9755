#include "slowmo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slowmo/error.hpp"

namespace slowmo {

namespace {
constexpr int kMinResolution = 8;
}

DomainGrid::DomainGrid(int dim, std::vector<double> extents, std::vector<int> resolution)
    : DomainGrid(dim, std::move(extents), std::move(resolution), kMinResolution) {}

DomainGrid DomainGrid::partition(int dim, std::vector<double> extents, std::vector<int> resolution) {
  return DomainGrid(dim, std::move(extents), std::move(resolution), 1);
}

DomainGrid::DomainGrid(int dim, std::vector<double> extents, std::vector<int> resolution,
                       int min_resolution)
    : dim_(dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  if (extents.size() != static_cast<std::size_t>(dim) ||
      resolution.size() != static_cast<std::size_t>(dim)) {
    throw InvalidArgument("grid needs one extent and one resolution per axis");
  }
  for (double e : extents) {
    if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("grid extents must be positive");
  }
  for (int n : resolution) {
    if (n < min_resolution) {
      throw InvalidArgument("grid resolution must be at least " + std::to_string(min_resolution) +
                            " cells per axis");
    }
  }
  double product = 1.0;
  for (double e : extents) product *= e;
  if (std::abs(product - 1.0) > 1e-9) {
    const double scale = std::pow(product, -1.0 / dim);
    for (double& e : extents) e *= scale;
    rescaled_ = true;
  }
  lx_ = extents[0];
  nx_ = resolution[0];
  if (dim == 2) {
    // Make the product exactly 1 in floating point as far as possible.
    ly_ = 1.0 / lx_;
    if (std::abs(extents[1] - ly_) > 1e-9) ly_ = extents[1];
    ny_ = resolution[1];
  } else {
    lx_ = 1.0;
    ly_ = 1.0;
    ny_ = 1;
  }
}

double DomainGrid::max_spacing() const {
  return dim_ == 1 ? hx() : std::max(hx(), hy());
}

DomainGrid make_grid(int dim, std::vector<double> extents, std::vector<int> resolution) {
  return DomainGrid(dim, std::move(extents), std::move(resolution));
}

ScalarField::ScalarField(const DomainGrid& grid, double value)
    : grid_(grid), values_(grid.size(), value) {
  if (!std::isfinite(value)) throw NumericalError("field value must be finite");
}

ScalarField::ScalarField(const DomainGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field value count " + std::to_string(values_.size()) +
                          " does not match grid cell count " + std::to_string(grid_.size()));
  }
  if (!all_finite()) throw NumericalError("field contains non-finite values");
}

ScalarField ScalarField::from_function(const DomainGrid& grid,
                                       const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) out.at(i, j) = f(grid.x(i), grid.y(j));
  if (!out.all_finite()) throw NumericalError("field function produced non-finite values");
  return out;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double integrate(const ScalarField& field) {
  double sum = 0.0;
  for (double v : field.values()) sum += v;
  return sum * field.grid().cell_volume();
}

double integrate_abs(const ScalarField& field) {
  double sum = 0.0;
  for (double v : field.values()) sum += std::abs(v);
  return sum * field.grid().cell_volume();
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
}

double distance_l1(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return sum * a.grid().cell_volume();
}

double distance_l2(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum * a.grid().cell_volume());
}

}  // namespace slowmo
