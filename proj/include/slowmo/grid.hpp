#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace slowmo {

/**
 * Cell-centered tensor grid on an interval (dim 1) or rectangle (dim 2).
 *
 * The domain has unit measure: extents are rescaled at construction when
 * their product is off by more than 1e-9 and rescaled() records it.
 * Cell (i, j) has center ((i+1/2) hx, (j+1/2) hy) and flat index j*nx + i.
 * In dim 1 the second axis is a single cell of unit extent.
 */
class DomainGrid {
 public:
  DomainGrid(int dim, std::vector<double> extents, std::vector<int> resolution);
  /// Coarse cell partition for exhaustive searches: any resolution >= 1.
  static DomainGrid partition(int dim, std::vector<double> extents, std::vector<int> resolution);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return lx_ / nx_; }
  double hy() const { return ly_ / ny_; }
  double spacing(int axis) const { return axis == 0 ? hx() : hy(); }
  double max_spacing() const;
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  double cell_volume() const { return hx() * hy(); }
  bool rescaled() const { return rescaled_; }

  double x(int i) const { return (i + 0.5) * hx(); }
  double y(int j) const { return dim_ == 1 ? 0.5 : (j + 0.5) * hy(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

  /// Geometry only; whether the extents were rescaled on input does not matter.
  bool operator==(const DomainGrid& o) const {
    return dim_ == o.dim_ && nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
  }

 private:
  DomainGrid(int dim, std::vector<double> extents, std::vector<int> resolution, int min_resolution);

  int dim_;
  int nx_;
  int ny_;
  double lx_;
  double ly_;
  bool rescaled_ = false;
};

DomainGrid make_grid(int dim, std::vector<double> extents, std::vector<int> resolution);

/// Cellwise scalar function on a DomainGrid; the grid is held by value.
class ScalarField {
 public:
  explicit ScalarField(const DomainGrid& grid, double value = 0.0);
  ScalarField(const DomainGrid& grid, std::vector<double> values);

  static ScalarField from_function(const DomainGrid& grid,
                                   const std::function<double(double, double)>& f);

  const DomainGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(int i, int j) { return values_[grid_.index(i, j)]; }
  double at(int i, int j) const { return values_[grid_.index(i, j)]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }

  bool all_finite() const;
  double min() const;
  double max() const;

 private:
  DomainGrid grid_;
  std::vector<double> values_;
};

/// Midpoint-rule integral; exact for cellwise-constant integrands.
double integrate(const ScalarField& field);
double integrate_abs(const ScalarField& field);

void require_same_grid(const ScalarField& a, const ScalarField& b);

double distance_l1(const ScalarField& a, const ScalarField& b);
double distance_l2(const ScalarField& a, const ScalarField& b);

}  // namespace slowmo
