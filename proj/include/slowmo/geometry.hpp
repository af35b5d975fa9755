#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "slowmo/grid.hpp"
#include "slowmo/potential.hpp"

namespace slowmo {

/// Subset of grid cells. Volume and l1 perimeter are cached at construction.
class IndicatorSet {
 public:
  IndicatorSet(const DomainGrid& grid, std::vector<std::uint8_t> members);
  static IndicatorSet empty(const DomainGrid& grid);
  /// {u <= s}
  static IndicatorSet sublevel(const ScalarField& u, double s);

  const DomainGrid& grid() const { return grid_; }
  bool contains(std::size_t k) const { return members_[k] != 0; }
  bool contains(int i, int j) const { return members_[grid_.index(i, j)] != 0; }
  const std::vector<std::uint8_t>& members() const { return members_; }
  std::size_t count() const { return count_; }
  double volume() const { return volume_; }
  /// Interior member/non-member edges weighted by the transverse spacing.
  double perimeter() const { return perimeter_; }
  IndicatorSet complement() const;
  bool operator==(const IndicatorSet& other) const {
    return grid_ == other.grid_ && members_ == other.members_;
  }

 private:
  DomainGrid grid_;
  std::vector<std::uint8_t> members_;
  std::size_t count_ = 0;
  double volume_ = 0.0;
  double perimeter_ = 0.0;
};

double l1_perimeter(const DomainGrid& grid, const std::vector<std::uint8_t>& members);

/**
 * Isotropic perimeter estimate: total variation of the indicator convolved
 * with a 5-tap binomial kernel per axis, mirror-extended. The gradient lives
 * on cell vertices (2x2 stencil) with trapezoid weights on boundary vertices,
 * so axis-aligned interfaces are measured exactly.
 */
double smoothed_perimeter(const IndicatorSet& E);
double smoothed_perimeter(const DomainGrid& grid, const std::vector<double>& indicator);

enum class PerimeterEstimator { l1, smoothed };
double perimeter(const IndicatorSet& E, PerimeterEstimator estimator = PerimeterEstimator::l1);

/// min(|E1 \ E2|, |E2 \ E1|)
double alpha(const IndicatorSet& E1, const IndicatorSet& E2);

enum class ShapeKind { stripe, ball, quarter_disk, custom };

/**
 * Shape with closed-form volume, relative perimeter and mean curvature.
 * Signed distance is positive outside the shape.
 */
class AnalyticShape {
 public:
  /// {x < position} for axis 0, {y < position} for axis 1.
  static AnalyticShape stripe(double position, int axis, double lx = 1.0, double ly = 1.0);
  static AnalyticShape ball(std::array<double, 2> center, double radius, double lx = 1.0,
                            double ly = 1.0);
  /// corner index 0..3: (0,0), (lx,0), (0,ly), (lx,ly).
  static AnalyticShape quarter_disk(int corner, double radius, double lx = 1.0, double ly = 1.0);
  static AnalyticShape custom(std::function<double(double, double)> signed_distance, double volume,
                              double perimeter, double curvature, std::string tag = "custom");
  /// The extents of grid, applied to a shape built for the unit square.
  AnalyticShape on_grid(const DomainGrid& grid) const;

  ShapeKind kind() const { return kind_; }
  std::string tag() const;
  double signed_distance(double x, double y) const;
  bool contains(double x, double y) const { return signed_distance(x, y) < 0.0; }
  double volume() const { return volume_; }
  double perimeter() const { return perimeter_; }
  double curvature() const { return curvature_; }
  std::array<double, 2> center() const { return center_; }
  double radius() const { return radius_; }
  double position() const { return position_; }
  int axis() const { return axis_; }
  int corner() const { return corner_; }
  /// Distance from the interface to the domain boundary; infinite for stripes.
  double boundary_clearance() const;

  IndicatorSet rasterize(const DomainGrid& grid) const;

 private:
  ShapeKind kind_ = ShapeKind::stripe;
  double position_ = 0.5;
  int axis_ = 0;
  std::array<double, 2> center_{0.5, 0.5};
  double radius_ = 0.0;
  int corner_ = 0;
  double lx_ = 1.0, ly_ = 1.0;
  double volume_ = 0.0, perimeter_ = 0.0, curvature_ = 0.0;
  std::function<double(double, double)> sd_;
  std::string custom_tag_;
};

/// -1 on E, +1 off E.
ScalarField sharp_interface_field(const IndicatorSet& E);
ScalarField sharp_interface_field(const AnalyticShape& shape, const DomainGrid& grid);

/// First-order fast-marching signed distance of a raster set, positive outside.
ScalarField signed_distance(const IndicatorSet& E);

struct WellPrepared {
  ScalarField field;
  double shift = 0.0;          // uniform mass correction
  double target_mass = 0.0;    // 1 - 2 vol
  double energy = 0.0;         // G_eps of field
  double sharp_energy = 0.0;   // G_0 of the shape
  double achieved_C = 0.0;     // (energy - sharp_energy) / eps
  bool clearance_ok = true;    // interface at least 6 eps from the boundary, or orthogonal to it
};

/// q(signed distance) with the optimal profile, shifted to mass 1 - 2 vol.
WellPrepared well_prepared(const AnalyticShape& shape, const DomainGrid& grid, double eps,
                           const DoubleWell& w, double theta = 1.0);
WellPrepared well_prepared(const IndicatorSet& E, double eps, const DoubleWell& w,
                           double theta = 1.0);

/// eps must be at least twice the largest spacing.
void require_resolved(const DomainGrid& grid, double eps);

}  // namespace slowmo
