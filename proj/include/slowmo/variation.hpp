#pragma once

#include <array>
#include <functional>
#include <vector>

#include "slowmo/geometry.hpp"

namespace slowmo {

using VectorField2 = std::function<std::array<double, 2>(double, double)>;

/// Closed or open boundary polyline of an analytic shape.
struct Polyline {
  std::vector<std::array<double, 2>> points;
  bool closed = true;
};

Polyline boundary_polyline(const AnalyticShape& shape, int vertices = 2048);
double polyline_length(const Polyline& p);

struct FirstVariationReport {
  double perimeter = 0.0;
  double predicted = 0.0;  // boundary integral of the tangential divergence of T
  std::vector<double> t_values;
  std::vector<double> forward_slope;  // (P(f_t E) - P(E)) / t
  std::vector<double> central_slope;  // (P(f_t E) - P(f_-t E)) / 2t
  double max_forward_discrepancy = 0.0;
  double max_central_discrepancy = 0.0;
};

/// Compares difference quotients of P(f_t(E)), f_t = id + tT, with the first variation formula.
FirstVariationReport first_variation_check(const AnalyticShape& shape, const VectorField2& T,
                                           const std::vector<double>& t_values,
                                           int vertices = 2048);

struct SecondVariationReport {
  double predicted = 0.0;  // integral of |tangential gradient of zeta|^2
  std::vector<double> t_values;
  std::vector<double> second_difference;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;  // relative to predicted when it is nonzero
};

/// Normal perturbation r = rho + t zeta(phi) of a circle; second difference of the length.
SecondVariationReport second_variation_check(const AnalyticShape& ball,
                                             const std::function<double(double)>& zeta,
                                             const std::vector<double>& t_values,
                                             int vertices = 2048);

}  // namespace slowmo
