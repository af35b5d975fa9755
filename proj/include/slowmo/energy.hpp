#pragma once

#include "slowmo/geometry.hpp"
#include "slowmo/grid.hpp"
#include "slowmo/potential.hpp"

namespace slowmo {

struct EnergyReport {
  double bulk = 0.0;      // integral of W(u)/eps
  double gradient = 0.0;  // integral of theta*eps*|grad u|^2
  double total = 0.0;
  double mass = 0.0;
  double eps = 0.0;
  double theta = 1.0;
};

/// G_eps[u] = integral of W(u)/eps + theta*eps*|grad u|^2; the mass is reported, not enforced.
EnergyReport energy_G(const ScalarField& u, double eps, const DoubleWell& w, double theta = 1.0);

/// Per-interface transition cost 2*sqrt(theta)*c_W.
double interface_cost(const DoubleWell& w, double theta = 1.0);

/// interface_cost * P(E); exact perimeter for analytic shapes.
double sharp_energy_G0(const AnalyticShape& shape, const DoubleWell& w, double theta = 1.0);
double sharp_energy_G0(const IndicatorSet& E, const DoubleWell& w,
                       PerimeterEstimator estimator = PerimeterEstimator::smoothed,
                       double theta = 1.0);

/// (G_0[E0] - G_eps[u]) / eps; negative when u sits above the sharp energy.
double energy_deficit(const ScalarField& u, const AnalyticShape& E0, double eps,
                      const DoubleWell& w, double theta = 1.0);
double energy_deficit(const ScalarField& u, const IndicatorSet& E0, double eps,
                      const DoubleWell& w, double theta = 1.0);

}  // namespace slowmo
