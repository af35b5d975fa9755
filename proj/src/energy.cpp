#include "slowmo/energy.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "slowmo/error.hpp"
#include "slowmo/field_ops.hpp"

namespace slowmo {

EnergyReport energy_G(const ScalarField& u, double eps, const DoubleWell& w, double theta) {
  require_resolved(u.grid(), eps);
  if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
  EnergyReport r;
  r.eps = eps;
  r.theta = theta;
  double bulk = 0.0, mass = 0.0;
  for (double v : u.values()) {
    bulk += w.W(v);
    mass += v;
  }
  const double vol = u.grid().cell_volume();
  r.bulk = bulk * vol / eps;
  r.gradient = theta * eps * dirichlet_energy(u);
  r.total = r.bulk + r.gradient;
  r.mass = mass * vol;
  return r;
}

double interface_cost(const DoubleWell& w, double theta) {
  // c_W depends only on the well; cache by name.
  static std::mutex m;
  static std::map<std::string, double> cache;
  double cw;
  {
    std::lock_guard lock(m);
    auto it = cache.find(w.name);
    if (it != cache.end() && !w.name.empty()) {
      cw = it->second;
    } else {
      cw = interface_constant(w);
      if (!w.name.empty()) cache[w.name] = cw;
    }
  }
  return 2.0 * std::sqrt(theta) * cw;
}

double sharp_energy_G0(const AnalyticShape& shape, const DoubleWell& w, double theta) {
  return interface_cost(w, theta) * shape.perimeter();
}

double sharp_energy_G0(const IndicatorSet& E, const DoubleWell& w, PerimeterEstimator estimator,
                       double theta) {
  if (E.count() == 0 || E.count() == E.members().size()) return 0.0;
  return interface_cost(w, theta) * perimeter(E, estimator);
}

double energy_deficit(const ScalarField& u, const AnalyticShape& E0, double eps,
                      const DoubleWell& w, double theta) {
  return (sharp_energy_G0(E0, w, theta) - energy_G(u, eps, w, theta).total) / eps;
}

double energy_deficit(const ScalarField& u, const IndicatorSet& E0, double eps,
                      const DoubleWell& w, double theta) {
  return (sharp_energy_G0(E0, w, PerimeterEstimator::smoothed, theta) -
          energy_G(u, eps, w, theta).total) /
         eps;
}

}  // namespace slowmo
