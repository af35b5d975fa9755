#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slowmo/flow.hpp"
#include "slowmo/geometry.hpp"

namespace slowmo {

enum class DistanceNorm { L1, L2, X2 };
std::string to_string(DistanceNorm n);
/// L2 for nlac on a stripe, X2 for ch, L1 for a ball (local minimizer).
DistanceNorm default_norm(Equation eq, const AnalyticShape& shape);

struct DissipationBudget {
  double k1 = 0.0;
  double k2 = 0.0;
  double t_star = 0.0;       // largest sampled horizon with dissipation <= k2 eps^2
  bool horizon_capped = false;  // budget never exhausted on the run; t_star = inf without dissipation
  bool partial = false;      // run ends before 0.1 eps^-2
  double initial_C = 0.0;    // (G_eps[u0] - G0) / eps
  bool ill_prepared = false;
  std::string cause;
};

/**
 * k2 = dissipation(min(T_end, 0.1 eps^-2)) / eps^2 and k1 = t_star eps^2.
 * G0 lets the report attribute a large budget to ill-prepared data.
 */
DissipationBudget dissipation_budget(const TrajectoryRecord& rec, double eps,
                                     std::optional<double> G0 = std::nullopt,
                                     double C_bound = 5.0);

struct SlowMotionConfig {
  Equation equation = Equation::nlac;
  AnalyticShape shape = AnalyticShape::stripe(0.5, 0);
  std::vector<double> eps_ladder = {0.08, 0.04, 0.02};
  double M = 1.0;
  int resolution = 256;
  /// dt = dt_nlac * eps (nlac) or dt_ch * eps^2 (ch)
  double dt_nlac = 0.1;
  double dt_ch = 0.25;
  double theta = 1.0;
  double stabilization = 3.5;
  std::optional<DistanceNorm> norm;
  /// Largest (G_eps[u0] - G0)/eps accepted as well prepared.
  double C_bound = 5.0;
  double trend_tol = 1e-9;
  bool keep_trajectories = false;
};

struct SlowMotionRung {
  double eps = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
  std::size_t steps = 0;
  double D = 0.0;     // sup over t of the chosen distance
  double D0 = 0.0;    // the same distance at t = 0
  double D_L1 = 0.0, D_L2 = 0.0, D_X2 = 0.0;
  double well_prepared_C = 0.0;
  bool well_prepared = true;
  bool clearance_ok = true;
  double G0 = 0.0;
  double min_energy = 0.0, max_energy = 0.0;
  double C1 = 0.0;  // (G0 - min G) / eps
  double C2 = 0.0;  // (max G - G0) / eps
  double mass_drift = 0.0;
  bool energy_monotone = true;
  double max_abs_lambda = 0.0;
  double final_lambda = 0.0;
  DissipationBudget budget;
  double seconds = 0.0;
  std::optional<TrajectoryRecord> trajectory;
};

struct SlowMotionReport {
  std::string equation;
  std::string shape;
  std::string norm;
  double M = 0.0;
  int resolution = 0;
  std::vector<SlowMotionRung> rungs;
  bool asserted = true;           // false in exploratory mode (data not well prepared)
  bool strictly_decreasing = false;
  bool trend_ok = false;          // D_{k+1} <= D_k + tol
  double rate = 0.0;              // log-log slope of D against eps over the ladder
  double C1_spread = 0.0;         // max/min of C1 across rungs
  double k1_spread = 0.0, k2_spread = 0.0;
  bool budget_stable = false;     // k1, k2 within a factor 4 across rungs
  double max_mass_drift = 0.0;
};

/// Ladder run to t = M / eps per rung; the ladder must be strictly decreasing with eps >= 2h.
SlowMotionReport slow_motion_sweep(const SlowMotionConfig& cfg, const DoubleWell& w);

struct LevelSetReport {
  bool applicable = true;
  double max_alpha = 0.0;
  double delta = 0.0;
  bool ok = true;
  int sets_checked = 0;
  std::vector<double> closeness;  // ||u - u_E0||_L1 per field
  std::string notice;
};

/// alpha(E0, {u <= s}) <= delta + tol for s on 64 points of [-1.5, 1.5], for every field.
LevelSetReport level_set_proposition_check(const std::vector<ScalarField>& fields,
                                           const IndicatorSet& E0, double delta,
                                           double tol = 1e-12);

}  // namespace slowmo
