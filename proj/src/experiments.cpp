#include "slowmo/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "slowmo/energy.hpp"
#include "slowmo/error.hpp"

namespace slowmo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double spread(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  double lo = kInf, hi = -kInf;
  for (double x : v) {
    lo = std::min(lo, std::abs(x));
    hi = std::max(hi, std::abs(x));
  }
  if (hi == 0.0) return 1.0;
  return lo > 0.0 ? hi / lo : kInf;
}
}  // namespace

std::string to_string(DistanceNorm n) {
  switch (n) {
    case DistanceNorm::L1:
      return "L1";
    case DistanceNorm::L2:
      return "L2";
    case DistanceNorm::X2:
      return "X2";
  }
  return "";
}

DistanceNorm default_norm(Equation eq, const AnalyticShape& shape) {
  if (shape.kind() == ShapeKind::ball) return DistanceNorm::L1;
  return eq == Equation::ch ? DistanceNorm::X2 : DistanceNorm::L2;
}

DissipationBudget dissipation_budget(const TrajectoryRecord& rec, double eps,
                                     std::optional<double> G0, double C_bound) {
  if (rec.samples.empty()) throw InvalidArgument("empty trajectory");
  DissipationBudget b;
  const double horizon = 0.1 / (eps * eps);
  const double t_end = rec.samples.back().t;
  b.partial = t_end < horizon * (1.0 - 1e-12);
  const double T = std::min(t_end, horizon);
  double phi = 0.0;
  for (const auto& s : rec.samples) {
    if (s.t <= T * (1.0 + 1e-12)) phi = s.dissipation;
  }
  b.k2 = phi / (eps * eps);
  const double floor = 1e-6 * eps * eps;
  if (rec.samples.back().dissipation <= std::max(phi, floor) * (1.0 + 1e-12)) {
    // the budget is never exhausted: t_star is the run horizon
    b.horizon_capped = true;
    b.t_star = t_end;
    b.k1 = t_end * eps * eps;
  } else {
    for (const auto& s : rec.samples) {
      if (s.dissipation <= phi * (1.0 + 1e-12)) b.t_star = s.t;
    }
    b.k1 = b.t_star * eps * eps;
  }
  if (phi <= floor) {
    b.k2 = 0.0;
    b.horizon_capped = true;
    b.t_star = kInf;
    b.k1 = kInf;
  }
  if (G0) {
    b.initial_C = (rec.samples.front().energy.total - *G0) / eps;
    if (b.initial_C > C_bound) {
      b.ill_prepared = true;
      b.cause = "initial energy exceeds G0 + C eps with C = " + std::to_string(b.initial_C) +
                " > " + std::to_string(C_bound) + ": data not well prepared";
    }
  }
  return b;
}

SlowMotionReport slow_motion_sweep(const SlowMotionConfig& cfg, const DoubleWell& w) {
  if (cfg.eps_ladder.empty()) throw InvalidArgument("empty eps ladder");
  if (!(cfg.M > 0.0)) throw InvalidArgument("M must be positive");
  for (std::size_t k = 1; k < cfg.eps_ladder.size(); ++k) {
    if (!(cfg.eps_ladder[k] < cfg.eps_ladder[k - 1])) {
      throw InvalidArgument("eps ladder must be strictly decreasing");
    }
  }
  const DomainGrid grid = make_grid(2, {1.0, 1.0}, {cfg.resolution, cfg.resolution});
  for (double eps : cfg.eps_ladder) require_resolved(grid, eps);

  SlowMotionReport rep;
  rep.equation = to_string(cfg.equation);
  rep.shape = cfg.shape.tag();
  const DistanceNorm norm = cfg.norm.value_or(default_norm(cfg.equation, cfg.shape));
  rep.norm = to_string(norm);
  rep.M = cfg.M;
  rep.resolution = cfg.resolution;
  const ScalarField ref = sharp_interface_field(cfg.shape, grid);
  const double G0 = sharp_energy_G0(cfg.shape, w, cfg.theta);

  for (double eps : cfg.eps_ladder) {
    const auto start = std::chrono::steady_clock::now();
    SlowMotionRung r;
    r.eps = eps;
    const WellPrepared wp = well_prepared(cfg.shape, grid, eps, w, cfg.theta);
    FlowConfig fc;
    fc.eps = eps;
    fc.equation = cfg.equation;
    fc.theta = cfg.theta;
    fc.stabilization = cfg.stabilization;
    fc.dt = cfg.equation == Equation::nlac ? cfg.dt_nlac * eps : cfg.dt_ch * eps * eps;
    fc.t_end = cfg.M / eps;
    fc.record_every = std::max(1, static_cast<int>(std::ceil(fc.t_end / fc.dt / 400.0)));
    r.dt = fc.dt;
    r.t_end = fc.t_end;
    TrajectoryRecord rec = run_flow(wp.field, fc, w, ref);
    r.steps = rec.steps;
    r.D_L1 = rec.sup_dist_L1;
    r.D_L2 = rec.sup_dist_L2;
    const FlowSample& s0 = rec.samples.front();
    r.D_X2 = std::isnan(s0.dist_X2) ? std::numeric_limits<double>::quiet_NaN() : rec.sup_dist_X2;
    switch (norm) {
      case DistanceNorm::L1:
        r.D = r.D_L1;
        r.D0 = s0.dist_L1;
        break;
      case DistanceNorm::L2:
        r.D = r.D_L2;
        r.D0 = s0.dist_L2;
        break;
      case DistanceNorm::X2:
        r.D = r.D_X2;
        r.D0 = s0.dist_X2;
        break;
    }
    r.G0 = G0;
    r.well_prepared_C = (s0.energy.total - G0) / eps;
    r.clearance_ok = wp.clearance_ok;
    r.well_prepared = r.well_prepared_C <= cfg.C_bound && std::isfinite(r.D0);
    r.min_energy = rec.min_energy;
    r.max_energy = -kInf;
    for (const auto& s : rec.samples) {
      r.max_energy = std::max(r.max_energy, s.energy.total);
      r.max_abs_lambda = std::max(r.max_abs_lambda, std::abs(s.lambda));
    }
    r.final_lambda = rec.samples.back().lambda;
    r.C1 = (G0 - r.min_energy) / eps;
    r.C2 = (r.max_energy - G0) / eps;
    r.mass_drift = rec.max_mass_drift;
    r.energy_monotone = rec.energy_monotone;
    r.budget = dissipation_budget(rec, eps, G0, cfg.C_bound);
    if (cfg.keep_trajectories) r.trajectory = std::move(rec);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!r.well_prepared) rep.asserted = false;
    rep.max_mass_drift = std::max(rep.max_mass_drift, r.mass_drift);
    rep.rungs.push_back(std::move(r));
  }

  rep.strictly_decreasing = true;
  rep.trend_ok = true;
  for (std::size_t k = 1; k < rep.rungs.size(); ++k) {
    const double a = rep.rungs[k - 1].D, b = rep.rungs[k].D;
    if (!(b < a)) rep.strictly_decreasing = false;
    if (!(b <= a + cfg.trend_tol)) rep.trend_ok = false;
  }
  if (rep.rungs.size() >= 2) {
    const auto& f = rep.rungs.front();
    const auto& l = rep.rungs.back();
    rep.rate = std::log(f.D / l.D) / std::log(f.eps / l.eps);
  }
  std::vector<double> c1, k1, k2;
  for (const auto& r : rep.rungs) {
    c1.push_back(r.C1);
    if (std::isfinite(r.budget.k1)) k1.push_back(r.budget.k1);
    k2.push_back(r.budget.k2);
  }
  rep.C1_spread = spread(c1);
  rep.k1_spread = spread(k1);
  rep.k2_spread = spread(k2);
  rep.budget_stable = rep.k1_spread <= 4.0 && rep.k2_spread <= 4.0;
  return rep;
}

LevelSetReport level_set_proposition_check(const std::vector<ScalarField>& fields,
                                           const IndicatorSet& E0, double delta, double tol) {
  LevelSetReport rep;
  rep.delta = delta;
  const ScalarField uE = sharp_interface_field(E0);
  for (const auto& u : fields) {
    const double c = distance_l1(u, uE);
    rep.closeness.push_back(c);
    if (c > 2.0 * delta) {
      rep.applicable = false;
      rep.notice = "closeness precondition violated: ||u - u_E0||_L1 = " + std::to_string(c) +
                   " > 2 delta";
      continue;
    }
    for (int k = 0; k < 64; ++k) {
      const double s = -1.5 + 3.0 * k / 63.0;
      const double a = alpha(E0, IndicatorSet::sublevel(u, s));
      rep.max_alpha = std::max(rep.max_alpha, a);
      ++rep.sets_checked;
      if (a > delta + tol) rep.ok = false;
    }
  }
  if (!rep.applicable) rep.ok = false;
  return rep;
}

}  // namespace slowmo
