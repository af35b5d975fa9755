#include <cmath>

#include "doctest.h"
#include "slowmo/energy.hpp"
#include "slowmo/error.hpp"
#include "slowmo/experiments.hpp"

using namespace slowmo;

TEST_CASE("dissipation budget examples") {
  const auto w = quartic_well();
  auto g = make_grid(2, {1.0, 1.0}, {64, 64});
  FlowConfig c;
  c.eps = 0.05;
  c.dt = 0.005;
  c.t_end = 2.0;

  auto flat = run_flow(ScalarField(g, 0.2), c, w);
  auto b0 = dissipation_budget(flat, c.eps);
  CHECK(b0.k2 == 0.0);
  CHECK(b0.horizon_capped);
  CHECK(std::isinf(b0.t_star));
  CHECK(b0.partial);

  auto stripe = AnalyticShape::stripe(0.5, 0);
  const double G0 = sharp_energy_G0(stripe, w);
  auto good = run_flow(well_prepared(stripe, g, c.eps, w).field, c, w);
  auto bg = dissipation_budget(good, c.eps, G0);
  CHECK_FALSE(bg.ill_prepared);
  CHECK(bg.k2 <= 10.0);

  auto sharp = run_flow(sharp_interface_field(stripe, g), c, w);
  auto bs = dissipation_budget(sharp, c.eps, G0);
  CHECK(bs.ill_prepared);
  CHECK_FALSE(bs.cause.empty());
  CHECK(bs.k2 > 10.0 * bg.k2);
}

TEST_CASE("slow motion sweep on a coarse ladder") {
  const auto w = quartic_well();
  SlowMotionConfig cfg;
  cfg.resolution = 64;
  cfg.eps_ladder = {0.12, 0.06};
  cfg.M = 0.25;
  auto rep = slow_motion_sweep(cfg, w);
  REQUIRE(rep.rungs.size() == 2);
  CHECK(rep.norm == "L2");
  CHECK(rep.asserted);
  CHECK(rep.strictly_decreasing);
  CHECK(rep.max_mass_drift <= 1e-8);
  for (const auto& r : rep.rungs) {
    CHECK(r.energy_monotone);
    CHECK(r.D >= r.D0);
    CHECK(r.t_end == doctest::Approx(cfg.M / r.eps));
    CHECK(r.max_abs_lambda < 1.0);
  }

  SlowMotionConfig bad = cfg;
  bad.eps_ladder = {0.06, 0.12};
  CHECK_THROWS_AS(slow_motion_sweep(bad, w), InvalidArgument);
  bad.eps_ladder = {0.06, 0.02};
  CHECK_THROWS_AS(slow_motion_sweep(bad, w), ResolutionError);
  bad.eps_ladder = {0.06};
  bad.M = 0.0;
  CHECK_THROWS_AS(slow_motion_sweep(bad, w), InvalidArgument);

  SlowMotionConfig ball = cfg;
  ball.shape = AnalyticShape::ball({0.5, 0.5}, 0.25);
  ball.eps_ladder = {0.06};
  ball.M = 0.1;
  auto rb = slow_motion_sweep(ball, w);
  CHECK(rb.norm == "L1");
  CHECK(rb.rungs[0].final_lambda != 0.0);
}

TEST_CASE("sweeps are deterministic") {
  const auto w = quartic_well();
  SlowMotionConfig cfg;
  cfg.resolution = 32;
  cfg.eps_ladder = {0.1};
  cfg.M = 0.1;
  cfg.equation = Equation::ch;
  auto a = slow_motion_sweep(cfg, w);
  auto b = slow_motion_sweep(cfg, w);
  CHECK(a.norm == "X2");
  CHECK(a.rungs[0].D == b.rungs[0].D);
  CHECK(a.rungs[0].min_energy == b.rungs[0].min_energy);
}

TEST_CASE("level-set proposition examples") {
  const auto w = quartic_well();
  auto g = make_grid(2, {1.0, 1.0}, {64, 64});
  auto stripe = AnalyticShape::stripe(0.5, 0);
  const auto e0 = stripe.rasterize(g);
  auto u = well_prepared(stripe, g, 0.05, w).field;
  auto rep = level_set_proposition_check({u}, e0, 0.1);
  CHECK(rep.applicable);
  CHECK(rep.ok);
  CHECK(rep.max_alpha <= 0.1);
  CHECK(rep.sets_checked == 64);

  CHECK(alpha(e0, IndicatorSet::sublevel(u, -1.5)) == 0.0);
  CHECK(alpha(e0, IndicatorSet::sublevel(u, 1.5)) == 0.0);

  auto far = level_set_proposition_check({ScalarField(g, 0.0)}, e0, 0.1);
  CHECK_FALSE(far.applicable);
  CHECK_FALSE(far.notice.empty());
}
