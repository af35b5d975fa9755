#include <cmath>
#include <cstring>
#include <numbers>

#include "doctest.h"
#include "slowmo/error.hpp"
#include "slowmo/flow.hpp"
#include "slowmo/geometry.hpp"

using namespace slowmo;
using std::numbers::pi;

namespace {

ScalarField stripe_field(const DomainGrid& g, double eps) {
  const OptimalProfile q(quartic_well(), eps);
  return ScalarField::from_function(g, [&](double x, double) { return q(x - 0.5); });
}

ScalarField wavy_stripe_field(const DomainGrid& g, double eps) {
  const OptimalProfile q(quartic_well(), eps);
  return ScalarField::from_function(g, [&](double x, double y) {
    return q(x - 0.5 - 0.05 * std::cos(2 * pi * y));
  });
}

}  // namespace

TEST_CASE("lagrange multiplier examples") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {64, 64});
  const DoubleWell w = quartic_well();
  CHECK(lagrange_multiplier(ScalarField(g, 0.0), 0.1, w) == 0.0);
  CHECK(lagrange_multiplier(ScalarField(g, 0.5), 0.1, w) == doctest::Approx(-3.75));
  const DomainGrid g2 = make_grid(2, {1.0, 1.0}, {256, 256});
  CHECK(std::abs(lagrange_multiplier(stripe_field(g2, 0.05), 0.05, w)) <= 0.1);
}

TEST_CASE("constants are fixed points of both flows") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  const DoubleWell w = quartic_well();
  for (Equation eq : {Equation::nlac, Equation::ch}) {
    for (Scheme sc : {Scheme::semi_implicit_split, Scheme::explicit_euler}) {
      FlowConfig cfg;
      cfg.eps = 0.1;
      cfg.equation = eq;
      cfg.scheme = sc;
      cfg.dt = sc == Scheme::explicit_euler ? 0.5 * cfg.explicit_dt_bound(g) : 1e-3;
      const ScalarField u(g, 0.3);
      const ScalarField v = eq == Equation::nlac ? step_nlac(u, cfg, w) : step_ch(u, cfg, w);
      for (std::size_t k = 0; k < v.size(); ++k) CHECK(std::abs(v[k] - 0.3) <= 1e-13);
    }
  }
}

TEST_CASE("a converged state is a fixed point") {
  const DomainGrid g = make_grid(1, {1.0}, {64});
  const DoubleWell w = quartic_well();
  FlowConfig cfg;
  cfg.eps = 0.05;
  cfg.dt = 0.05;
  cfg.t_end = 200.0;
  cfg.record_every = 1000000;
  const TrajectoryRecord rec = run_flow(stripe_field(g, 0.05), cfg, w);
  const ScalarField u = *rec.final_state;
  const ScalarField v = step_nlac(u, cfg, w);
  double diff = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) diff = std::max(diff, std::abs(u[k] - v[k]));
  CHECK(diff <= 1e-10);
}

TEST_CASE("stripe NLAC: energy decreases every step, small total decrease") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {128, 128});
  const DoubleWell w = quartic_well();
  FlowConfig cfg;
  cfg.eps = 0.05;
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;
  const TrajectoryRecord rec = run_flow(stripe_field(g, cfg.eps), cfg, w);
  CHECK(rec.steps == 100);
  CHECK(rec.energy_monotone);
  const double drop = rec.samples.front().energy.total - rec.samples.back().energy.total;
  CHECK(drop >= -1e-12);
  CHECK(drop <= 1e-2);
  CHECK(rec.max_step_mass_change <= 1e-12);
  CHECK(rec.max_overshoot <= 1e-3);
}

TEST_CASE("CH linear growth rate of the first cosine mode") {
  const DomainGrid g = make_grid(1, {1.0}, {64});
  const DoubleWell w = quartic_well();
  FlowConfig cfg;
  cfg.eps = 0.1;
  cfg.dt = 1e-5;
  cfg.theta = 0.5;  // diffusion eps^2
  cfg.equation = Equation::ch;
  cfg.stabilization = 0.0;
  const auto u0 = ScalarField::from_function(g, [](double x, double) { return 1e-6 * std::cos(pi * x); });
  FlowStepper st(g, cfg, w);
  ScalarField u = u0;
  const int steps = 10000;
  for (int k = 0; k < steps; ++k) u = st.step(u);
  auto amp = [&](const ScalarField& f) {
    double s = 0.0;
    for (int i = 0; i < 64; ++i) s += f[i] * std::cos(pi * g.x(i));
    return s;
  };
  const double t = steps * cfg.dt;
  const double rate = std::log(amp(u) / amp(u0)) / t;
  const double expected = pi * pi * (1.0 - cfg.eps * cfg.eps * pi * pi);
  CHECK(std::abs(rate - expected) <= 0.1 * expected);
}

TEST_CASE("CH stripe conserves mass over 1000 steps") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {64, 64});
  const DoubleWell w = quartic_well();
  FlowConfig cfg;
  cfg.eps = 0.05;
  cfg.dt = cfg.eps * cfg.eps / 4;
  cfg.equation = Equation::ch;
  cfg.t_end = 1000 * cfg.dt;
  cfg.record_every = 100;
  const TrajectoryRecord rec = run_flow(stripe_field(g, cfg.eps), cfg, w);
  CHECK(rec.steps == 1000);
  CHECK(rec.max_mass_drift <= 1e-10);
  CHECK(rec.energy_monotone);
}

TEST_CASE("constant data: monitors constant, zero identity residual") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  FlowConfig cfg;
  cfg.eps = 0.1;
  cfg.t_end = 0.05;
  cfg.dt = 0.01;
  const ScalarField u0(g, 0.2);
  const TrajectoryRecord rec = run_flow(u0, cfg, quartic_well(), u0);
  REQUIRE(rec.samples.size() == 6);
  for (const auto& s : rec.samples) {
    CHECK(s.identity_residual <= 1e-14);
    CHECK(s.energy.total == doctest::Approx(rec.samples[0].energy.total).epsilon(1e-14));
    CHECK(s.dist_L2 <= 1e-14);
    CHECK(s.dist_X2 <= 1e-10);
  }
  for (std::size_t k = 1; k < rec.samples.size(); ++k) CHECK(rec.samples[k].t > rec.samples[k - 1].t);
}

TEST_CASE("energy identity residual is first order in dt") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {64, 64});
  const DoubleWell w = quartic_well();
  for (Equation eq : {Equation::nlac, Equation::ch}) {
    std::vector<double> res;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
      FlowConfig cfg;
      cfg.eps = 0.05;
      cfg.equation = eq;
      cfg.dt = eq == Equation::nlac ? dt : dt / 20;
      cfg.t_end = eq == Equation::nlac ? 0.2 : 0.02;
      cfg.record_every = 1000000;
      const TrajectoryRecord rec = run_flow(wavy_stripe_field(g, cfg.eps), cfg, w);
      res.push_back(rec.samples.back().identity_residual);
      CHECK(rec.energy_monotone);
    }
    CHECK(res[0] <= 0.02);
    CHECK(std::log2(res[0] / res[1]) >= 0.9);
    CHECK(std::log2(res[1] / res[2]) >= 0.9);
  }
}

TEST_CASE("explicit and semi-implicit schemes agree for small dt") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  const DoubleWell w = quartic_well();
  FlowConfig a;
  a.eps = 0.08;
  a.t_end = 0.05;
  a.dt = 0.5 * a.explicit_dt_bound(g);
  a.stabilization = 0.0;
  FlowConfig b = a;
  b.scheme = Scheme::explicit_euler;
  const ScalarField u0 = wavy_stripe_field(g, a.eps);
  const ScalarField ua = *run_flow(u0, a, w).final_state;
  const ScalarField ub = *run_flow(u0, b, w).final_state;
  CHECK(distance_l2(ua, ub) <= 1e-3);

  FlowConfig bad = b;
  bad.dt = 2.0 * b.explicit_dt_bound(g);
  CHECK_THROWS_AS(bad.validate(g), InvalidArgument);
}

TEST_CASE("X2 distance is NaN when the reference mass differs") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  FlowConfig cfg;
  cfg.eps = 0.1;
  cfg.t_end = 0.01;
  cfg.dt = 0.01;
  const TrajectoryRecord rec = run_flow(ScalarField(g, 0.2), cfg, quartic_well(), ScalarField(g, 0.0));
  CHECK(std::isnan(rec.samples[0].dist_X2));
  CHECK(rec.samples[0].dist_L1 == doctest::Approx(0.2));
}

TEST_CASE("runs are bitwise reproducible") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  FlowConfig cfg;
  cfg.eps = 0.08;
  cfg.t_end = 0.2;
  cfg.dt = 0.01;
  const ScalarField u0 = wavy_stripe_field(g, cfg.eps);
  const ScalarField a = *run_flow(u0, cfg, quartic_well()).final_state;
  const ScalarField b = *run_flow(u0, cfg, quartic_well()).final_state;
  CHECK(std::memcmp(a.raw().data(), b.raw().data(), sizeof(double) * a.size()) == 0);
}

TEST_CASE("invalid flow configurations") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  FlowConfig cfg;
  cfg.eps = 0.01;
  CHECK_THROWS_AS(cfg.validate(g), ResolutionError);
  cfg.eps = 0.1;
  cfg.dt = -1;
  CHECK_THROWS_AS(cfg.validate(g), InvalidArgument);
  cfg.dt = 0.1;
  cfg.record_every = 0;
  CHECK_THROWS_AS(cfg.validate(g), InvalidArgument);
  CHECK_THROWS_AS(scheme_from_string("rk4"), InvalidArgument);
  CHECK(equation_from_string("ch") == Equation::ch);
}
