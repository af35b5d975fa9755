#include "slowmo/verify.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "slowmo/energy.hpp"
#include "slowmo/field_ops.hpp"
#include "slowmo/flow.hpp"
#include "slowmo/geometry.hpp"
#include "slowmo/io.hpp"
#include "slowmo/isoperimetry.hpp"
#include "slowmo/potential.hpp"
#include "slowmo/rearrangement.hpp"
#include "slowmo/variation.hpp"

namespace slowmo {

using std::numbers::pi;

bool VerifyReport::ok() const {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return true;
}

std::vector<std::string> VerifyReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.ok) out.push_back(c.name);
  return out;
}

nlohmann::json VerifyReport::manifest() const {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = seed;
  j["passed"] = ok();
  j["failures"] = failures();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) arr.push_back({{"name", c.name}, {"ok", c.ok}, {"values", c.values}});
  j["checks"] = arr;
  return j;
}

namespace {

ScalarField wavy_stripe(const DomainGrid& g, double eps) {
  const OptimalProfile q(quartic_well(), eps);
  return ScalarField::from_function(g, [&q](double x, double y) { return q(x - 0.5 - 0.05 * std::cos(2 * pi * y)); });
}

VerifyCheck wells() {
  const auto w = quartic_well();
  const auto d = check_well(w);
  const double cw = interface_constant(w);
  VerifyCheck c{"potential.quartic_hypotheses", false, {}};
  c.values = {{"c_W", cw}, {"zeros_only_at_wells", d.zeros_only_at_wells},
              {"equal_curvature", d.equal_curvature_at_wells}, {"growth", d.growth}};
  c.ok = d.zeros_only_at_wells && d.equal_curvature_at_wells && d.growth &&
         std::abs(cw - 2.0 / 3.0) <= 1e-8;
  return c;
}

VerifyCheck x2_machinery(std::mt19937_64& rng) {
  const auto g = make_grid(2, {1.0, 1.0}, {64, 64});
  const auto f = ScalarField::from_function(g, [](double x, double) { return std::cos(pi * x); });
  const double n = x2_norm(f);
  std::normal_distribution<double> n01;
  double sym = 0.0, hom = 0.0;
  for (int t = 0; t < 5; ++t) {
    std::vector<double> a(g.size()), b(g.size());
    for (auto& v : a) v = n01(rng);
    for (auto& v : b) v = n01(rng);
    const auto fa = remove_mean(ScalarField(g, a)), fb = remove_mean(ScalarField(g, b));
    const double ab = x2_inner(fa, fb), ba = x2_inner(fb, fa);
    sym = std::max(sym, std::abs(ab - ba) / std::max(std::abs(ab), 1e-3));
    ScalarField f3 = fa;
    for (double& v : f3.raw()) v *= -3.0;
    hom = std::max(hom, std::abs(x2_norm(f3) - 3.0 * x2_norm(fa)) / x2_norm(fa));
  }
  VerifyCheck c{"field_ops.x2_norm", false, {}};
  c.values = {{"cos_norm", n}, {"expected", 1.0 / (pi * std::sqrt(2.0))},
              {"symmetry_gap", sym}, {"homogeneity_gap", hom}};
  c.ok = std::abs(n - 1.0 / (pi * std::sqrt(2.0))) <= 1e-3 && sym <= 1e-8 && hom <= 1e-8;
  return c;
}

VerifyCheck stripe_energy() {
  const auto w = quartic_well();
  const auto g = make_grid(2, {1.0, 1.0}, {256, 256});
  const auto wp = well_prepared(AnalyticShape::stripe(0.5, 0), g, 0.04, w);
  VerifyCheck c{"energy.stripe_transition_cost", false, {}};
  c.values = {{"G", wp.energy}, {"G0", wp.sharp_energy}};
  c.ok = std::abs(wp.energy - 4.0 / 3.0) <= 0.07 && std::abs(wp.sharp_energy - 4.0 / 3.0) <= 1e-12;
  return c;
}

std::vector<VerifyCheck> flows() {
  const auto w = quartic_well();
  const auto g = make_grid(2, {1.0, 1.0}, {64, 64});
  std::vector<VerifyCheck> out;
  for (Equation eq : {Equation::nlac, Equation::ch}) {
    std::vector<double> res;
    double drift = 0.0;
    bool mono = true;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
      FlowConfig cfg;
      cfg.eps = 0.05;
      cfg.equation = eq;
      cfg.dt = eq == Equation::nlac ? dt : dt / 20;
      cfg.t_end = eq == Equation::nlac ? 0.2 : 0.02;
      cfg.record_every = 1000000;
      const auto rec = run_flow(wavy_stripe(g, cfg.eps), cfg, w);
      res.push_back(rec.samples.back().identity_residual);
      drift = std::max(drift, rec.max_mass_drift);
      mono = mono && rec.energy_monotone;
    }
    const double o1 = std::log2(res[0] / res[1]), o2 = std::log2(res[1] / res[2]);
    VerifyCheck c{"flow." + to_string(eq) + ".mass_and_energy_identity", false, {}};
    c.values = {{"residuals", res}, {"order", {o1, o2}}, {"mass_drift", drift}, {"energy_monotone", mono}};
    c.ok = drift <= 1e-8 && mono && res[0] <= 0.02 && o1 >= 0.9 && o2 >= 0.9;
    out.push_back(c);
  }
  return out;
}

VerifyCheck alpha_properties(std::mt19937_64& rng) {
  const auto g = make_grid(2, {1.0, 1.0}, {16, 16});
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  bool ok = true;
  for (int t = 0; t < 50; ++t) {
    std::vector<std::uint8_t> a(g.size()), b(g.size());
    for (auto& v : a) v = coin(rng);
    for (auto& v : b) v = coin(rng);
    const IndicatorSet A(g, a), B(g, b);
    const double ab = alpha(A, B), ba = alpha(B, A);
    ok = ok && ab >= 0.0 && ab <= 0.5 + 1e-12 && alpha(A, A) == 0.0;
    worst = std::max(worst, std::abs(ab - ba));
  }
  VerifyCheck c{"geometry.alpha_properties", false, {}};
  c.values = {{"max_asymmetry", worst}};
  c.ok = ok && worst <= 1e-12;
  return c;
}

std::vector<VerifyCheck> isoperimetry(std::uint64_t seed) {
  std::vector<VerifyCheck> out;
  auto p = iso_profile_analytic(IsoDomain::unit_square, {0.1, 0.5, 0.9});
  VerifyCheck a{"isoperimetry.square_candidates", false, {}};
  a.values = {{"I_0.1", p.samples[0].I}, {"I_0.5", p.samples[1].I}, {"I_0.9", p.samples[2].I}};
  a.ok = std::abs(p.samples[0].I - std::sqrt(0.1 * pi)) <= 1e-12 && std::abs(p.samples[1].I - 1.0) <= 1e-12 &&
         std::abs(p.samples[2].I - p.samples[0].I) <= 1e-12;
  out.push_back(a);

  const auto g4 = DomainGrid::partition(2, {1.0, 1.0}, {4, 4});
  const auto block = AnalyticShape::custom(
      [](double x, double y) { return std::max(x, y) - 0.5; }, 0.25, 1.0, 0.0, "corner_block");
  const auto e0 = block.rasterize(g4);
  const auto local = iso_profile_exhaustive(g4, {0.25}, ExhaustiveConstraint{e0.members(), 0.05});
  VerifyCheck b{"isoperimetry.corner_block_oracle", false, {}};
  b.values = {{"I", local.samples.at(0).I}, {"tag", local.samples.at(0).tag}};
  b.ok = local.samples.at(0).I == 1.0;
  out.push_back(b);

  const auto g5 = DomainGrid::partition(2, {1.0, 1.0}, {5, 5});
  const auto table = exhaustive_minima(g5);
  AnnealConfig cfg;
  cfg.estimator = PerimeterEstimator::l1;
  cfg.stages = 40;
  cfg.restarts = 2;
  cfg.seed = seed;
  std::vector<double> rs;
  for (int k = 1; k < 25; ++k) rs.push_back(k / 25.0);
  const auto ann = anneal_profile(g5, rs, cfg, [](double x, double y) { return x + 0.9 * y; });
  double worst = 0.0;
  for (const auto& s : ann.samples) worst = std::min(worst, s.I - table.best[std::lround(s.r * 25)]);
  VerifyCheck d{"isoperimetry.oracle_not_beaten", false, {}};
  d.values = {{"min_gap", worst}, {"samples", ann.samples.size()}};
  d.ok = worst >= -1e-12 && ann.samples.size() == 24;
  out.push_back(d);

  const auto ball = AnalyticShape::ball({0.5, 0.5}, 0.25);
  const auto g64 = make_grid(2, {1.0, 1.0}, {64, 64});
  const double r0 = ball.volume();
  const double window = 0.1 * r0;
  const auto tp = local_iso_profile(g64, ball, 1e-3, taylor_lattice(r0, window), LocalMethod::closed_form);
  const auto tr = taylor_check(tp, r0, window);
  std::vector<double> uni;
  for (int k = 0; k <= 180; ++k) uni.push_back(0.05 + 0.9 * k / 180.0);
  const auto sc = semiconcavity_check(iso_profile_analytic(IsoDomain::unit_square, uni));
  std::vector<double> near;
  for (int k = -20; k <= 20; ++k) near.push_back(r0 + k * 0.005);
  const auto sg = supergradient_check(local_iso_profile(g64, ball, 1e-3, near, LocalMethod::closed_form), 0.0, 0.05);
  VerifyCheck e{"isoperimetry.regularity", false, {}};
  e.values = {{"taylor_exponent", tr.exponent}, {"taylor_kink", tr.kink},
              {"semiconcavity_C", sc.finite ? nlohmann::json(sc.C) : nlohmann::json("inf")},
              {"supergradient_derivative_gap", sg.max_derivative_gap}};
  e.ok = tr.exponent >= 1.9 && !tr.kink && sc.finite && sg.max_derivative_gap <= 1e-6;
  out.push_back(e);
  return out;
}

std::vector<VerifyCheck> rearrangement(std::mt19937_64& rng) {
  std::vector<VerifyCheck> out;
  const auto w = quartic_well();
  const auto weight = std::make_shared<const WeightSolution>(
      solve_weight([](double v) { return std::sqrt(std::min(v, 1.0 - v)); }));

  const auto g = make_grid(2, {1.0, 1.0}, {64, 64});
  const auto u = well_prepared(AnalyticShape::stripe(0.5, 0), g, 0.05, w).field;
  double eq_worst = 0.0;
  for (const auto& psi : std::vector<std::function<double(double)>>{
           w.W, [](double x) { return x; }, [](double x) { return x * x; }}) {
    Lemma31Options o;
    o.psi = psi;
    eq_worst = std::max(eq_worst, check_lemma31(u, *weight, o).equal_integral_residual);
  }
  VerifyCheck a{"rearrangement.equal_integral", false, {}};
  a.values = {{"max_residual", eq_worst}};
  a.ok = eq_worst <= 1e-3;
  out.push_back(a);

  const auto g8 = make_grid(2, {1.0, 1.0}, {8, 8});
  std::normal_distribution<double> n01;
  double contraction = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(g8.size()), y(g8.size());
    for (auto& v : x) v = n01(rng);
    for (auto& v : y) v = n01(rng);
    Lemma31Options o;
    o.w = ScalarField(g8, y);
    o.fine_lattice = 256;
    o.lattice = 64;
    contraction = std::min(contraction, check_lemma31(ScalarField(g8, x), *weight, o).contraction_slack);
  }
  VerifyCheck b{"rearrangement.contraction", false, {}};
  b.values = {{"min_slack", contraction}, {"trials", 200}};
  b.ok = contraction >= -1e-6;
  out.push_back(b);

  const auto ball = AnalyticShape::ball({0.5, 0.5}, 0.25);
  std::vector<double> rs;
  for (int k = 1; k < 200; ++k) rs.push_back(k / 200.0);
  const auto ws = solve_weight(build_minorant(patched_ball_profile(ball, rs), ball.volume()));
  const auto base = well_prepared(ball, g, 0.05, w).field;
  const auto e0 = ball.rasterize(g);
  std::uniform_real_distribution<double> amp(-0.02, 0.02), phase(0.0, 2 * pi);
  double ps = std::numeric_limits<double>::infinity();
  bool applicable = true;
  for (int t = 0; t < 20; ++t) {
    const double a1 = amp(rng), a2 = amp(rng), p1 = phase(rng), p2 = phase(rng);
    ScalarField v = base;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        v.at(i, j) += a1 * std::cos(2 * pi * g.x(i) + p1) + a2 * std::cos(4 * pi * g.y(j) + p2);
    Lemma31Options o;
    o.e0 = e0;
    o.delta = 0.15;
    o.fine_lattice = 4096;
    const auto rep = check_lemma31(v, ws, o);
    applicable = applicable && rep.polya_szego_applicable;
    ps = std::min(ps, rep.polya_szego_slack);
  }
  VerifyCheck c{"rearrangement.polya_szego", false, {}};
  c.values = {{"min_slack", ps}, {"trials", 20}, {"applicable", applicable}};
  c.ok = applicable && ps >= -1e-6;
  out.push_back(c);
  return out;
}

std::vector<VerifyCheck> variation() {
  std::vector<VerifyCheck> out;
  const auto b = AnalyticShape::ball({0.5, 0.5}, 0.25);
  const auto dil = first_variation_check(
      b, [](double x, double y) { return std::array{x - 0.5, y - 0.5}; }, {1e-3});
  VerifyCheck a{"variation.first_dilation", false, {}};
  a.values = {{"slope", dil.forward_slope[0]}, {"expected", 2 * pi * 0.25}};
  a.ok = std::abs(dil.forward_slope[0] - 2 * pi * 0.25) <= 0.01 * 2 * pi * 0.25;
  out.push_back(a);

  VerifyCheck s{"variation.second_modes", true, nlohmann::json::object()};
  for (int k : {1, 2, 3}) {
    const auto r = second_variation_check(b, [k](double t) { return std::cos(k * t); }, {1e-3});
    const double expected = pi * k * k / 0.25;
    s.values["k" + std::to_string(k)] = {r.second_difference[0], expected};
    s.ok = s.ok && std::abs(r.second_difference[0] - expected) <= 0.02 * expected;
  }
  const auto one = second_variation_check(b, [](double) { return 1.0; }, {1e-3});
  s.values["zeta_one"] = one.second_difference[0];
  s.ok = s.ok && std::abs(one.second_difference[0]) <= 1e-4;
  out.push_back(s);
  return out;
}

}  // namespace

VerifyReport run_verify(std::uint64_t seed) {
  VerifyReport rep;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  auto add = [&rep](std::vector<VerifyCheck> v) {
    for (auto& c : v) rep.checks.push_back(std::move(c));
  };
  rep.checks.push_back(wells());
  rep.checks.push_back(x2_machinery(rng));
  rep.checks.push_back(stripe_energy());
  add(flows());
  rep.checks.push_back(alpha_properties(rng));
  add(isoperimetry(seed));
  add(rearrangement(rng));
  add(variation());
  return rep;
}

}  // namespace slowmo
