#include "slowmo/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "slowmo/energy.hpp"
#include "slowmo/error.hpp"
#include "slowmo/experiments.hpp"
#include "slowmo/flow.hpp"
#include "slowmo/io.hpp"
#include "slowmo/isoperimetry.hpp"
#include "slowmo/potential.hpp"
#include "slowmo/rearrangement.hpp"
#include "slowmo/variation.hpp"
#include "slowmo/verify.hpp"

namespace slowmo {

using nlohmann::json;
using std::numbers::pi;
namespace fs = std::filesystem;

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig cfg = path.empty() ? parse_config_text("", "<defaults>") : parse_config(path);
  if (!overrides.empty()) apply_overrides(cfg, overrides);
  return cfg;
}

DomainGrid grid_from_config(const RunConfig& cfg) {
  if (cfg.iso_method == "exhaustive") return DomainGrid::partition(cfg.dim, cfg.extents, cfg.resolution);
  return make_grid(cfg.dim, cfg.extents, cfg.resolution);
}

AnalyticShape shape_from_config(const RunConfig& cfg) {
  const double lx = cfg.extents[0], ly = cfg.extents.size() > 1 ? cfg.extents[1] : 1.0;
  if (cfg.shape_kind == "stripe") return AnalyticShape::stripe(cfg.shape_position, cfg.shape_axis, lx, ly);
  if (cfg.shape_kind == "ball") {
    return AnalyticShape::ball({cfg.shape_center[0], cfg.shape_center[1]}, cfg.shape_radius, lx, ly);
  }
  if (cfg.shape_kind == "quarter_disk") return AnalyticShape::quarter_disk(cfg.shape_corner, cfg.shape_radius, lx, ly);
  throw ConfigError("key 'shape.kind': this command needs an analytic shape, not '" + cfg.shape_kind + "'",
                    "shape.kind");
}

IndicatorSet initial_set(const RunConfig& cfg, const DomainGrid& grid) {
  if (cfg.shape_kind == "mask") return read_pbm(cfg.shape_mask, grid);
  return shape_from_config(cfg).rasterize(grid);
}

namespace {

struct Outcome {
  json manifest;
  std::vector<std::string> failures;
};

void assert_that(Outcome& o, const std::string& name, bool ok, json value) {
  o.manifest["assertions"].push_back({{"name", name}, {"ok", ok}, {"value", std::move(value)}});
  if (!ok) o.failures.push_back(name);
}

std::vector<double> sample_volumes(int n) {
  std::vector<double> rs;
  for (int k = 1; k <= n; ++k) rs.push_back(static_cast<double>(k) / (n + 1));
  return rs;
}

json grid_json(const DomainGrid& g) {
  return {{"dim", g.dim()}, {"nx", g.nx()}, {"ny", g.ny()}, {"lx", g.lx()}, {"ly", g.ly()}};
}

Outcome simulate(const RunConfig& cfg, std::uint64_t hash) {
  Outcome o;
  const auto grid = grid_from_config(cfg);
  const auto w = well_by_name(cfg.potential);
  require_resolved(grid, cfg.eps);
  const auto E0 = initial_set(cfg, grid);
  const auto wp = cfg.shape_kind == "mask" ? well_prepared(E0, cfg.eps, w, cfg.theta)
                                           : well_prepared(shape_from_config(cfg), grid, cfg.eps, w, cfg.theta);
  FlowConfig fc;
  fc.eps = cfg.eps;
  fc.dt = cfg.dt_for(cfg.eps);
  fc.scheme = scheme_from_string(cfg.scheme);
  fc.stabilization = cfg.stabilization;
  fc.t_end = cfg.t_end.value_or(cfg.M_value() / cfg.eps);
  fc.record_every = cfg.record_every;
  fc.equation = equation_from_string(cfg.equation);
  fc.theta = cfg.theta;
  const auto rec = run_flow(wp.field, fc, w, sharp_interface_field(E0));
  const fs::path dir = cfg.output_dir;
  write_trajectory_csv((dir / "trajectory.csv").string(), rec, hash);
  if (rec.final_state) write_checkpoint((dir / "final.pfck").string(), *rec.final_state, hash);
  write_pbm((dir / "initial_set.pbm").string(), E0);
  o.manifest["grid"] = grid_json(grid);
  o.manifest["eps"] = cfg.eps;
  o.manifest["dt"] = fc.dt;
  o.manifest["t_end"] = fc.t_end;
  o.manifest["steps"] = rec.steps;
  o.manifest["initial_energy"] = wp.energy;
  o.manifest["final_energy"] = rec.samples.back().energy.total;
  o.manifest["sup_dist_L1"] = rec.sup_dist_L1;
  o.manifest["sup_dist_L2"] = rec.sup_dist_L2;
  assert_that(o, "mass_drift", rec.max_mass_drift <= 1e-8, rec.max_mass_drift);
  if (fc.scheme == Scheme::semi_implicit_split) {
    assert_that(o, "energy_monotone", rec.energy_monotone, rec.max_energy_increase);
  }
  return o;
}

Outcome iso_profile(const RunConfig& cfg, std::uint64_t hash) {
  Outcome o;
  const auto domain = iso_domain_from_string(cfg.iso_domain);
  const auto grid = grid_from_config(cfg);
  AnnealConfig ac;
  ac.restarts = cfg.anneal_restarts;
  ac.stages = cfg.anneal_stages;
  ac.seed = cfg.seed;
  std::uint64_t e0_hash = 0;
  if (cfg.iso_method == "local") e0_hash = set_hash(initial_set(cfg, grid));
  const double delta = cfg.iso_method == "local" ? cfg.delta : 0.0;
  std::string cache;
  if (!cfg.profile_cache.empty()) {
    cache = profile_cache_path(cfg.profile_cache, cfg.iso_domain, cfg.iso_method, delta, e0_hash, grid.nx());
  }
  IsoProfile p;
  bool cached = false;
  if (!cache.empty() && fs::exists(cache)) {
    p = read_profile_csv(cache);
    cached = true;
  } else if (cfg.iso_method == "analytic") {
    p = iso_profile_analytic(domain, sample_volumes(cfg.iso_samples), cfg.extents[0]);
  } else if (cfg.iso_method == "exhaustive") {
    std::vector<double> rs;
    for (std::size_t k = 1; k < grid.size(); ++k) rs.push_back(k * grid.cell_volume());
    p = iso_profile_exhaustive(grid, rs);
  } else if (cfg.iso_method == "annealed") {
    p = anneal_profile(grid, sample_volumes(cfg.iso_samples), ac,
                       [](double x, double y) { return x * x + y * y; });
  } else {
    const auto shape = shape_from_config(cfg);
    const LocalMethod m = shape.kind() == ShapeKind::ball ? LocalMethod::closed_form
                          : grid.size() <= static_cast<std::size_t>(kMaxExhaustiveCells) ? LocalMethod::exhaustive
                                                                                          : LocalMethod::annealed;
    // local profiles live near |E0|
    const double r0 = shape.volume() / (grid.lx() * grid.ly());
    const double half = 0.5 * std::min(r0, 1.0 - r0);
    std::vector<double> rs;
    for (double t : sample_volumes(cfg.iso_samples)) rs.push_back(r0 - half + 2.0 * half * t);
    p = local_iso_profile(grid, shape, cfg.delta, rs, m, ac);
  }
  if (p.domain.empty()) p.domain = cfg.iso_domain;
  const fs::path dir = cfg.output_dir;
  write_profile_csv((dir / "profile.csv").string(), p, hash);
  if (!cache.empty() && !cached) write_profile_csv(cache, p, hash);
  o.manifest["method"] = p.method;
  o.manifest["samples"] = p.samples.size();
  o.manifest["cache"] = cache.empty() ? json(nullptr) : json(cache);
  o.manifest["cache_hit"] = cached;
  if (!p.notice.empty()) o.manifest["notice"] = p.notice;
  bool positive = true;
  for (const auto& s : p.samples) positive = positive && s.I > 0.0 && std::isfinite(s.I);
  assert_that(o, "profile_positive", positive, p.samples.size());
  return o;
}

Outcome rearrange(const RunConfig& cfg, std::uint64_t hash) {
  Outcome o;
  const auto grid = grid_from_config(cfg);
  const auto w = well_by_name(cfg.potential);
  require_resolved(grid, cfg.eps);
  const auto shape = shape_from_config(cfg);
  const double r0 = shape.volume();
  std::vector<double> rs = sample_volumes(std::max(cfg.iso_samples, 199));
  const IsoProfile prof = shape.kind() == ShapeKind::ball
                              ? patched_ball_profile(shape, rs)
                              : iso_profile_analytic(iso_domain_from_string(cfg.iso_domain), rs, cfg.extents[0]);
  const Minorant m = build_minorant(prof, r0);
  const auto mc = verify_minorant(m, prof);
  auto weight = std::make_shared<const WeightSolution>(solve_weight(m));
  const auto wp = well_prepared(shape, grid, cfg.eps, w, cfg.theta);
  const Rearrangement R(wp.field, weight);
  write_rearrangement_csv((fs::path(cfg.output_dir) / "rearrangement.csv").string(), R, 1024, hash);

  double residual = 0.0;
  for (const auto& psi : std::vector<std::function<double(double)>>{
           w.W, [](double x) { return x; }, [](double x) { return x * x; }}) {
    Lemma31Options opt;
    opt.psi = psi;
    residual = std::max(residual, check_lemma31(wp.field, *weight, opt).equal_integral_residual);
  }
  const auto F = f_eps([&R](double s) { return R.f_interp(s); }, cfg.eps, w, *weight, std::nullopt, cfg.theta);
  const double G = energy_G(wp.field, cfg.eps, w, cfg.theta).total;
  o.manifest["minorant"] = {{"constant", m.constant()}, {"exponent", m.exponent()},
                            {"blend", m.blend_active()}, {"holder", m.holder_tag()}};
  o.manifest["S1"] = weight->S1();
  o.manifest["S2"] = weight->S2();
  o.manifest["G_eps"] = G;
  o.manifest["F_eps"] = F.value;
  o.manifest["G0"] = sharp_energy_G0(shape, w, cfg.theta);
  assert_that(o, "minorant", mc.ok, mc.max_excess);
  assert_that(o, "equal_integral", residual <= 1e-3, residual);
  assert_that(o, "sandwich_upper", F.value <= G + 1e-3, G - F.value);
  return o;
}

Outcome variation(const RunConfig& cfg, std::uint64_t) {
  Outcome o;
  const auto b = shape_from_config(cfg);
  if (b.kind() != ShapeKind::ball) {
    throw ConfigError("key 'shape.kind': variation-check needs kind = ball", "shape.kind");
  }
  const double rho = b.radius();
  const auto c = b.center();
  const auto dil = first_variation_check(
      b, [c](double x, double y) { return std::array{x - c[0], y - c[1]}; }, {1e-3});
  const double p1 = 2 * pi * rho;
  o.manifest["first_dilation"] = {{"slope", dil.forward_slope[0]}, {"expected", p1}};
  assert_that(o, "first_dilation", std::abs(dil.forward_slope[0] - p1) <= 0.01 * p1, dil.forward_slope[0]);
  for (int k : {1, 2, 3}) {
    const auto r = second_variation_check(b, [k](double t) { return std::cos(k * t); }, {1e-3});
    const double e = pi * k * k / rho;
    o.manifest["second_mode_" + std::to_string(k)] = {{"second_difference", r.second_difference[0]}, {"expected", e}};
    assert_that(o, "second_mode_" + std::to_string(k), std::abs(r.second_difference[0] - e) <= 0.02 * e,
                r.second_difference[0]);
  }
  const auto one = second_variation_check(b, [](double) { return 1.0; }, {1e-3});
  assert_that(o, "second_zeta_one", std::abs(one.second_difference[0]) <= 1e-4, one.second_difference[0]);
  return o;
}

Outcome slow_motion(const RunConfig& cfg, std::uint64_t hash) {
  Outcome o;
  if (cfg.dim != 2 || cfg.resolution[0] != cfg.resolution[1]) {
    throw ConfigError("key 'domain.resolution': slow-motion runs on square 2D grids", "domain.resolution");
  }
  if (cfg.dt) throw ConfigError("key 'dt': slow-motion derives dt per rung from eps", "dt");
  if (cfg.t_end) throw ConfigError("key 't_end': slow-motion runs each rung to M/eps", "t_end");
  SlowMotionConfig sc;
  sc.equation = equation_from_string(cfg.equation);
  sc.shape = shape_from_config(cfg);
  sc.eps_ladder = cfg.eps_ladder;
  sc.M = cfg.M_value();
  sc.resolution = cfg.resolution[0];
  sc.theta = cfg.theta;
  sc.stabilization = cfg.stabilization;
  sc.keep_trajectories = true;
  const auto rep = slow_motion_sweep(sc, well_by_name(cfg.potential));
  const fs::path dir = cfg.output_dir;
  for (const auto& r : rep.rungs) {
    char name[64];
    std::snprintf(name, sizeof name, "trajectory_eps%g.csv", r.eps);
    if (r.trajectory) write_trajectory_csv((dir / name).string(), *r.trajectory, hash);
  }
  write_d_vs_eps((dir / "D_vs_eps.dat").string(), rep, hash);
  o.manifest["report"] = to_json(rep);
  o.manifest["grid"] = {{"nx", sc.resolution}, {"ny", sc.resolution}};
  o.manifest["ladder"] = sc.eps_ladder;
  if (rep.asserted) {
    assert_that(o, "D_decreasing", rep.strictly_decreasing, rep.rate);
  } else {
    o.manifest["notice"] = "initial data not well prepared: exploratory run, decrease not asserted";
  }
  assert_that(o, "mass_drift", rep.max_mass_drift <= 1e-8, rep.max_mass_drift);
  bool mono = true;
  for (const auto& r : rep.rungs) mono = mono && r.energy_monotone;
  assert_that(o, "energy_monotone", mono, mono);
  return o;
}

Outcome verify(const RunConfig& cfg, std::uint64_t) {
  Outcome o;
  const auto rep = run_verify(cfg.seed);
  o.manifest["seed"] = rep.seed;
  for (const auto& c : rep.checks) assert_that(o, c.name, c.ok, c.values);
  return o;
}

int report(const std::string& command, const RunConfig& cfg, Outcome o) {
  const std::uint64_t hash = config_hash(cfg);
  o.manifest["command"] = command;
  o.manifest["config_hash"] = hash_hex(hash);
  o.manifest["format_version"] = kFormatVersion;
  o.manifest["passed"] = o.failures.empty();
  o.manifest["failures"] = o.failures;
  if (!o.manifest.contains("assertions")) o.manifest["assertions"] = json::array();
  const fs::path dir = cfg.output_dir;
  write_json((dir / (command + "_manifest.json")).string(), o.manifest);
  if (!o.failures.empty()) {
    std::cout << json{{"command", command}, {"failures", o.failures}}.dump() << "\n";
    return 1;
  }
  std::cout << command << ": ok (" << (dir / (command + "_manifest.json")).string() << ")\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Phase-field slow motion and isoperimetric profile toolkit", "slowmo"};
  app.require_subcommand(1, 1);
  struct Args {
    std::string config;
    std::vector<std::string> sets;
    bool print_config = false;
  };
  using Runner = Outcome (*)(const RunConfig&, std::uint64_t);
  const std::vector<std::tuple<std::string, std::string, Runner>> commands = {
      {"simulate", "Run one flow from the configured initial set", simulate},
      {"iso-profile", "Compute an isoperimetric profile and write it as CSV", iso_profile},
      {"rearrange", "Build the weighted rearrangement of well-prepared data", rearrange},
      {"variation-check", "Check first and second variation formulas on a circle", variation},
      {"slow-motion", "Run the eps ladder and report D(eps)", slow_motion},
      {"verify", "Run the property battery headlessly", verify},
  };
  std::vector<Args> args(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    auto* sub = app.add_subcommand(std::get<0>(commands[k]), std::get<1>(commands[k]));
    sub->add_option("--config", args[k].config, "INI-style configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", args[k].sets, "Override as key=value (repeatable)");
    sub->add_flag("--print-config", args[k].print_config, "Print the normalized configuration and exit");
    subs.push_back(sub);
  }
  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto& c : commands) known = known || std::get<0>(c) == argv[1];
    if (!known) {
      std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
      return 2;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  for (std::size_t k = 0; k < commands.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    const std::string& name = std::get<0>(commands[k]);
    try {
      const RunConfig cfg = load_config(args[k].config, args[k].sets);
      if (args[k].print_config) {
        std::cout << canonical_dump(cfg);
        return 0;
      }
      fs::create_directories(cfg.output_dir);
      {
        std::ofstream echo(fs::path(cfg.output_dir) / "config.ini");
        echo << "# config=" << hash_hex(config_hash(cfg)) << "\n" << canonical_dump(cfg);
      }
      return report(name, cfg, std::get<2>(commands[k])(cfg, config_hash(cfg)));
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const InvalidArgument& e) {
      std::cerr << "invalid input: " << e.what() << "\n";
      return 2;
    } catch (const ResolutionError& e) {
      std::cerr << "invalid input: " << e.what() << "\n";
      return 2;
    } catch (const GridMismatch& e) {
      std::cerr << "invalid input: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cout << json{{"command", name}, {"failures", {std::string("error: ") + e.what()}}}.dump() << "\n";
      return 1;
    }
  }
  return 2;
}

}  // namespace slowmo
