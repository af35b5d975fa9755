#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "slowmo/cli.hpp"
#include "slowmo/config.hpp"
#include "slowmo/error.hpp"
#include "slowmo/io.hpp"

using namespace slowmo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("slowmo_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "slowmo");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("minimal config is filled with defaults") {
  const auto c = parse_config_text("[shape]\nkind = stripe\n");
  CHECK(c.eps == 0.05);
  CHECK(c.resolution == std::vector<int>{256, 256});
  CHECK(c.extents == std::vector<double>{1.0, 1.0});
  CHECK(c.potential == "quartic");
  CHECK(c.dt_for(0.05) == doctest::Approx(0.005));
  CHECK(c.M_value() == 1.0);
  auto ball = parse_config_text("[shape]\nkind = ball\n");
  CHECK(ball.M_value() == 0.5);
  auto ch = parse_config_text("equation = ch\n");
  CHECK(ch.dt_for(0.04) == doctest::Approx(0.0004));
  CHECK(ch.M_value() == 0.5);
}

TEST_CASE("validation errors name the key and line") {
  try {
    parse_config_text("theta = 1\neps = -1\n", "run.cfg");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "eps");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("eps") != std::string::npos);
  }
  CHECK(config_error_key("epsilon = 0.1\n") == "epsilon");
  CHECK(config_error_key("eps = 0.1\neps = 0.2\n") == "eps");
  CHECK(config_error_key("eps_ladder = 0.02, 0.04\n") == "eps_ladder");
  CHECK(config_error_key("[domain]\nresolution = 4\n") == "domain.resolution");
  CHECK(config_error_key("[shape]\nkind = blob\n") == "shape.kind");
  CHECK(config_error_key("eps = abc\n") == "eps");
  try {
    parse_config_text("a\n", "x.cfg");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("x.cfg:1") != std::string::npos);
  }
}

TEST_CASE("mask shape with a missing file names the path") {
  try {
    parse_config_text("[shape]\nkind = mask\nmask = /no/such/mask.pbm\n");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "shape.mask");
    CHECK(std::string(e.what()).find("/no/such/mask.pbm") != std::string::npos);
  }
}

TEST_CASE("canonical dump re-parses to the same config") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.49);
  for (int t = 0; t < 50; ++t) {
    RunConfig c;
    c.eps = u(rng) / 5;
    c.theta = 2 * u(rng);
    c.shape_kind = t % 2 ? "ball" : "stripe";
    c.shape_radius = u(rng) * 0.5;
    c.shape_position = 2 * u(rng);
    c.eps_ladder = {0.3, u(rng) / 2};
    if (t % 3 == 0) c.dt = u(rng) / 100;
    if (t % 4 == 0) c.M = 3 * u(rng);
    c.seed = rng();
    validate(c);
    const std::string dump = canonical_dump(c);
    const RunConfig back = parse_config_text(dump);
    CHECK(back == c);
    CHECK(canonical_dump(back) == dump);
    CHECK(config_hash(back) == config_hash(c));
  }
}

TEST_CASE("overrides apply before one validation pass") {
  const fs::path dir = scratch("overrides");
  std::ofstream(dir / "m.pbm") << "P1\n8 8\n" << std::string(64, '0') << "\n";
  RunConfig c = parse_config_text("");
  apply_overrides(c, {"shape.kind=mask", "shape.mask=" + (dir / "m.pbm").string()});
  CHECK(c.shape_kind == "mask");
  CHECK_THROWS_AS(apply_override(c, "eps"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "nope=1"), ConfigError);
  RunConfig d = parse_config_text("");
  d.output_dir = "elsewhere";
  CHECK(config_hash(d) == config_hash(parse_config_text("")));
  CHECK_FALSE(d == parse_config_text(""));
}

TEST_CASE("checkpoint round trip is bit-exact") {
  const fs::path dir = scratch("checkpoint");
  auto g = make_grid(2, {1.0, 2.0}, {16, 24});
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  std::vector<double> v(g.size());
  for (auto& x : v) x = n01(rng);
  v[3] = -0.0;
  v[5] = 1e-310;
  const ScalarField u(g, v);
  write_checkpoint((dir / "u.pfck").string(), u, 0xabcdefULL);
  const auto back = read_checkpoint((dir / "u.pfck").string());
  CHECK(back.config_hash == 0xabcdefULL);
  CHECK(back.field.grid() == g);
  CHECK(std::memcmp(back.field.raw().data(), v.data(), v.size() * sizeof(double)) == 0);

  std::ofstream(dir / "bad.pfck") << "nope";
  CHECK_THROWS_AS(read_checkpoint((dir / "bad.pfck").string()), Error);
}

TEST_CASE("pbm masks round trip with the top row first") {
  const fs::path dir = scratch("pbm");
  auto g = make_grid(2, {1.0, 1.0}, {8, 8});
  const auto E = AnalyticShape::quarter_disk(0, 0.6).rasterize(g);
  write_pbm((dir / "e.pbm").string(), E);
  CHECK(read_pbm((dir / "e.pbm").string(), g) == E);
  const std::string text = slurp(dir / "e.pbm");
  CHECK(text.rfind("P1\n8 8\n", 0) == 0);
  CHECK(text.substr(text.size() - 16) == "1 1 1 1 1 0 0 0\n");  // bottom row holds the corner
  CHECK_THROWS_AS(read_pbm((dir / "e.pbm").string(), make_grid(2, {1.0, 1.0}, {16, 16})), GridMismatch);
}

TEST_CASE("csv outputs carry the config hash") {
  const fs::path dir = scratch("csv");
  const auto p = iso_profile_analytic(IsoDomain::unit_square, {0.1, 0.5});
  write_profile_csv((dir / "p.csv").string(), p, 0x1234ULL);
  std::istringstream in(slurp(dir / "p.csv"));
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(l1.rfind("# slowmo version=1 config=0000000000001234", 0) == 0);
  CHECK(l2 == "r,I,minimizer_tag,method");
  const auto back = read_profile_csv((dir / "p.csv").string());
  REQUIRE(back.samples.size() == 2);
  CHECK(back.samples[1].I == p.samples[1].I);
  CHECK(back.samples[0].tag == p.samples[0].tag);
  CHECK(back.domain == "unit_square");

  CHECK(profile_cache_path("c", "unit_square", "annealed", 0.0, 1, 64) !=
        profile_cache_path("c", "unit_square", "annealed", 0.0, 1, 128));
}

TEST_CASE("cli exit codes and outputs") {
  const fs::path dir = scratch("cli");
  CHECK(cli({"frobnicate"}) == 2);
  CHECK(cli({}) == 2);
  CHECK(cli({"simulate", "--set", "eps=-1"}) == 2);
  CHECK(cli({"simulate", "--config", (dir / "missing.cfg").string()}) == 2);
  CHECK(cli({"variation-check", "--set", "output_dir=" + dir.string()}) == 2);  // stripe

  CHECK(cli({"iso-profile", "--set", "domain=unit_square", "--set", "output_dir=" + dir.string()}) == 0);
  CHECK(fs::exists(dir / "profile.csv"));
  CHECK(fs::exists(dir / "config.ini"));
  const auto echo = slurp(dir / "config.ini");
  const RunConfig reparsed = parse_config_text(echo);
  CHECK(reparsed.iso_domain == "unit_square");

  std::ofstream(dir / "stripe.cfg") << "eps_ladder = 0.12, 0.06\nM = 0.2\noutput_dir = " << (dir / "sm").string()
                                    << "\n[domain]\nresolution = 64\n";
  CHECK(cli({"slow-motion", "--config", (dir / "stripe.cfg").string()}) == 0);
  CHECK(fs::exists(dir / "sm" / "slow-motion_manifest.json"));
  CHECK(fs::exists(dir / "sm" / "D_vs_eps.dat"));
  CHECK(fs::exists(dir / "sm" / "trajectory_eps0.06.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "sm" / "slow-motion_manifest.json"));
  CHECK(manifest["passed"] == true);
  CHECK(manifest["config_hash"] == hash_hex(config_hash(parse_config((dir / "stripe.cfg").string()))));
}
