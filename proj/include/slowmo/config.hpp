#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slowmo {

/**
 * Run configuration read from an INI-like file.
 *
 * Keys before any section are top level; `[shape]` followed by `radius = 0.25`
 * sets `shape.radius`. Lists are comma separated. Unknown keys are errors.
 */
struct RunConfig {
  // grid
  int dim = 2;
  std::vector<double> extents = {1.0, 1.0};
  std::vector<int> resolution = {256, 256};
  // model
  std::string potential = "quartic";
  double theta = 1.0;
  double eps = 0.05;
  std::vector<double> eps_ladder = {0.08, 0.04, 0.02};
  std::optional<double> dt;  // default: eps/10 (nlac), eps^2/4 (ch)
  std::optional<double> t_end;  // default: M / eps
  std::string scheme = "semi_implicit_split";
  double stabilization = 3.5;
  std::string equation = "nlac";
  int record_every = 1;
  // initial interface
  std::string shape_kind = "stripe";  // stripe, ball, quarter_disk, mask
  double shape_position = 0.5;
  int shape_axis = 0;
  std::vector<double> shape_center = {0.5, 0.5};
  double shape_radius = 0.25;
  int shape_corner = 0;
  std::string shape_mask;  // PBM file for kind = mask
  // experiments
  std::optional<double> M;  // default: 1 for a stripe under nlac, else 0.5
  double delta = 0.05;
  // isoperimetry
  std::string iso_domain = "unit_square";
  std::string iso_method = "analytic";  // analytic, exhaustive, annealed, local
  int iso_samples = 99;
  int anneal_restarts = 10;
  int anneal_stages = 300;
  std::string profile_cache;  // directory; empty disables caching
  // output
  std::string output_dir = "slowmo_out";
  std::uint64_t seed = 1;

  double dt_for(double eps_value) const;
  double M_value() const;

  /// source line per key (0 for defaults and overrides); not part of equality
  std::map<std::string, int> lines;
};

/// Parses and validates; throws ConfigError naming the key and line.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
/// `key=value` with the file's dotted key names.
void apply_override(RunConfig& cfg, const std::string& assignment);
/// All assignments first, then one validation pass.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments);
/// Checks cross-key constraints and file references; throws ConfigError.
void validate(const RunConfig& cfg);

/// Canonical dump: every key, fixed order, doubles at 17 significant digits.
std::string canonical_dump(const RunConfig& cfg);
/// 64-bit FNV-1a of the canonical dump, output_dir and profile_cache excluded.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t h);
std::uint64_t fnv1a(const std::string& bytes);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace slowmo
