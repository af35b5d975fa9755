#include "slowmo/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "slowmo/error.hpp"
#include "slowmo/flow.hpp"
#include "slowmo/isoperimetry.hpp"
#include "slowmo/potential.hpp"

namespace slowmo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number", key, line);
  }
  return x;
}

long long to_int(const std::string& key, const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer", key, line);
  }
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  for (const auto& it : split_list(v)) out.push_back(to_double(key, it, line));
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

struct KeySpec {
  std::function<void(RunConfig&, const std::string&, int)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;  // nullopt: omitted
};

const std::vector<std::pair<std::string, KeySpec>>& key_table() {
  using K = std::string;
  static const std::vector<std::pair<std::string, KeySpec>> table = [] {
    std::vector<std::pair<std::string, KeySpec>> t;
    auto dbl = [&t](const K& k, double RunConfig::*m) {
      t.push_back({k,
                   {[k, m](RunConfig& c, const std::string& v, int l) { c.*m = to_double(k, v, l); },
                    [m](const RunConfig& c) -> std::optional<std::string> { return fmt(c.*m); }}});
    };
    auto opt_dbl = [&t](const K& k, std::optional<double> RunConfig::*m) {
      t.push_back({k,
                   {[k, m](RunConfig& c, const std::string& v, int l) { c.*m = to_double(k, v, l); },
                    [m](const RunConfig& c) -> std::optional<std::string> {
                      if (!(c.*m)) return std::nullopt;
                      return fmt(*(c.*m));
                    }}});
    };
    auto integer = [&t](const K& k, int RunConfig::*m) {
      t.push_back({k,
                   {[k, m](RunConfig& c, const std::string& v, int l) {
                      c.*m = static_cast<int>(to_int(k, v, l));
                    },
                    [m](const RunConfig& c) -> std::optional<std::string> {
                      return std::to_string(c.*m);
                    }}});
    };
    auto str = [&t](const K& k, std::string RunConfig::*m) {
      t.push_back({k,
                   {[m](RunConfig& c, const std::string& v, int) { c.*m = v; },
                    [m](const RunConfig& c) -> std::optional<std::string> { return c.*m; }}});
    };
    auto dlist = [&t](const K& k, std::vector<double> RunConfig::*m) {
      t.push_back({k,
                   {[k, m](RunConfig& c, const std::string& v, int l) { c.*m = to_doubles(k, v, l); },
                    [m](const RunConfig& c) -> std::optional<std::string> { return join(c.*m); }}});
    };
    // top level
    str("potential", &RunConfig::potential);
    dbl("theta", &RunConfig::theta);
    dbl("eps", &RunConfig::eps);
    dlist("eps_ladder", &RunConfig::eps_ladder);
    opt_dbl("dt", &RunConfig::dt);
    opt_dbl("t_end", &RunConfig::t_end);
    str("scheme", &RunConfig::scheme);
    dbl("stabilization", &RunConfig::stabilization);
    str("equation", &RunConfig::equation);
    integer("record_every", &RunConfig::record_every);
    opt_dbl("M", &RunConfig::M);
    dbl("delta", &RunConfig::delta);
    str("domain", &RunConfig::iso_domain);
    str("profile_cache", &RunConfig::profile_cache);
    str("output_dir", &RunConfig::output_dir);
    t.push_back({"seed",
                 {[](RunConfig& c, const std::string& v, int l) {
                    if (!v.empty() && v[0] == '-') throw ConfigError("seed must be non-negative", "seed", l);
                    errno = 0;
                    char* end = nullptr;
                    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
                    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
                      throw ConfigError("key 'seed': '" + v + "' is not an unsigned integer", "seed", l);
                    }
                    c.seed = x;
                  },
                  [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.seed); }}});
    // [domain]
    integer("domain.dim", &RunConfig::dim);
    dlist("domain.extents", &RunConfig::extents);
    t.push_back({"domain.resolution",
                 {[](RunConfig& c, const std::string& v, int l) {
                    c.resolution.clear();
                    for (const auto& it : split_list(v)) {
                      c.resolution.push_back(static_cast<int>(to_int("domain.resolution", it, l)));
                    }
                  },
                  [](const RunConfig& c) -> std::optional<std::string> { return join(c.resolution); }}});
    // [shape]
    str("shape.kind", &RunConfig::shape_kind);
    dbl("shape.position", &RunConfig::shape_position);
    integer("shape.axis", &RunConfig::shape_axis);
    dlist("shape.center", &RunConfig::shape_center);
    dbl("shape.radius", &RunConfig::shape_radius);
    integer("shape.corner", &RunConfig::shape_corner);
    str("shape.mask", &RunConfig::shape_mask);
    // [iso], [anneal]
    str("iso.method", &RunConfig::iso_method);
    integer("iso.samples", &RunConfig::iso_samples);
    integer("anneal.restarts", &RunConfig::anneal_restarts);
    integer("anneal.stages", &RunConfig::anneal_stages);
    return t;
  }();
  return table;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& [k, spec] : key_table()) {
    if (k == key) return &spec;
  }
  return nullptr;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("unknown key '" + key + "'", key, line);
  spec->set(cfg, value, line);
  cfg.lines[key] = line;
}

int line_of(const RunConfig& cfg, const std::string& key) {
  const auto it = cfg.lines.find(key);
  return it == cfg.lines.end() ? 0 : it->second;
}

// A one-element list on a 2D grid applies to both axes.
void normalize(RunConfig& cfg) {
  if (cfg.dim == 1) {
    if (cfg.resolution.size() == 2 && cfg.resolution[0] == cfg.resolution[1]) cfg.resolution.resize(1);
    if (cfg.extents.size() == 2 && cfg.extents[0] == 1.0 && cfg.extents[1] == 1.0) cfg.extents = {1.0};
  } else if (cfg.dim == 2) {
    if (cfg.resolution.size() == 1) cfg.resolution.push_back(cfg.resolution[0]);
  }
}

}  // namespace

double RunConfig::M_value() const {
  if (M) return *M;
  return equation == "nlac" && shape_kind == "stripe" ? 1.0 : 0.5;
}

double RunConfig::dt_for(double eps_value) const {
  if (dt) return *dt;
  return equation == "ch" ? 0.25 * eps_value * eps_value : 0.1 * eps_value;
}

void validate(const RunConfig& c) {
  auto fail = [&c](const std::string& key, const std::string& msg) {
    throw ConfigError("key '" + key + "': " + msg, key, line_of(c, key));
  };
  if (c.dim != 1 && c.dim != 2) fail("domain.dim", "must be 1 or 2");
  if (c.extents.size() != static_cast<std::size_t>(c.dim)) fail("domain.extents", "needs one value per axis");
  for (double e : c.extents) {
    if (!(e > 0.0)) fail("domain.extents", "must be positive");
  }
  if (c.resolution.size() != static_cast<std::size_t>(c.dim)) {
    fail("domain.resolution", "needs one value per axis");
  }
  // exhaustive enumeration runs on coarse partitions of at most 25 cells
  const bool coarse = c.iso_method == "exhaustive";
  std::size_t cells = 1;
  for (int n : c.resolution) {
    if (n < (coarse ? 1 : 8)) fail("domain.resolution", coarse ? "must be positive" : "must be at least 8");
    cells *= static_cast<std::size_t>(n);
  }
  if (coarse && cells > 25) fail("domain.resolution", "exhaustive enumeration needs at most 25 cells");
  try {
    well_by_name(c.potential);
  } catch (const Error& e) {
    fail("potential", e.what());
  }
  if (!(c.theta > 0.0)) fail("theta", "must be positive");
  if (!(c.eps > 0.0)) fail("eps", "must be positive");
  if (c.eps_ladder.empty()) fail("eps_ladder", "must not be empty");
  for (std::size_t k = 0; k < c.eps_ladder.size(); ++k) {
    if (!(c.eps_ladder[k] > 0.0)) fail("eps_ladder", "entries must be positive");
    if (k > 0 && !(c.eps_ladder[k] < c.eps_ladder[k - 1])) fail("eps_ladder", "must be strictly decreasing");
  }
  if (c.dt && !(*c.dt > 0.0)) fail("dt", "must be positive");
  if (c.t_end && !(*c.t_end > 0.0)) fail("t_end", "must be positive");
  try {
    scheme_from_string(c.scheme);
  } catch (const Error& e) {
    fail("scheme", e.what());
  }
  try {
    equation_from_string(c.equation);
  } catch (const Error& e) {
    fail("equation", e.what());
  }
  if (!(c.stabilization >= 0.0)) fail("stabilization", "must be non-negative");
  if (c.record_every < 1) fail("record_every", "must be at least 1");
  if (c.shape_kind == "stripe") {
    if (c.shape_axis != 0 && c.shape_axis != 1) fail("shape.axis", "must be 0 or 1");
    if (!(c.shape_position > 0.0 && c.shape_position < 1.0)) fail("shape.position", "must lie in (0,1)");
  } else if (c.shape_kind == "ball") {
    if (c.shape_center.size() != 2) fail("shape.center", "needs two coordinates");
    if (!(c.shape_radius > 0.0)) fail("shape.radius", "must be positive");
  } else if (c.shape_kind == "quarter_disk") {
    if (c.shape_corner < 0 || c.shape_corner > 3) fail("shape.corner", "must be 0..3");
    if (!(c.shape_radius > 0.0)) fail("shape.radius", "must be positive");
  } else if (c.shape_kind == "mask") {
    if (c.shape_mask.empty()) fail("shape.mask", "required for kind = mask");
    if (!std::filesystem::exists(c.shape_mask)) fail("shape.mask", "file '" + c.shape_mask + "' not found");
  } else {
    fail("shape.kind", "unknown shape kind '" + c.shape_kind + "'");
  }
  if (c.M && !(*c.M > 0.0)) fail("M", "must be positive");
  if (!(c.delta > 0.0)) fail("delta", "must be positive");
  try {
    iso_domain_from_string(c.iso_domain);
  } catch (const Error& e) {
    fail("domain", e.what());
  }
  if (c.iso_method != "analytic" && c.iso_method != "exhaustive" && c.iso_method != "annealed" &&
      c.iso_method != "local") {
    fail("iso.method", "must be analytic, exhaustive, annealed or local");
  }
  if (c.iso_samples < 1) fail("iso.samples", "must be positive");
  if (c.anneal_restarts < 1) fail("anneal.restarts", "must be positive");
  if (c.anneal_stages < 1) fail("anneal.stages", "must be positive");
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(origin + ":" + std::to_string(line) + ": unterminated section", "", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(origin + ":" + std::to_string(line) + ": empty section name", "", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": expected 'key = value'", "", line);
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line) + ": empty key", "", line);
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.lines.count(full) && cfg.lines[full] > 0) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": duplicate key '" + full + "'", full, line);
    }
    set_key(cfg, full, value, line);
  }
  normalize(cfg);
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'", "", 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) { apply_overrides(cfg, {assignment}); }

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + a + "' is not key=value", "", 0);
    set_key(cfg, trim(a.substr(0, eq)), trim(a.substr(eq + 1)), 0);
  }
  normalize(cfg);
  validate(cfg);
}

std::string canonical_dump(const RunConfig& cfg) {
  std::string top, current;
  std::map<std::string, std::string> sections;
  for (const auto& [key, spec] : key_table()) {
    const auto v = spec.get(cfg);
    if (!v) continue;
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      top += key + " = " + *v + "\n";
    } else {
      sections[key.substr(0, dot)] += key.substr(dot + 1) + " = " + *v + "\n";
    }
  }
  std::string out = top;
  for (const auto& [name, body] : sections) out += "\n[" + name + "]\n" + body;
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // output locations do not change results
  RunConfig c = cfg;
  c.output_dir = "slowmo_out";
  c.profile_cache.clear();
  return fnv1a(canonical_dump(c));
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return canonical_dump(a) == canonical_dump(b);
}

}  // namespace slowmo
