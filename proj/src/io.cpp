#include "slowmo/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slowmo/config.hpp"
#include "slowmo/error.hpp"

namespace slowmo {

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

template <class T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& f, const std::string& path) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!f) throw Error("truncated checkpoint '" + path + "'");
  return v;
}

}  // namespace

std::string metadata_line(std::uint64_t config_hash, const std::string& extra) {
  std::string s = std::string("# slowmo version=") + kFormatVersion + " config=" + hash_hex(config_hash);
  if (!extra.empty()) s += " " + extra;
  return s;
}

void write_checkpoint(const std::string& path, const ScalarField& u, std::uint64_t config_hash) {
  auto f = open_out(path, true);
  f.write("PFCK", 4);
  const auto& g = u.grid();
  put<std::uint32_t>(f, 1);
  put<std::int32_t>(f, g.dim());
  put<std::int32_t>(f, g.nx());
  put<std::int32_t>(f, g.ny());
  put<double>(f, g.lx());
  put<double>(f, g.ly());
  put<std::uint64_t>(f, u.size());
  f.write(reinterpret_cast<const char*>(u.raw().data()),
          static_cast<std::streamsize>(u.size() * sizeof(double)));
  put<std::uint64_t>(f, config_hash);
  if (!f) throw Error("failed writing '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read '" + path + "'");
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "PFCK", 4) != 0) throw Error("'" + path + "' is not a checkpoint");
  if (get<std::uint32_t>(f, path) != 1) throw Error("unsupported checkpoint version in '" + path + "'");
  const int dim = get<std::int32_t>(f, path);
  const int nx = get<std::int32_t>(f, path);
  const int ny = get<std::int32_t>(f, path);
  const double lx = get<double>(f, path);
  const double ly = get<double>(f, path);
  const auto n = get<std::uint64_t>(f, path);
  DomainGrid g = dim == 1 ? DomainGrid(1, {lx}, {nx}) : DomainGrid(2, {lx, ly}, {nx, ny});
  if (n != g.size()) throw Error("checkpoint size does not match its grid in '" + path + "'");
  std::vector<double> v(n);
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) throw Error("truncated checkpoint '" + path + "'");
  const auto h = get<std::uint64_t>(f, path);
  return Checkpoint{ScalarField(g, std::move(v)), h};
}

void write_pbm(const std::string& path, const IndicatorSet& E) {
  auto f = open_out(path);
  const auto& g = E.grid();
  f << "P1\n" << g.nx() << " " << g.ny() << "\n";
  for (int j = g.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx(); ++i) f << (E.contains(i, j) ? '1' : '0') << (i + 1 < g.nx() ? " " : "");
    f << "\n";
  }
}

IndicatorSet read_pbm(const std::string& path, const DomainGrid& grid) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read mask '" + path + "'");
  // strip comments, then tokenize
  std::stringstream body;
  std::string line;
  while (std::getline(f, line)) {
    const auto c = line.find('#');
    body << (c == std::string::npos ? line : line.substr(0, c)) << "\n";
  }
  std::string magic;
  int w = 0, h = 0;
  body >> magic >> w >> h;
  if (magic != "P1" || w <= 0 || h <= 0) throw Error("'" + path + "' is not a plain PBM (P1)");
  if (w != grid.nx() || h != grid.ny()) {
    throw GridMismatch("mask '" + path + "' is " + std::to_string(w) + "x" + std::to_string(h) +
                       ", grid is " + std::to_string(grid.nx()) + "x" + std::to_string(grid.ny()));
  }
  std::vector<std::uint8_t> m(grid.size(), 0);
  for (int r = 0; r < h; ++r) {
    for (int i = 0; i < w; ++i) {
      char ch = 0;
      do {
        if (!body.get(ch)) throw Error("truncated mask '" + path + "'");
      } while (ch != '0' && ch != '1');
      m[grid.index(i, h - 1 - r)] = ch == '1';
    }
  }
  return IndicatorSet(grid, std::move(m));
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec,
                          std::uint64_t config_hash) {
  auto f = open_out(path);
  f << metadata_line(config_hash) << "\n";
  f << "t,mass,lambda,energy,bulk,gradient,dist_L1,dist_L2,dist_X2,identity_residual,dissipation,"
       "overshoot\n";
  for (const auto& s : rec.samples) {
    f << num(s.t) << "," << num(s.mass) << "," << num(s.lambda) << "," << num(s.energy.total) << ","
      << num(s.energy.bulk) << "," << num(s.energy.gradient) << "," << num(s.dist_L1) << ","
      << num(s.dist_L2) << "," << num(s.dist_X2) << "," << num(s.identity_residual) << ","
      << num(s.dissipation) << "," << num(s.overshoot) << "\n";
  }
}

void write_profile_csv(const std::string& path, const IsoProfile& p, std::uint64_t config_hash) {
  auto f = open_out(path);
  std::string extra = "domain=" + p.domain;
  if (p.delta) extra += " delta=" + num(*p.delta);
  if (p.e0_tag) extra += " e0=" + *p.e0_tag;
  f << metadata_line(config_hash, extra) << "\n";
  f << "r,I,minimizer_tag,method\n";
  for (const auto& s : p.samples) f << num(s.r) << "," << num(s.I) << "," << s.tag << "," << p.method << "\n";
}

IsoProfile read_profile_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read profile '" + path + "'");
  IsoProfile p;
  std::string line;
  bool header = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto d = line.find("domain=");
      if (d != std::string::npos) p.domain = line.substr(d + 7, line.find(' ', d) - d - 7);
      continue;
    }
    if (!header) {
      if (line != "r,I,minimizer_tag,method") throw Error("unexpected profile header in '" + path + "'");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string r, I, tag, method;
    std::getline(ss, r, ',');
    std::getline(ss, I, ',');
    std::getline(ss, tag, ',');
    std::getline(ss, method, ',');
    p.samples.push_back({std::stod(r), std::stod(I), tag, std::nan("")});
    p.method = method;
  }
  p.validate();
  return p;
}

void write_rearrangement_csv(const std::string& path, const Rearrangement& r, int n,
                             std::uint64_t config_hash) {
  auto f = open_out(path);
  f << metadata_line(config_hash, "S1=" + num(r.weight().S1()) + " S2=" + num(r.weight().S2())) << "\n";
  f << "s,V,eta,f_u\n";
  for (const auto& row : r.table(n)) {
    f << num(row.s) << "," << num(row.V) << "," << num(row.eta) << "," << num(row.f) << "\n";
  }
}

void write_d_vs_eps(const std::string& path, const SlowMotionReport& rep, std::uint64_t config_hash) {
  auto f = open_out(path);
  f << metadata_line(config_hash, "equation=" + rep.equation + " norm=" + rep.norm) << "\n";
  f << "# eps D D0 D_L1 D_L2 D_X2\n";
  for (const auto& r : rep.rungs) {
    f << num(r.eps) << " " << num(r.D) << " " << num(r.D0) << " " << num(r.D_L1) << " "
      << num(r.D_L2) << " " << num(r.D_X2) << "\n";
  }
}

nlohmann::json to_json(const SlowMotionReport& rep) {
  nlohmann::json j;
  j["equation"] = rep.equation;
  j["shape"] = rep.shape;
  j["norm"] = rep.norm;
  j["M"] = rep.M;
  j["resolution"] = rep.resolution;
  j["asserted"] = rep.asserted;
  j["strictly_decreasing"] = rep.strictly_decreasing;
  j["trend_ok"] = rep.trend_ok;
  j["rate"] = jnum(rep.rate);
  j["C1_spread"] = jnum(rep.C1_spread);
  j["k1_spread"] = jnum(rep.k1_spread);
  j["k2_spread"] = jnum(rep.k2_spread);
  j["budget_stable"] = rep.budget_stable;
  j["max_mass_drift"] = rep.max_mass_drift;
  nlohmann::json rungs = nlohmann::json::array();
  for (const auto& r : rep.rungs) {
    rungs.push_back({{"eps", r.eps},
                     {"dt", r.dt},
                     {"t_end", r.t_end},
                     {"steps", r.steps},
                     {"D", jnum(r.D)},
                     {"D0", jnum(r.D0)},
                     {"D_L1", jnum(r.D_L1)},
                     {"D_L2", jnum(r.D_L2)},
                     {"D_X2", jnum(r.D_X2)},
                     {"well_prepared_C", jnum(r.well_prepared_C)},
                     {"well_prepared", r.well_prepared},
                     {"clearance_ok", r.clearance_ok},
                     {"G0", r.G0},
                     {"min_energy", r.min_energy},
                     {"max_energy", r.max_energy},
                     {"C1", jnum(r.C1)},
                     {"C2", jnum(r.C2)},
                     {"mass_drift", r.mass_drift},
                     {"energy_monotone", r.energy_monotone},
                     {"max_abs_lambda", r.max_abs_lambda},
                     {"final_lambda", r.final_lambda},
                     {"k1", jnum(r.budget.k1)},
                     {"k2", jnum(r.budget.k2)},
                     {"t_star", jnum(r.budget.t_star)},
                     {"horizon_capped", r.budget.horizon_capped},
                     {"budget_partial", r.budget.partial}});
  }
  j["rungs"] = rungs;
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto f = open_out(path);
  f << j.dump(2) << "\n";
}

std::string profile_cache_path(const std::string& dir, const std::string& domain,
                               const std::string& method, double delta, std::uint64_t e0_hash,
                               int resolution) {
  const std::string key = domain + "|" + method + "|" + num(delta) + "|" + hash_hex(e0_hash) + "|" +
                          std::to_string(resolution);
  return (std::filesystem::path(dir) / ("profile_" + hash_hex(fnv1a(key)) + ".csv")).string();
}

std::uint64_t set_hash(const IndicatorSet& E) {
  std::string bytes(E.members().begin(), E.members().end());
  bytes += "|" + std::to_string(E.grid().nx()) + "x" + std::to_string(E.grid().ny());
  return fnv1a(bytes);
}

}  // namespace slowmo
