#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "slowmo/experiments.hpp"
#include "slowmo/flow.hpp"
#include "slowmo/geometry.hpp"
#include "slowmo/isoperimetry.hpp"
#include "slowmo/rearrangement.hpp"

namespace slowmo {

constexpr const char* kFormatVersion = "1";

/// `# slowmo version=1 config=<hash>` followed by extra `key=value` pairs.
std::string metadata_line(std::uint64_t config_hash, const std::string& extra = "");

/**
 * Binary checkpoint: "PFCK", u32 version, i32 dim, nx, ny, f64 lx, ly,
 * u64 count, count f64 values, u64 config hash; little-endian host order.
 */
void write_checkpoint(const std::string& path, const ScalarField& u, std::uint64_t config_hash);
struct Checkpoint {
  ScalarField field;
  std::uint64_t config_hash = 0;
};
Checkpoint read_checkpoint(const std::string& path);

/// Plain PBM (P1); the first row is the top of the domain (largest y).
void write_pbm(const std::string& path, const IndicatorSet& E);
/// Reads a P1 mask; its size must match the grid.
IndicatorSet read_pbm(const std::string& path, const DomainGrid& grid);

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec,
                          std::uint64_t config_hash);
/// `r,I,minimizer_tag,method`
void write_profile_csv(const std::string& path, const IsoProfile& p, std::uint64_t config_hash);
IsoProfile read_profile_csv(const std::string& path);
/// `s,V,eta,f_u`
void write_rearrangement_csv(const std::string& path, const Rearrangement& r, int n,
                             std::uint64_t config_hash);
/// gnuplot-ready `eps D D0 D_L1 D_L2 D_X2` table.
void write_d_vs_eps(const std::string& path, const SlowMotionReport& rep, std::uint64_t config_hash);

nlohmann::json to_json(const SlowMotionReport& rep);
/// Pretty JSON with sorted keys and a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);

/// Cache file for (domain, method, delta, E0 hash, resolution) under dir.
std::string profile_cache_path(const std::string& dir, const std::string& domain,
                               const std::string& method, double delta, std::uint64_t e0_hash,
                               int resolution);
/// FNV-1a of a membership mask.
std::uint64_t set_hash(const IndicatorSet& E);

}  // namespace slowmo
