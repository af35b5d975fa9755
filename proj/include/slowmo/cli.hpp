#pragma once

#include <string>
#include <vector>

#include "slowmo/config.hpp"
#include "slowmo/geometry.hpp"

namespace slowmo {

/**
 * Subcommands simulate, iso-profile, rearrange, variation-check, slow-motion
 * and verify, each taking --config FILE and repeated --set key=value.
 * Returns 0 on success, 1 when a checked assertion fails (the failure list is
 * printed as JSON on stdout), 2 on usage and configuration errors.
 */
int run_cli(int argc, char** argv);

/// Config file (or defaults when path is empty) with overrides applied.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);
DomainGrid grid_from_config(const RunConfig& cfg);
/// Throws ConfigError for kind = mask, which has no analytic form.
AnalyticShape shape_from_config(const RunConfig& cfg);
IndicatorSet initial_set(const RunConfig& cfg, const DomainGrid& grid);

}  // namespace slowmo
