#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "slowmo/geometry.hpp"

namespace slowmo {

struct ProfileSample {
  double r = 0.0;
  double I = 0.0;
  std::string tag;  // minimizer descriptor
  /// (n-1) times the mean curvature of the minimizer, NaN when unknown.
  double curvature = std::numeric_limits<double>::quiet_NaN();
};

struct IsoProfile {
  std::string domain;
  std::string method;  // analytic_candidates, exhaustive, annealed, closed_form
  std::optional<double> delta;
  std::optional<std::string> e0_tag;
  int dim = 2;
  std::vector<ProfileSample> samples;
  /// closed-form evaluator when the profile has one
  std::function<double(double)> exact;
  bool fell_back = false;
  std::string notice;

  /// exact() when present, else linear interpolation of the samples.
  double value(double r) const;
  /// r strictly increasing in (0,1), I positive.
  void validate() const;
};

enum class IsoDomain { unit_square, rectangle, disk };
IsoDomain iso_domain_from_string(const std::string& s);
std::string to_string(IsoDomain d);

/// Minimum over the known candidate families; aspect = lx (with ly = 1/lx) for rectangles.
IsoProfile iso_profile_analytic(IsoDomain domain, const std::vector<double>& r_samples,
                                double aspect = 1.0);
/// Pointwise candidate minimum with its tag and curvature.
ProfileSample analytic_candidate(IsoDomain domain, double r, double aspect = 1.0);

struct ExhaustiveConstraint {
  std::vector<std::uint8_t> e0;  // membership on the same partition
  double delta = 0.0;
};

struct ExhaustiveTable {
  DomainGrid grid;
  std::vector<double> best;              // per member count, +inf when inadmissible
  std::vector<std::uint32_t> minimizer;  // bitmask, cell k = bit k
};

constexpr int kMaxExhaustiveCells = 25;

/// Minimum l1 relative perimeter per member count over all subsets of a <= 25-cell grid.
ExhaustiveTable exhaustive_minima(const DomainGrid& grid,
                                  const std::optional<ExhaustiveConstraint>& constraint = std::nullopt);
IsoProfile iso_profile_exhaustive(const DomainGrid& grid, const std::vector<double>& r_samples,
                                  const std::optional<ExhaustiveConstraint>& constraint = std::nullopt);

struct AnnealConfig {
  int restarts = 10;
  int proposals_per_stage = 1000;
  double cooling = 0.98;
  int stages = 300;
  /// initial temperature in units of the largest grid spacing
  double t0_in_h = 0.5;
  PerimeterEstimator estimator = PerimeterEstimator::smoothed;
  std::uint64_t seed = 1;
};

struct AnnealResult {
  IndicatorSet best;
  double perimeter = 0.0;
  std::size_t accepted = 0;
  std::size_t proposals = 0;
};

/**
 * Volume-preserving swap annealing of the relative perimeter.
 *
 * Each restart starts from init and swaps a boundary member with a boundary
 * non-member under Metropolis acceptance; swaps that would put the set at
 * alpha distance above delta from e0 are rejected. Returns the best set
 * seen over all restarts, init included. Under the smoothed estimator the
 * objective is max(smoothed, l1 / sqrt 2): mollification hides sub-cell
 * oscillations that the search would otherwise exploit.
 */
AnnealResult anneal_perimeter(const IndicatorSet& init, const AnnealConfig& cfg,
                              const std::optional<IndicatorSet>& e0 = std::nullopt,
                              double delta = 0.0);

/// Annealed profile of the grid's domain; each sample starts from the n cells of smallest level.
IsoProfile anneal_profile(const DomainGrid& grid, const std::vector<double>& r_samples,
                          const AnnealConfig& cfg,
                          const std::function<double(double, double)>& init_level,
                          const std::optional<IndicatorSet>& e0 = std::nullopt, double delta = 0.0);

enum class LocalMethod { closed_form, annealed, exhaustive };

/**
 * Local isoperimetric profile around E0 with alpha bound delta.
 *
 * closed_form: the ball formula 2 sqrt(pi r) for a compactly contained disk.
 * annealed: raster search on grid with the alpha filter.
 * exhaustive: enumeration on grid (<= 25 cells) with E0 rasterized there.
 * When delta >= min(|E0|, 1 - |E0|) the constraint cannot bind and the
 * global profile is returned with a notice.
 */
IsoProfile local_iso_profile(const DomainGrid& grid, const AnalyticShape& e0, double delta,
                             const std::vector<double>& r_samples, LocalMethod method,
                             const AnnealConfig& cfg = {});

/// 2 sqrt(pi r) where a concentric disk of area r fits inside the domain, global square profile elsewhere.
IsoProfile patched_ball_profile(const AnalyticShape& ball, const std::vector<double>& r_samples);

struct TaylorReport {
  double exponent = 0.0;  // fitted 1 + sigma
  double constant = 0.0;
  double derivative = 0.0;
  double left_slope = 0.0;
  double right_slope = 0.0;
  bool kink = false;  // one-sided expansion only
  bool pass = false;  // exponent >= 1.5 and no kink
  int samples_used = 0;
};

/// Log-log fit of |I(r) - I(r0) - I'(r0)(r - r0)| against |r - r0| on the window.
TaylorReport taylor_check(const IsoProfile& profile, double r0, double window);

/// r0 +- log-spaced offsets from 1e-4 * window up to window.
std::vector<double> taylor_lattice(double r0, double window, int per_side = 24);

struct SemiconcavityReport {
  double C = 0.0;
  bool finite = true;
  /// C estimated from pairs at half-offsets 1, 2 and 4 lattice steps
  double C_1 = 0.0, C_2 = 0.0, C_4 = 0.0;
};

/// Smallest C with I - C r^2 midpoint concave on the (uniform) samples.
SemiconcavityReport semiconcavity_check(const IsoProfile& profile, double tol = 1e-9);

struct SupergradientReport {
  bool ok = true;
  double max_violation = 0.0;       // max of I(s) - I(r) - k (s-r) - C (s-r)^2
  double max_derivative_gap = 0.0;  // max |I'(r) - k| where I' exists
  double lipschitz = 0.0;
  double max_abs_curvature = 0.0;
  int checked = 0;
};

/// Checks that the tagged curvature is a supergradient of I up to C (s - r)^2.
SupergradientReport supergradient_check(const IsoProfile& profile, double C, double window,
                                        double tol = 1e-9);

}  // namespace slowmo
