#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slowmo/energy.hpp"
#include "slowmo/field_ops.hpp"
#include "slowmo/grid.hpp"
#include "slowmo/potential.hpp"
#include "slowmo/spectral.hpp"

namespace slowmo {

enum class Scheme { semi_implicit_split, explicit_euler };
enum class Equation { nlac, ch };

std::string to_string(Scheme s);
std::string to_string(Equation e);
Scheme scheme_from_string(const std::string& s);
Equation equation_from_string(const std::string& s);

struct FlowConfig {
  double eps = 0.05;
  double dt = 1e-3;
  Scheme scheme = Scheme::semi_implicit_split;
  double stabilization = 3.5;
  double t_end = 1.0;
  int record_every = 1;
  Equation equation = Equation::nlac;
  double theta = 1.0;
  /// keep a copy of the field at every recorded sample
  bool keep_snapshots = false;

  /// Diffusion coefficient 2*theta*eps^2 of the eps-scaled gradient flow of G_eps.
  double diffusion() const { return 2.0 * theta * eps * eps; }
  void validate(const DomainGrid& grid) const;
  /// Largest stable dt for the explicit scheme on grid.
  double explicit_dt_bound(const DomainGrid& grid) const;
};

/// eps^-1 * mean of W'(u) over the unit-measure domain.
double lagrange_multiplier(const ScalarField& u, double eps, const DoubleWell& w);

/**
 * One-step map for either equation. Transforms and buffers are set up once.
 *
 * NLAC: u_t = D Lap u - W'(u) + mean W'(u), D = 2 theta eps^2.
 * CH:   u_t = -Lap(D Lap u - W'(u)).
 * With theta = 1/2 these are the classical forms with eps^2 Lap u.
 */
class FlowStepper {
 public:
  FlowStepper(const DomainGrid& grid, const FlowConfig& cfg, const DoubleWell& w);

  ScalarField step(const ScalarField& u);
  /// ||du||_X^2 with X = L2 (nlac) or X2 (ch).
  double increment_norm_sq(const ScalarField& du);
  const FlowConfig& config() const { return cfg_; }
  NeumannSpectral& spectral() { return spectral_; }

 private:
  void step_semi_implicit(const std::vector<double>& u, std::vector<double>& out);
  void step_explicit(const std::vector<double>& u, std::vector<double>& out);

  DomainGrid grid_;
  FlowConfig cfg_;
  DoubleWell w_;
  NeumannSpectral spectral_;
  std::vector<double> denom_, rhs_, coef_, work_, lap_;
};

ScalarField step_nlac(const ScalarField& u, const FlowConfig& cfg, const DoubleWell& w);
ScalarField step_ch(const ScalarField& u, const FlowConfig& cfg, const DoubleWell& w);

struct FlowSample {
  double t = 0.0;
  double mass = 0.0;
  double lambda = 0.0;
  EnergyReport energy;
  double dist_L1 = 0.0;
  double dist_L2 = 0.0;
  double dist_X2 = 0.0;  // NaN without a mass-compatible reference
  double identity_residual = 0.0;
  double dissipation = 0.0;  // cumulative sum of ||du||_X^2 / dt
  double overshoot = 0.0;    // max(0, max|u| - 1)
};

struct TrajectoryRecord {
  std::vector<FlowSample> samples;
  std::vector<ScalarField> snapshots;
  std::optional<ScalarField> final_state;
  std::size_t steps = 0;
  bool energy_monotone = true;
  double max_energy_increase = 0.0;
  double max_mass_drift = 0.0;
  double max_step_mass_change = 0.0;
  double min_energy = 0.0;
  double max_overshoot = 0.0;
  double max_identity_residual = 0.0;
  // suprema over every step, not only the recorded samples
  double sup_dist_L1 = 0.0;
  double sup_dist_L2 = 0.0;
  double sup_dist_X2 = 0.0;
};

TrajectoryRecord run_flow(const ScalarField& u0, const FlowConfig& cfg, const DoubleWell& w,
                          const std::optional<ScalarField>& reference = std::nullopt);

}  // namespace slowmo
