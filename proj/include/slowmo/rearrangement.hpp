#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slowmo/geometry.hpp"
#include "slowmo/grid.hpp"
#include "slowmo/isoperimetry.hpp"
#include "slowmo/potential.hpp"

namespace slowmo {

/**
 * Lower barrier I* for a (local) isoperimetric profile.
 *
 * Base c * min(r, 1-r)^((n-1)/n) with c the largest constant below the
 * profile on the check lattice. When the base misses the profile at r0 it is
 * blended into the profile over |r - r0| < blend_width with a C1 smoothstep,
 * so I* stays between the base and the profile and touches at r0.
 */
class Minorant {
 public:
  double operator()(double r) const;
  double base(double r) const;

  double r0() const { return r0_; }
  double constant() const { return c_; }
  double exponent() const { return exponent_; }
  bool blend_active() const { return blend_; }
  double blend_width() const { return width_; }
  /// "C1" when blended, "C1/2" otherwise (square-root behaviour at the ends)
  std::string holder_tag() const;

  friend Minorant build_minorant(const IsoProfile& profile, double r0, double blend_width,
                                 int lattice);

 private:
  std::function<double(double)> target_;
  double r0_ = 0.5;
  double c_ = 0.0;
  double exponent_ = 0.5;
  bool blend_ = false;
  double width_ = 0.02;
};

struct MinorantCheck {
  double touch_gap = 0.0;      // |I*(r0) - I(r0)|
  double max_excess = 0.0;     // max of I* - I over the lattice
  double min_value = 0.0;      // min of I* over the lattice
  double lower_bound_gap = 0.0;  // max of c*min(...) - I*, should be <= 0
  bool ok = false;
};

/// Throws InvalidArgument when the profile vanishes somewhere (no positive c).
Minorant build_minorant(const IsoProfile& profile, double r0, double blend_width = 0.02,
                        int lattice = 1000);
MinorantCheck verify_minorant(const Minorant& m, const IsoProfile& profile, int lattice = 1000);

/**
 * Solution of V' = I*(V), V(0) = 1/2 on (-S1, S2).
 *
 * Built from the hodograph s(V) = integral from 1/2 to V of dv / I*(v),
 * integrated with v = t^2 (and 1 - v = t^2) so the square-root endpoint
 * behaviour leaves a smooth integrand; V(s) inverts the table by Newton.
 */
class WeightSolution {
 public:
  double S1() const { return S1_; }
  double S2() const { return S2_; }
  double V(double s) const;
  double eta(double s) const { return minorant_(V(s)); }
  /// inverse map; s_of(1/2) = 0
  double s_of(double v) const;
  const std::function<double(double)>& minorant() const { return minorant_; }

  /// Midpoint lattice of n cells on (-S1, S2).
  std::vector<double> midpoints(int n) const;
  double cell_width(int n) const { return (S1_ + S2_) / n; }

  friend WeightSolution solve_weight(std::function<double(double)> minorant, int panels);

 private:
  struct Side {
    std::vector<double> t;  // panel nodes in t, t = sqrt(v) or sqrt(1 - v)
    std::vector<double> s;  // |s| accumulated from v = 1/2 at each node (t descending in v-distance)
  };
  double side_integral(const Side& side, bool lower, double t_from, double t_to) const;
  double invert(const Side& side, bool lower, double target) const;

  std::function<double(double)> minorant_;
  Side lower_, upper_;
  double S1_ = 0.0, S2_ = 0.0;
};

/// panels per half; throws NumericalError when the minorant is not positive on (0,1).
WeightSolution solve_weight(std::function<double(double)> minorant, int panels = 4000);
inline WeightSolution solve_weight(const Minorant& m, int panels = 4000) {
  return solve_weight([m](double v) { return m(v); }, panels);
}

/**
 * Increasing rearrangement of a field against a weight.
 *
 * rho(z) = |{u < z}| from the sorted cell values; f_step(s) is the exact
 * sup{z : rho(z) < V(s)}, f_interp the piecewise-linear quantile through
 * the V-midpoints of groups of tied values (finite derivative, used for
 * energies and the gradient inequality).
 */
class Rearrangement {
 public:
  Rearrangement(const ScalarField& u, std::shared_ptr<const WeightSolution> weight);

  double rho(double z) const;
  double f_step(double s) const;
  double f_interp(double s) const;
  double quantile_step(double v) const;
  double quantile_interp(double v) const;
  const std::vector<double>& sorted() const { return sorted_; }
  double cell_volume() const { return cv_; }
  const WeightSolution& weight() const { return *weight_; }
  std::shared_ptr<const WeightSolution> weight_ptr() const { return weight_; }

  struct Row {
    double s, V, eta, f;
  };
  /// Node samples for the `s,V,eta,f_u` dump.
  std::vector<Row> table(int n) const;

 private:
  std::vector<double> sorted_;
  std::vector<double> node_v_, node_z_;
  double cv_ = 0.0;
  std::shared_ptr<const WeightSolution> weight_;
};

struct Lemma31Report {
  double integral_field = 0.0;     // integral of psi(u)
  double integral_weighted = 0.0;  // integral of psi(f_u) eta ds
  double equal_integral_residual = 0.0;  // relative to max(1, |integral_field|)
  bool has_contraction = false;
  double l1_field = 0.0;
  double l1_rearranged = 0.0;
  double contraction_slack = 0.0;
  double dirichlet_field = 0.0;       // integral of |grad u|^p
  double dirichlet_rearranged = 0.0;  // integral of |f_u'|^p eta ds
  double polya_szego_slack = 0.0;
  int gradient_lattice = 0;  // s-cells used for f_u'
  bool polya_szego_applicable = true;
  bool closeness_checked = false;
  double closeness = 0.0;  // ||u - u_E0||_L1
  std::string notice;
};

struct Lemma31Options {
  std::function<double(double)> psi;  // identity when empty
  std::optional<ScalarField> w;
  double p = 2.0;
  /// (E0, delta) for the closeness precondition of the gradient inequality
  std::optional<IndicatorSet> e0;
  double delta = 0.0;
  /// s-lattice for f_u'; capped so that ds is not below the grid spacing
  int lattice = 2048;
  /// lattice for the equal-integral quadrature
  int fine_lattice = 1 << 15;
};

Lemma31Report check_lemma31(const ScalarField& u, const WeightSolution& weight,
                            const Lemma31Options& opt = {});

struct FepsReport {
  double value = 0.0;
  double bulk = 0.0;
  double gradient = 0.0;
  bool sobolev = true;    // no jump of half the well gap between lattice nodes
  bool feasible = true;   // mean constraint within 1e-6 (when a reference is given)
  double mean_gap = 0.0;
};

/**
 * F_eps[f] = integral of (W(f)/eps + theta eps f'^2) eta ds by midpoint rule.
 * With reference_volume r0 the mean constraint integral of (f - f_E0) eta
 * = 0 is checked, f_E0 being a below s* and b above, V(s*) = r0.
 */
FepsReport f_eps(const std::function<double(double)>& f, double eps, const DoubleWell& w,
                 const WeightSolution& weight, std::optional<double> reference_volume = std::nullopt,
                 double theta = 1.0, int lattice = 2048);

}  // namespace slowmo
