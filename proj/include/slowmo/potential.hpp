#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace slowmo {

/// Double-well potential with wells a < c < b and W(a) = W(b) = 0.
struct DoubleWell {
  std::string name;
  double a = -1.0;
  double b = 1.0;
  double c = 0.0;
  std::function<double(double)> W;
  std::function<double(double)> dW;
  std::function<double(double)> d2W;
  /// true when the heteroclinic profile is tanh-shaped (quartic family).
  bool has_closed_profile = false;
  /// multiplier k in W = k * 1/4 (s^2-1)^2 for the quartic family.
  double quartic_scale = 1.0;
};

/// W(s) = 1/4 (s^2 - 1)^2.
DoubleWell quartic_well();

/// k * W for k > 0; closed-form profile kept for the quartic family.
DoubleWell scaled_well(const DoubleWell& w, double k);

/// Named registry; "quartic" is always present.
void register_well(const std::string& name, DoubleWell w);
DoubleWell well_by_name(const std::string& name);
std::vector<std::string> registered_wells();

struct WellDiagnostics {
  bool zeros_only_at_wells = false;
  bool equal_curvature_at_wells = false;
  bool three_sign_changes = false;
  bool growth = false;
  double curvature_a = 0.0;
  double curvature_b = 0.0;
  double curvature_c = 0.0;
  bool ok() const {
    return zeros_only_at_wells && equal_curvature_at_wells && three_sign_changes && growth;
  }
};

/// Lattice checks of the well hypotheses on [-3, 3] with step 1e-3.
WellDiagnostics check_well(const DoubleWell& w);

/// c_W = integral of sqrt(W) from a to b, absolute error <= 1e-8.
double interface_constant(const DoubleWell& w);

/**
 * Heteroclinic profile of eps*sqrt(theta) q' = sqrt(W(q)), q(0) = c.
 *
 * The quartic family uses tanh; other wells are tabulated by an adaptive
 * Runge-Kutta integration and interpolated with cubic Hermite pieces.
 */
class OptimalProfile {
 public:
  OptimalProfile(const DoubleWell& w, double eps, double theta = 1.0, bool force_ode = false);

  double operator()(double t) const;
  double derivative(double t) const;
  double eps() const { return eps_; }
  double theta() const { return theta_; }
  bool closed_form() const { return closed_; }

 private:
  double ode_value(double t, bool want_derivative) const;

  DoubleWell w_;
  double eps_;
  double theta_;
  bool closed_;
  double width_;  // tanh(t / width_) for the closed form
  // tabulated branch, t >= 0 and t <= 0 stored on one symmetric-in-index lattice
  double t_step_ = 0.0;
  std::vector<double> t_pos_, q_pos_, t_neg_, q_neg_;
};

OptimalProfile optimal_profile(const DoubleWell& w, double eps, double theta = 1.0);

}  // namespace slowmo
