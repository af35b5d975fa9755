#include "slowmo/potential.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_odeiv2.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "slowmo/error.hpp"

namespace slowmo {

DoubleWell quartic_well() {
  DoubleWell w;
  w.name = "quartic";
  w.a = -1.0;
  w.b = 1.0;
  w.c = 0.0;
  w.W = [](double s) {
    const double t = s * s - 1.0;
    return 0.25 * t * t;
  };
  w.dW = [](double s) { return s * s * s - s; };
  w.d2W = [](double s) { return 3.0 * s * s - 1.0; };
  w.has_closed_profile = true;
  w.quartic_scale = 1.0;
  return w;
}

DoubleWell scaled_well(const DoubleWell& w, double k) {
  if (!(k > 0.0)) throw InvalidArgument("well scale factor must be positive");
  DoubleWell out = w;
  std::ostringstream name;
  name << w.name << "*" << k;
  out.name = name.str();
  auto W = w.W, dW = w.dW, d2W = w.d2W;
  out.W = [W, k](double s) { return k * W(s); };
  out.dW = [dW, k](double s) { return k * dW(s); };
  out.d2W = [d2W, k](double s) { return k * d2W(s); };
  out.quartic_scale = w.quartic_scale * k;
  return out;
}

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, DoubleWell>& registry() {
  static std::map<std::string, DoubleWell> r{{"quartic", quartic_well()}};
  return r;
}

}  // namespace

void register_well(const std::string& name, DoubleWell w) {
  if (!w.W || !w.dW || !w.d2W) throw InvalidArgument("well '" + name + "' lacks evaluators");
  const WellDiagnostics d = check_well(w);
  if (!d.ok()) throw InvalidArgument("well '" + name + "' fails the double-well hypotheses");
  std::lock_guard lock(registry_mutex());
  w.name = name;
  registry()[name] = std::move(w);
}

DoubleWell well_by_name(const std::string& name) {
  std::lock_guard lock(registry_mutex());
  auto it = registry().find(name);
  if (it == registry().end()) throw InvalidArgument("unknown potential '" + name + "'");
  return it->second;
}

std::vector<std::string> registered_wells() {
  std::lock_guard lock(registry_mutex());
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

WellDiagnostics check_well(const DoubleWell& w) {
  WellDiagnostics d;
  const double step = 1e-3;
  const int n = static_cast<int>(std::lround(6.0 / step));
  const double tol = 1e-12;

  // W > 0 away from the wells, zero at them.
  bool zeros_ok = std::abs(w.W(w.a)) <= tol && std::abs(w.W(w.b)) <= tol;
  for (int k = 0; k <= n && zeros_ok; ++k) {
    const double s = -3.0 + k * step;
    if (std::abs(s - w.a) < 0.5 * step || std::abs(s - w.b) < 0.5 * step) continue;
    if (!(w.W(s) > 0.0)) zeros_ok = false;
  }
  d.zeros_only_at_wells = zeros_ok;

  d.curvature_a = w.d2W(w.a);
  d.curvature_b = w.d2W(w.b);
  d.curvature_c = w.d2W(w.c);
  d.equal_curvature_at_wells =
      d.curvature_a > 0.0 && std::abs(d.curvature_a - d.curvature_b) <= 1e-10;

  // Sign changes of W' on the lattice, counting exact zeros at a, c, b as changes.
  int changes = 0;
  double prev = w.dW(-3.0);
  for (int k = 1; k <= n; ++k) {
    const double s = -3.0 + k * step;
    const double cur = w.dW(s);
    if (cur == 0.0) continue;
    if (prev != 0.0 && (cur > 0.0) != (prev > 0.0)) ++changes;
    prev = cur;
  }
  d.three_sign_changes = changes == 3 && d.curvature_c < 0.0;

  d.growth = std::abs(w.dW(10.0)) > std::abs(w.dW(2.0)) &&
             std::abs(w.dW(-10.0)) > std::abs(w.dW(-2.0));
  return d;
}

double interface_constant(const DoubleWell& w) {
  if (!(w.b > w.a)) throw InvalidArgument("well ordering requires a < b");
  struct Ctx {
    const DoubleWell* w;
  } ctx{&w};
  gsl_function f;
  f.function = [](double s, void* p) {
    const auto* c = static_cast<Ctx*>(p);
    return std::sqrt(std::max(0.0, c->w->W(s)));
  };
  f.params = &ctx;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(1000);
  double result = 0.0, abserr = 0.0;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  const int status = gsl_integration_qags(&f, w.a, w.b, 1e-11, 1e-12, 1000, ws, &result, &abserr);
  gsl_set_error_handler(old);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS || abserr > 1e-8) {
    std::ostringstream msg;
    msg << "interface constant quadrature did not converge (status " << status
        << ", error estimate " << abserr << ")";
    throw NumericalError(msg.str());
  }
  return result;
}

OptimalProfile::OptimalProfile(const DoubleWell& w, double eps, double theta, bool force_ode)
    : w_(w), eps_(eps), theta_(theta) {
  if (!(eps > 0.0)) throw InvalidArgument("profile needs eps > 0");
  if (!(theta > 0.0)) throw InvalidArgument("profile needs theta > 0");
  const double scale = eps * std::sqrt(theta);
  closed_ = w.has_closed_profile && !force_ode;
  // k/4 (1-q^2)^2 under the root gives q' = sqrt(k)/2 (1-q^2)/scale.
  width_ = 2.0 * scale / std::sqrt(w.quartic_scale);
  if (closed_) return;

  struct Ctx {
    const DoubleWell* w;
    double scale;
    double dir;
  };
  auto rhs = [](double, const double y[], double dydt[], void* p) -> int {
    const auto* c = static_cast<Ctx*>(p);
    const double q = std::clamp(y[0], c->w->a, c->w->b);
    dydt[0] = c->dir * std::sqrt(std::max(0.0, c->w->W(q))) / c->scale;
    return GSL_SUCCESS;
  };

  t_step_ = scale / 200.0;
  const double t_max = 60.0 * scale;
  for (double dir : {1.0, -1.0}) {
    Ctx ctx{&w_, scale, dir};
    gsl_odeiv2_system sys{rhs, nullptr, 1, &ctx};
    gsl_odeiv2_driver* drv =
        gsl_odeiv2_driver_alloc_y_new(&sys, gsl_odeiv2_step_rkf45, t_step_ * 0.1, 1e-13, 1e-12);
    gsl_odeiv2_driver_set_nmax(drv, 100000);
    double t = 0.0;
    double y[1] = {w.c};
    auto& ts = dir > 0 ? t_pos_ : t_neg_;
    auto& qs = dir > 0 ? q_pos_ : q_neg_;
    ts.push_back(0.0);
    qs.push_back(w.c);
    const double target = dir > 0 ? w.b : w.a;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    for (int k = 1; t < t_max; ++k) {
      const double t_next = k * t_step_;
      const int status = gsl_odeiv2_driver_apply(drv, &t, t_next, y);
      if (status != GSL_SUCCESS || !std::isfinite(y[0])) {
        gsl_set_error_handler(old);
        gsl_odeiv2_driver_free(drv);
        throw NumericalError("profile integration failed at t = " + std::to_string(t) +
                             " (status " + std::to_string(status) + ")");
      }
      y[0] = std::clamp(y[0], w.a, w.b);
      ts.push_back(t_next);
      qs.push_back(y[0]);
      if (std::abs(y[0] - target) < 1e-14) break;
    }
    gsl_set_error_handler(old);
    gsl_odeiv2_driver_free(drv);
  }
}

double OptimalProfile::ode_value(double t, bool want_derivative) const {
  const bool pos = t >= 0.0;
  const auto& qs = pos ? q_pos_ : q_neg_;
  const double at = std::abs(t);
  const double x = at / t_step_;
  const std::size_t k = static_cast<std::size_t>(x);
  const double scale = eps_ * std::sqrt(theta_);
  auto slope = [&](double q) {
    // derivative in |t|, oriented towards the well of this branch
    return std::sqrt(std::max(0.0, w_.W(q))) / scale * (pos ? 1.0 : -1.0);
  };
  if (k + 1 >= qs.size()) {
    if (want_derivative) return 0.0;
    return qs.back();
  }
  const double q0 = qs[k], q1 = qs[k + 1];
  const double m0 = slope(q0) * t_step_, m1 = slope(q1) * t_step_;
  const double s = x - static_cast<double>(k);
  if (want_derivative) {
    const double ds = (6 * s * s - 6 * s) * q0 + (3 * s * s - 4 * s + 1) * m0 +
                      (-6 * s * s + 6 * s) * q1 + (3 * s * s - 2 * s) * m1;
    // d/dt of the branch; |t| = -t on the negative side
    return ds / t_step_ * (pos ? 1.0 : -1.0);
  }
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  return h00 * q0 + h10 * m0 + h01 * q1 + h11 * m1;
}

double OptimalProfile::operator()(double t) const {
  if (closed_) {
    // tanh maps onto (-1, 1); general quartic family wells stay at +-1
    return std::tanh(t / width_);
  }
  return ode_value(t, false);
}

double OptimalProfile::derivative(double t) const {
  if (closed_) {
    const double th = std::tanh(t / width_);
    return (1.0 - th * th) / width_;
  }
  return ode_value(t, true);
}

OptimalProfile optimal_profile(const DoubleWell& w, double eps, double theta) {
  return OptimalProfile(w, eps, theta);
}

}  // namespace slowmo
