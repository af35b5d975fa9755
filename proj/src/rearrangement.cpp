#include "slowmo/rearrangement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "slowmo/error.hpp"
#include "slowmo/field_ops.hpp"

namespace slowmo {

namespace {

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

std::vector<double> check_lattice(int n, double r0) {
  std::vector<double> r;
  for (int k = 1; k <= n; ++k) r.push_back(static_cast<double>(k) / (n + 1));
  if (r0 > 0.0 && r0 < 1.0) r.push_back(r0);
  return r;
}

// 5-point Gauss-Legendre on [0,1]
constexpr std::array<double, 5> kGLx = {0.04691007703066800, 0.23076534494715845, 0.5,
                                        0.76923465505284155, 0.95308992296933200};
constexpr std::array<double, 5> kGLw = {0.11846344252809454, 0.23931433524968324,
                                        0.28444444444444444, 0.23931433524968324,
                                        0.11846344252809454};

}  // namespace

double Minorant::base(double r) const {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return c_ * std::pow(std::min(r, 1.0 - r), exponent_);
}

double Minorant::operator()(double r) const {
  const double b = base(r);
  if (!blend_ || r <= 0.0 || r >= 1.0) return b;
  const double x = std::abs(r - r0_) / width_;
  if (x >= 1.0) return b;
  const double lam = 1.0 - smoothstep(x);
  return (1.0 - lam) * b + lam * target_(r);
}

std::string Minorant::holder_tag() const { return blend_ ? "C1" : "C1/2"; }

Minorant build_minorant(const IsoProfile& profile, double r0, double blend_width, int lattice) {
  if (!(r0 > 0.0 && r0 < 1.0)) throw InvalidArgument("touch point must lie in (0,1)");
  if (!(blend_width > 0.0)) throw InvalidArgument("blend width must be positive");
  Minorant m;
  m.r0_ = r0;
  m.width_ = std::min(blend_width, 0.5 * std::min(r0, 1.0 - r0));
  m.exponent_ = profile.dim == 1 ? 0.0 : static_cast<double>(profile.dim - 1) / profile.dim;
  m.target_ = [profile](double r) { return profile.value(r); };
  double c = std::numeric_limits<double>::infinity();
  std::vector<double> rs = check_lattice(lattice, r0);
  for (const auto& smp : profile.samples) rs.push_back(smp.r);
  for (double r : rs) {
    const double I = profile.value(r);
    if (!(I > 0.0)) {
      throw InvalidArgument("profile vanishes at r = " + std::to_string(r) +
                            ": no positive lower constant exists");
    }
    c = std::min(c, I / std::pow(std::min(r, 1.0 - r), m.exponent_));
  }
  m.c_ = c;
  const double gap = profile.value(r0) - m.base(r0);
  m.blend_ = gap > 1e-12 * std::max(1.0, profile.value(r0));
  return m;
}

MinorantCheck verify_minorant(const Minorant& m, const IsoProfile& profile, int lattice) {
  MinorantCheck chk;
  chk.touch_gap = std::abs(m(m.r0()) - profile.value(m.r0()));
  chk.max_excess = -std::numeric_limits<double>::infinity();
  chk.min_value = std::numeric_limits<double>::infinity();
  chk.lower_bound_gap = -std::numeric_limits<double>::infinity();
  for (double r : check_lattice(lattice, m.r0())) {
    const double v = m(r);
    chk.max_excess = std::max(chk.max_excess, v - profile.value(r));
    chk.min_value = std::min(chk.min_value, v);
    chk.lower_bound_gap = std::max(chk.lower_bound_gap, m.base(r) - v);
  }
  const double scale = std::max(1.0, profile.value(m.r0()));
  chk.ok = chk.touch_gap <= 1e-8 && chk.max_excess <= 1e-12 * scale && chk.min_value >= 0.0 &&
           chk.lower_bound_gap <= 1e-12 * scale;
  return chk;
}

WeightSolution solve_weight(std::function<double(double)> minorant, int panels) {
  if (panels < 16) throw InvalidArgument("weight solver needs at least 16 panels");
  WeightSolution ws;
  ws.minorant_ = std::move(minorant);
  const double th = std::sqrt(0.5);
  for (int side = 0; side < 2; ++side) {
    const bool lower = side == 0;
    auto& sd = lower ? ws.lower_ : ws.upper_;
    sd.t.resize(panels + 1);
    sd.s.assign(panels + 1, 0.0);
    for (int k = 0; k <= panels; ++k) sd.t[k] = th * k / panels;
    for (int k = panels - 1; k >= 0; --k) {
      const double piece = ws.side_integral(sd, lower, sd.t[k], sd.t[k + 1]);
      if (!std::isfinite(piece) || piece <= 0.0) {
        throw NumericalError("weight ODE: minorant not positive near v = " +
                             std::to_string(lower ? sd.t[k] * sd.t[k] : 1.0 - sd.t[k] * sd.t[k]));
      }
      sd.s[k] = sd.s[k + 1] + piece;
    }
  }
  ws.S1_ = ws.lower_.s[0];
  ws.S2_ = ws.upper_.s[0];
  return ws;
}

double WeightSolution::side_integral(const Side&, bool lower, double a, double b) const {
  double sum = 0.0;
  const double len = b - a;
  for (int q = 0; q < 5; ++q) {
    const double t = a + kGLx[q] * len;
    const double v = lower ? t * t : 1.0 - t * t;
    sum += kGLw[q] * 2.0 * t / minorant_(v);
  }
  return sum * len;
}

double WeightSolution::invert(const Side& sd, bool lower, double target) const {
  // sd.s decreases with t; find the panel with s[k] >= target >= s[k+1]
  const int P = static_cast<int>(sd.t.size()) - 1;
  if (target >= sd.s[0]) return 0.0;
  if (target <= 0.0) return sd.t[P];
  int lo = 0, hi = P;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (sd.s[mid] >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double a = sd.t[lo], b = sd.t[hi];
  // F(t) = s[hi] + integral_t^{t_hi} g - target, decreasing in t
  double t = a + (b - a) * (sd.s[lo] - target) / (sd.s[lo] - sd.s[hi]);
  for (int it = 0; it < 50; ++it) {
    const double F = sd.s[hi] + side_integral(sd, lower, t, sd.t[hi]) - target;
    if (F > 0.0) {
      a = t;
    } else {
      b = t;
    }
    const double v = lower ? t * t : 1.0 - t * t;
    const double g = 2.0 * t / minorant_(v);
    double next = g > 0.0 ? t + F / g : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, t)) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

double WeightSolution::V(double s) const {
  if (s <= -S1_) return 0.0;
  if (s >= S2_) return 1.0;
  if (s < 0.0) {
    const double t = invert(lower_, true, -s);
    return t * t;
  }
  const double t = invert(upper_, false, s);
  return 1.0 - t * t;
}

double WeightSolution::s_of(double v) const {
  if (v <= 0.0) return -S1_;
  if (v >= 1.0) return S2_;
  const bool lower = v < 0.5;
  const Side& sd = lower ? lower_ : upper_;
  const double t = std::sqrt(lower ? v : 1.0 - v);
  const int P = static_cast<int>(sd.t.size()) - 1;
  int k = std::min(P - 1, static_cast<int>(t / sd.t[P] * P));
  while (k > 0 && sd.t[k] > t) --k;
  while (k < P - 1 && sd.t[k + 1] < t) ++k;
  const double mag = sd.s[k + 1] + side_integral(sd, lower, t, sd.t[k + 1]);
  return lower ? -mag : mag;
}

std::vector<double> WeightSolution::midpoints(int n) const {
  std::vector<double> m(n);
  const double ds = cell_width(n);
  for (int i = 0; i < n; ++i) m[i] = -S1_ + (i + 0.5) * ds;
  return m;
}

Rearrangement::Rearrangement(const ScalarField& u, std::shared_ptr<const WeightSolution> weight)
    : sorted_(u.values().begin(), u.values().end()),
      cv_(u.grid().cell_volume()),
      weight_(std::move(weight)) {
  if (!weight_) throw InvalidArgument("rearrangement needs a weight");
  if (!u.all_finite()) throw NumericalError("rearrangement of a non-finite field");
  std::stable_sort(sorted_.begin(), sorted_.end());
  const double spread = std::max(1.0, sorted_.back() - sorted_.front());
  std::size_t start = 0;
  for (std::size_t k = 1; k <= sorted_.size(); ++k) {
    if (k == sorted_.size() || sorted_[k] - sorted_[start] > 1e-12 * spread) {
      node_v_.push_back(0.5 * static_cast<double>(start + k) * cv_);
      node_z_.push_back(sorted_[start]);
      start = k;
    }
  }
}

double Rearrangement::rho(double z) const {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), z);
  return static_cast<double>(it - sorted_.begin()) * cv_;
}

double Rearrangement::quantile_step(double v) const {
  const long n = static_cast<long>(sorted_.size());
  const long k = static_cast<long>(std::ceil(v / cv_ - 1e-9)) - 1;
  return sorted_[std::clamp(k, 0L, n - 1)];
}

double Rearrangement::quantile_interp(double v) const {
  // nodes at the V-midpoint of each group of tied values
  if (v <= node_v_.front()) return node_z_.front();
  if (v >= node_v_.back()) return node_z_.back();
  const auto it = std::upper_bound(node_v_.begin(), node_v_.end(), v);
  const std::size_t k = static_cast<std::size_t>(it - node_v_.begin());
  const double t = (v - node_v_[k - 1]) / (node_v_[k] - node_v_[k - 1]);
  return (1.0 - t) * node_z_[k - 1] + t * node_z_[k];
}

double Rearrangement::f_step(double s) const { return quantile_step(weight_->V(s)); }
double Rearrangement::f_interp(double s) const { return quantile_interp(weight_->V(s)); }

std::vector<Rearrangement::Row> Rearrangement::table(int n) const {
  std::vector<Row> rows;
  const double S1 = weight_->S1(), S2 = weight_->S2();
  for (int i = 0; i <= n; ++i) {
    const double s = -S1 + (S1 + S2) * i / n;
    const double v = weight_->V(s);
    rows.push_back({s, v, weight_->minorant()(v), quantile_step(v)});
  }
  return rows;
}

Lemma31Report check_lemma31(const ScalarField& u, const WeightSolution& weight,
                            const Lemma31Options& opt) {
  Lemma31Report rep;
  auto wp = std::make_shared<const WeightSolution>(weight);
  const Rearrangement ru(u, wp);
  const auto psi = opt.psi ? opt.psi : [](double x) { return x; };
  const double cv = u.grid().cell_volume();

  double abs_field = 0.0;
  for (double x : u.values()) {
    rep.integral_field += psi(x) * cv;
    abs_field += std::abs(psi(x)) * cv;
  }
  {
    const int n = opt.fine_lattice;
    const double ds = weight.cell_width(n);
    double sum = 0.0;
    for (double s : weight.midpoints(n)) sum += psi(ru.f_step(s)) * weight.eta(s);
    rep.integral_weighted = sum * ds;
  }
  rep.equal_integral_residual =
      std::abs(rep.integral_field - rep.integral_weighted) / std::max(abs_field, 1e-300);

  if (opt.w) {
    require_same_grid(u, *opt.w);
    rep.has_contraction = true;
    const Rearrangement rw(*opt.w, wp);
    for (std::size_t k = 0; k < u.size(); ++k) {
      rep.l1_field += std::abs(u.raw()[k] - opt.w->raw()[k]) * cv;
      // f_u - f_w is constant on each quantile piece of V-measure cv
      rep.l1_rearranged += std::abs(ru.sorted()[k] - rw.sorted()[k]) * cv;
    }
    rep.contraction_slack = rep.l1_field - rep.l1_rearranged;
  }

  const ScalarField g2 = grad_sq(u);
  for (double x : g2.values()) rep.dirichlet_field += std::pow(x, 0.5 * opt.p) * cv;
  {
    // finer s-cells than the grid spacing resolve the atomic staircase of a
    // cell-constant distribution, which has no finite Dirichlet integral
    const double S = weight.S1() + weight.S2();
    const int n = std::max(8, std::min(opt.lattice, static_cast<int>(S / u.grid().max_spacing())));
    rep.gradient_lattice = n;
    const double ds = weight.cell_width(n);
    double prev = ru.f_interp(-weight.S1());
    for (int i = 0; i < n; ++i) {
      const double s1 = -weight.S1() + (i + 1) * ds;
      const double next = ru.f_interp(s1);
      const double d = (next - prev) / ds;
      rep.dirichlet_rearranged += std::pow(std::abs(d), opt.p) * weight.eta(s1 - 0.5 * ds) * ds;
      prev = next;
    }
  }
  rep.polya_szego_slack = rep.dirichlet_field - rep.dirichlet_rearranged;
  if (opt.e0) {
    rep.closeness_checked = true;
    rep.closeness = distance_l1(u, sharp_interface_field(*opt.e0));
    if (rep.closeness > 2.0 * opt.delta) {
      rep.polya_szego_applicable = false;
      rep.notice = "closeness precondition violated: ||u - u_E0||_L1 = " +
                   std::to_string(rep.closeness) + " > 2 delta = " + std::to_string(2.0 * opt.delta);
    }
  }
  return rep;
}

FepsReport f_eps(const std::function<double(double)>& f, double eps, const DoubleWell& w,
                 const WeightSolution& weight, std::optional<double> reference_volume,
                 double theta, int lattice) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (lattice < 8) throw InvalidArgument("lattice too small");
  FepsReport rep;
  const int n = lattice;
  const double ds = weight.cell_width(n);
  const double S1 = weight.S1();
  std::vector<double> node(n + 1);
  for (int i = 0; i <= n; ++i) node[i] = f(-S1 + i * ds);
  double mean = 0.0;
  const double jump = 0.5 * (w.b - w.a);
  for (int i = 0; i < n; ++i) {
    const double m = -S1 + (i + 0.5) * ds;
    const double fm = f(m);
    const double eta = weight.eta(m);
    const double d = (node[i + 1] - node[i]) / ds;
    rep.bulk += w.W(fm) / eps * eta * ds;
    rep.gradient += theta * eps * d * d * eta * ds;
    mean += fm * eta * ds;
    if (std::abs(node[i + 1] - node[i]) >= jump) rep.sobolev = false;
  }
  rep.value = rep.bulk + rep.gradient;
  if (reference_volume) {
    const double r0 = *reference_volume;
    rep.mean_gap = mean - (w.a * r0 + w.b * (1.0 - r0));
    rep.feasible = std::abs(rep.mean_gap) <= 1e-6;
  }
  return rep;
}

}  // namespace slowmo
