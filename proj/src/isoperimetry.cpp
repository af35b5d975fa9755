#include "slowmo/isoperimetry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "slowmo/error.hpp"

namespace slowmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

}  // namespace

double IsoProfile::value(double r) const {
  if (exact) return exact(r);
  if (samples.empty()) throw InvalidArgument("empty profile");
  if (r <= samples.front().r) return samples.front().I;
  if (r >= samples.back().r) return samples.back().I;
  auto it = std::lower_bound(samples.begin(), samples.end(), r,
                             [](const ProfileSample& s, double v) { return s.r < v; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (r - a.r) / (b.r - a.r);
  return a.I + t * (b.I - a.I);
}

void IsoProfile::validate() const {
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    if (!(s.r > 0.0 && s.r < 1.0)) throw InvalidArgument("profile volume fraction outside (0,1)");
    if (!(s.I > 0.0)) throw InvalidArgument("profile value must be positive");
    if (k > 0 && !(s.r > samples[k - 1].r)) throw InvalidArgument("profile r values not increasing");
  }
}

IsoDomain iso_domain_from_string(const std::string& s) {
  if (s == "unit_square") return IsoDomain::unit_square;
  if (s == "rectangle") return IsoDomain::rectangle;
  if (s == "disk") return IsoDomain::disk;
  throw InvalidArgument("unsupported isoperimetric domain '" + s + "'");
}

std::string to_string(IsoDomain d) {
  switch (d) {
    case IsoDomain::unit_square:
      return "unit_square";
    case IsoDomain::rectangle:
      return "rectangle";
    case IsoDomain::disk:
      return "disk";
  }
  return "";
}

namespace {

// Candidates for r <= 1/2 in a rectangle with shorter side `cut`.
ProfileSample rectangle_lower_half(double r, double cut) {
  ProfileSample best{r, kInf, "", kNaN};
  auto consider = [&](double I, const char* tag, double curv) {
    if (I < best.I) best = ProfileSample{r, I, tag, curv};
  };
  // quarter disk at a corner: area pi rho^2 / 4, arc pi rho / 2
  const double rho_q = 2.0 * std::sqrt(r / kPi);
  if (rho_q < cut) consider(std::sqrt(kPi * r), "quarter_disk", 1.0 / rho_q);
  // half disk on an edge: area pi rho^2 / 2, arc pi rho
  const double rho_h = std::sqrt(2.0 * r / kPi);
  if (2.0 * rho_h < cut) consider(std::sqrt(2.0 * kPi * r), "half_disk", 1.0 / rho_h);
  consider(cut, "cut", 0.0);
  return best;
}

// Orthogonal circular cap in the unit-area disk; lower_half means r <= 1/2.
ProfileSample disk_lower_half(double r) {
  const double R = 1.0 / std::sqrt(kPi);
  if (std::abs(r - 0.5) < 1e-15) return {r, 2.0 * R, "diameter", 0.0};
  // beta in (0, pi/2): rho = R / tan(beta), gamma = pi/2 - beta
  auto area = [&](double beta) {
    const double rho = R / std::tan(beta), gamma = 0.5 * kPi - beta;
    return rho * rho * (beta - std::sin(beta) * std::cos(beta)) +
           R * R * (gamma - std::sin(gamma) * std::cos(gamma));
  };
  double lo = 1e-12, hi = 0.5 * kPi - 1e-12;  // area decreases from 1/2 to 0
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (area(mid) > r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double beta = 0.5 * (lo + hi);
  const double rho = R / std::tan(beta);
  ProfileSample cap{r, 2.0 * rho * beta, "orthogonal_cap", 1.0 / rho};
  const double inner = 2.0 * std::sqrt(kPi * r);
  if (inner < cap.I) return {r, inner, "interior_disk", std::sqrt(kPi / r)};
  return cap;
}

}  // namespace

ProfileSample analytic_candidate(IsoDomain domain, double r, double aspect) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("volume fraction must lie in (0,1)");
  const bool upper = r > 0.5;
  const double rr = upper ? 1.0 - r : r;
  ProfileSample s;
  switch (domain) {
    case IsoDomain::unit_square:
      s = rectangle_lower_half(rr, 1.0);
      break;
    case IsoDomain::rectangle: {
      if (!(aspect > 0.0)) throw InvalidArgument("rectangle aspect must be positive");
      s = rectangle_lower_half(rr, std::min(aspect, 1.0 / aspect));
      break;
    }
    case IsoDomain::disk:
      s = disk_lower_half(rr);
      break;
  }
  s.r = r;
  if (upper) {
    // the minimizer is the complement; its curvature changes sign
    s.tag = "complement_" + s.tag;
    s.curvature = -s.curvature;
  }
  return s;
}

IsoProfile iso_profile_analytic(IsoDomain domain, const std::vector<double>& r_samples,
                                double aspect) {
  IsoProfile p;
  p.domain = to_string(domain);
  p.method = "analytic_candidates";
  for (double r : r_samples) p.samples.push_back(analytic_candidate(domain, r, aspect));
  p.exact = [domain, aspect](double r) { return analytic_candidate(domain, r, aspect).I; };
  p.validate();
  return p;
}

ExhaustiveTable exhaustive_minima(const DomainGrid& grid,
                                  const std::optional<ExhaustiveConstraint>& constraint) {
  const int nx = grid.nx(), ny = grid.ny();
  const int n = static_cast<int>(grid.size());
  if (n > kMaxExhaustiveCells) {
    throw InvalidArgument("exhaustive enumeration supports at most " +
                          std::to_string(kMaxExhaustiveCells) + " cells, got " + std::to_string(n));
  }
  std::uint32_t row_mask = 0;  // bit k set when cell k has a right neighbour
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) row_mask |= 1u << (j * nx + i);
  const std::uint32_t col_mask = n > nx ? (1u << (n - nx)) - 1u : 0u;
  std::uint32_t e0 = 0;
  double delta_cells = kInf;
  if (constraint) {
    if (constraint->e0.size() != grid.size()) throw GridMismatch("E0 not on the partition");
    for (int k = 0; k < n; ++k)
      if (constraint->e0[k]) e0 |= 1u << k;
    delta_cells = constraint->delta / grid.cell_volume() + 1e-9;
  }
  const double hx = grid.hx(), hy = grid.hy();
  // perimeter as (vertical edge count, horizontal edge count); compare as doubles
  std::vector<double> best(n + 1, kInf);
  std::vector<std::uint32_t> arg(n + 1, 0);
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t s64 = 0; s64 < total; ++s64) {
    const auto s = static_cast<std::uint32_t>(s64);
    if (constraint) {
      const int outside = std::popcount(s & ~e0);
      const int missing = std::popcount(e0 & ~s);
      if (std::min(outside, missing) > delta_cells) continue;
    }
    const int c = std::popcount(s);
    const int v = std::popcount((s ^ (s >> 1)) & row_mask);
    const int h = std::popcount((s ^ (s >> nx)) & col_mask);
    const double per = v * hy + h * hx;
    if (per < best[c]) {
      best[c] = per;
      arg[c] = s;
    }
  }
  return ExhaustiveTable{grid, std::move(best), std::move(arg)};
}

namespace {

std::string mask_tag(std::uint32_t m) {
  std::ostringstream os;
  os << "mask:0x" << std::hex << m;
  return os.str();
}

}  // namespace

IsoProfile iso_profile_exhaustive(const DomainGrid& grid, const std::vector<double>& r_samples,
                                  const std::optional<ExhaustiveConstraint>& constraint) {
  const ExhaustiveTable t = exhaustive_minima(grid, constraint);
  IsoProfile p;
  p.domain = grid.lx() == 1.0 ? "unit_square" : "rectangle";
  p.method = "exhaustive";
  if (constraint) p.delta = constraint->delta;
  const double cv = grid.cell_volume();
  for (double r : r_samples) {
    const double cnt = r / cv;
    const long c = std::lround(cnt);
    if (std::abs(cnt - c) > 1e-9 * std::max(1.0, cnt)) {
      throw InvalidArgument("volume " + std::to_string(r) + " is not a whole number of cells");
    }
    if (c <= 0 || c >= static_cast<long>(grid.size())) {
      throw InvalidArgument("volume fraction must lie strictly inside (0,1)");
    }
    if (t.best[c] == kInf) continue;  // no admissible set of this volume
    p.samples.push_back(ProfileSample{r, t.best[c], mask_tag(t.minimizer[c]), kNaN});
  }
  p.validate();
  return p;
}

namespace {

IsoDomain domain_of(const DomainGrid& grid) {
  return std::abs(grid.lx() - 1.0) < 1e-12 ? IsoDomain::unit_square : IsoDomain::rectangle;
}

}  // namespace

IsoProfile local_iso_profile(const DomainGrid& grid, const AnalyticShape& e0, double delta,
                             const std::vector<double>& r_samples, LocalMethod method,
                             const AnnealConfig& cfg) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  const double r0 = e0.volume();
  const bool binds = delta < std::min(r0, 1.0 - r0);
  IsoProfile p;

  if (method == LocalMethod::closed_form) {
    if (!binds) {
      p = iso_profile_analytic(domain_of(grid), r_samples, grid.lx());
    } else {
      if (e0.kind() != ShapeKind::ball || grid.dim() != 2) {
        throw InvalidArgument("closed-form local profile needs a compactly contained disk");
      }
      const double clear = e0.boundary_clearance() + e0.radius();
      for (double r : r_samples) {
        if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("volume fraction must lie in (0,1)");
        const double rho = std::sqrt(r / kPi);
        if (rho >= clear) {
          throw InvalidArgument("a concentric disk of volume " + std::to_string(r) +
                                " does not fit in the domain");
        }
        p.samples.push_back(ProfileSample{r, 2.0 * std::sqrt(kPi * r), "ball", 1.0 / rho});
      }
      p.exact = [](double r) { return 2.0 * std::sqrt(kPi * r); };
      p.method = "closed_form";
      p.domain = to_string(domain_of(grid));
    }
  } else if (method == LocalMethod::exhaustive) {
    const IndicatorSet e = e0.rasterize(grid);
    std::optional<ExhaustiveConstraint> c;
    if (binds) c = ExhaustiveConstraint{e.members(), delta};
    p = iso_profile_exhaustive(grid, r_samples, c);
  } else {
    const IndicatorSet e = e0.rasterize(grid);
    auto level = [e0](double x, double y) { return e0.signed_distance(x, y); };
    p = binds ? anneal_profile(grid, r_samples, cfg, level, e, delta)
              : anneal_profile(grid, r_samples, cfg, level);
  }
  p.e0_tag = e0.tag();
  p.delta = delta;
  if (!binds) {
    p.fell_back = true;
    std::ostringstream msg;
    msg << "delta = " << delta << " >= min(|E0|, 1 - |E0|) = " << std::min(r0, 1.0 - r0)
        << ": the alpha constraint never binds; returning the global profile";
    p.notice = msg.str();
  }
  return p;
}

IsoProfile patched_ball_profile(const AnalyticShape& ball, const std::vector<double>& r_samples) {
  if (ball.kind() != ShapeKind::ball) throw InvalidArgument("patched profile needs a disk");
  const double fit = ball.boundary_clearance() + ball.radius();
  auto eval = [fit](double r) -> ProfileSample {
    const double rho = std::sqrt(r / kPi);
    if (rho < fit) return {r, 2.0 * std::sqrt(kPi * r), "ball", 1.0 / rho};
    return analytic_candidate(IsoDomain::unit_square, r);
  };
  IsoProfile p;
  p.domain = "unit_square";
  p.method = "closed_form";
  p.e0_tag = ball.tag();
  for (double r : r_samples) p.samples.push_back(eval(r));
  p.exact = [eval](double r) { return eval(r).I; };
  p.validate();
  return p;
}

std::vector<double> taylor_lattice(double r0, double window, int per_side) {
  std::vector<double> out;
  for (int k = 0; k < per_side; ++k) {
    const double off = window * std::pow(1e-4, static_cast<double>(k) / (per_side - 1));
    out.push_back(r0 - off);
  }
  out.push_back(r0);
  for (int k = 0; k < per_side; ++k) {
    const double off = window * std::pow(1e-4, static_cast<double>(per_side - 1 - k) / (per_side - 1));
    out.push_back(r0 + off);
  }
  return out;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  if (intercept) *intercept = my - slope * mx;
  return slope;
}

}  // namespace

TaylorReport taylor_check(const IsoProfile& profile, double r0, double window) {
  std::vector<const ProfileSample*> left, right;
  for (const auto& s : profile.samples) {
    const double d = s.r - r0;
    if (d < 0 && -d <= window) left.push_back(&s);
    if (d > 0 && d <= window) right.push_back(&s);
  }
  if (left.size() < 3 || right.size() < 3) {
    throw InvalidArgument("taylor check needs at least 3 samples on each side of r0");
  }
  const double I0 = profile.value(r0);
  TaylorReport rep;
  // one-sided secants at the closest samples
  auto closest_left = *std::max_element(left.begin(), left.end(),
                                        [](auto a, auto b) { return a->r < b->r; });
  auto closest_right = *std::min_element(right.begin(), right.end(),
                                         [](auto a, auto b) { return a->r < b->r; });
  rep.left_slope = (I0 - closest_left->I) / (r0 - closest_left->r);
  rep.right_slope = (closest_right->I - I0) / (closest_right->r - r0);
  const double scale = std::max({1.0, std::abs(rep.left_slope), std::abs(rep.right_slope)});
  const double dmin = std::min(r0 - closest_left->r, closest_right->r - r0);
  // a smooth profile has secants differing by O(d); a kink leaves an O(1) gap
  rep.kink = std::abs(rep.left_slope - rep.right_slope) > std::max(1e-3 * scale, 1e3 * dmin * scale);

  if (profile.exact) {
    const double h = 1e-6 * std::max(1e-3, std::min(r0, 1.0 - r0));
    rep.derivative = (profile.exact(r0 + h) - profile.exact(r0 - h)) / (2 * h);
  } else {
    rep.derivative = 0.5 * (rep.left_slope + rep.right_slope);
  }
  std::vector<double> lx, ly;
  for (const auto* s : left) {
    const double res = std::abs(s->I - I0 - rep.derivative * (s->r - r0));
    if (res > 0.0) {
      lx.push_back(std::log(r0 - s->r));
      ly.push_back(std::log(res));
    }
  }
  for (const auto* s : right) {
    const double res = std::abs(s->I - I0 - rep.derivative * (s->r - r0));
    if (res > 0.0) {
      lx.push_back(std::log(s->r - r0));
      ly.push_back(std::log(res));
    }
  }
  rep.samples_used = static_cast<int>(lx.size());
  if (lx.size() < 3) {
    // residual identically zero: the profile is affine on the window
    rep.exponent = std::numeric_limits<double>::infinity();
    rep.constant = 0.0;
  } else {
    double b = 0.0;
    rep.exponent = fit_slope(lx, ly, &b);
    rep.constant = std::exp(b);
  }
  rep.pass = !rep.kink && rep.exponent >= 1.5;
  return rep;
}

SemiconcavityReport semiconcavity_check(const IsoProfile& profile, double tol) {
  const auto& s = profile.samples;
  if (s.size() < 20) throw InvalidArgument("semi-concavity check needs at least 20 samples");
  const double step = s[1].r - s[0].r;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (std::abs((s[k].r - s[k - 1].r) - step) > 1e-9 * std::max(step, 1e-12)) {
      throw InvalidArgument("semi-concavity check needs uniformly spaced samples");
    }
  }
  SemiconcavityReport rep;
  const std::size_t n = s.size();
  auto c_at = [&](std::size_t k) {
    double c = 0.0;
    for (std::size_t i = k; i + k < n; ++i) {
      const double gap = s[i].I - 0.5 * (s[i - k].I + s[i + k].I);
      const double d = s[i + k].r - s[i - k].r;
      c = std::max(c, -4.0 * (gap + tol) / (d * d));
    }
    return c;
  };
  double c = 0.0;
  for (std::size_t k = 1; 2 * k < n; ++k) c = std::max(c, c_at(k));
  rep.C = c;
  rep.C_1 = c_at(1);
  rep.C_2 = n > 4 ? c_at(2) : 0.0;
  rep.C_4 = n > 8 ? c_at(4) : 0.0;
  // an upward kink forces C ~ 1/d: doubling the pair spacing halves the requirement
  const bool blows_up = rep.C_1 > 0.0 && rep.C_2 > 0.0 && rep.C_4 > 0.0 &&
                        rep.C_1 > 1.6 * rep.C_2 && rep.C_2 > 1.6 * rep.C_4;
  rep.finite = !blows_up;
  if (!rep.finite) rep.C = std::numeric_limits<double>::infinity();
  return rep;
}

SupergradientReport supergradient_check(const IsoProfile& profile, double C, double window,
                                        double tol) {
  SupergradientReport rep;
  const auto& s = profile.samples;
  for (const auto& x : s) {
    if (std::isnan(x.curvature)) throw InvalidArgument("supergradient check needs curvature tags");
  }
  for (std::size_t k = 1; k < s.size(); ++k) {
    rep.lipschitz = std::max(rep.lipschitz, std::abs(s[k].I - s[k - 1].I) / (s[k].r - s[k - 1].r));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s[i].r, k = s[i].curvature;
    rep.max_abs_curvature = std::max(rep.max_abs_curvature, std::abs(k));
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double d = s[j].r - r;
      if (j == i || std::abs(d) > window) continue;
      const double v = s[j].I - s[i].I - k * d - C * d * d;
      rep.max_violation = std::max(rep.max_violation, v);
      ++rep.checked;
      if (v > tol) rep.ok = false;
    }
    const bool smooth_here = i > 0 && i + 1 < s.size() && s[i - 1].tag == s[i].tag &&
                             s[i + 1].tag == s[i].tag;
    if (profile.exact && smooth_here) {
      const double h = 1e-6 * std::min(r, 1.0 - r);
      const double deriv = (profile.exact(r + h) - profile.exact(r - h)) / (2 * h);
      rep.max_derivative_gap = std::max(rep.max_derivative_gap, std::abs(deriv - k));
    }
  }
  return rep;
}

}  // namespace slowmo
