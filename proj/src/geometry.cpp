#include "slowmo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "slowmo/energy.hpp"
#include "slowmo/error.hpp"

namespace slowmo {

double l1_perimeter(const DomainGrid& grid, const std::vector<std::uint8_t>& m) {
  const int nx = grid.nx(), ny = grid.ny();
  std::size_t vertical_edges = 0, horizontal_edges = 0;
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i + 1 < nx; ++i) vertical_edges += (m[row + i] != m[row + i + 1]);
    if (j + 1 < ny) {
      for (int i = 0; i < nx; ++i) horizontal_edges += (m[row + i] != m[row + nx + i]);
    }
  }
  // An edge between x-neighbours has length hy and vice versa.
  return static_cast<double>(vertical_edges) * grid.hy() +
         static_cast<double>(horizontal_edges) * grid.hx();
}

IndicatorSet::IndicatorSet(const DomainGrid& grid, std::vector<std::uint8_t> members)
    : grid_(grid), members_(std::move(members)) {
  if (members_.size() != grid_.size()) throw InvalidArgument("membership size does not match grid");
  for (auto& v : members_) {
    v = v ? 1 : 0;
    count_ += v;
  }
  volume_ = static_cast<double>(count_) * grid_.cell_volume();
  perimeter_ = l1_perimeter(grid_, members_);
}

IndicatorSet IndicatorSet::empty(const DomainGrid& grid) {
  return IndicatorSet(grid, std::vector<std::uint8_t>(grid.size(), 0));
}

IndicatorSet IndicatorSet::sublevel(const ScalarField& u, double s) {
  std::vector<std::uint8_t> m(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) m[k] = u[k] <= s;
  return IndicatorSet(u.grid(), std::move(m));
}

IndicatorSet IndicatorSet::complement() const {
  std::vector<std::uint8_t> m(members_.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = !members_[k];
  return IndicatorSet(grid_, std::move(m));
}

namespace {

// Binomial [1 4 6 4 1]/16 along one axis with mirror extension.
void smooth_axis(const DomainGrid& g, std::vector<double>& v, int axis) {
  const int nx = g.nx(), ny = g.ny();
  const int n = axis == 0 ? nx : ny;
  if (axis == 1 && g.dim() == 1) return;
  static constexpr double w[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  auto mirror = [n](int k) {
    if (k < 0) return -k - 1;
    if (k >= n) return 2 * n - k - 1;
    return k;
  };
  std::vector<double> out(v.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double s = 0.0;
      for (int t = -2; t <= 2; ++t) {
        const int ii = axis == 0 ? mirror(i + t) : i;
        const int jj = axis == 1 ? mirror(j + t) : j;
        s += w[t + 2] * v[g.index(ii, jj)];
      }
      out[g.index(i, j)] = s;
    }
  }
  v.swap(out);
}

}  // namespace

double smoothed_perimeter(const DomainGrid& g, const std::vector<double>& indicator) {
  std::vector<double> phi = indicator;
  smooth_axis(g, phi, 0);
  smooth_axis(g, phi, 1);
  const int nx = g.nx(), ny = g.ny();
  const double hx = g.hx(), hy = g.hy();
  auto val = [&](int i, int j) {
    i = std::clamp(i, 0, nx - 1);
    j = std::clamp(j, 0, ny - 1);
    return phi[g.index(i, j)];
  };
  double total = 0.0;
  if (g.dim() == 1) {
    for (int i = 1; i < nx; ++i) total += std::abs(val(i, 0) - val(i - 1, 0));
    return total;
  }
  for (int j = 0; j <= ny; ++j) {
    const double wy = (j == 0 || j == ny) ? 0.5 : 1.0;
    for (int i = 0; i <= nx; ++i) {
      const double wx = (i == 0 || i == nx) ? 0.5 : 1.0;
      const double a = val(i - 1, j - 1), b = val(i, j - 1), c = val(i - 1, j), d = val(i, j);
      const double gx = ((b + d) - (a + c)) / (2.0 * hx);
      const double gy = ((c + d) - (a + b)) / (2.0 * hy);
      total += wx * wy * std::hypot(gx, gy);
    }
  }
  return total * hx * hy;
}

double smoothed_perimeter(const IndicatorSet& E) {
  std::vector<double> ind(E.members().begin(), E.members().end());
  return smoothed_perimeter(E.grid(), ind);
}

double perimeter(const IndicatorSet& E, PerimeterEstimator estimator) {
  return estimator == PerimeterEstimator::l1 ? E.perimeter() : smoothed_perimeter(E);
}

double alpha(const IndicatorSet& E1, const IndicatorSet& E2) {
  if (!(E1.grid() == E2.grid())) throw GridMismatch("alpha of sets on different grids");
  std::size_t only1 = 0, only2 = 0;
  for (std::size_t k = 0; k < E1.members().size(); ++k) {
    only1 += E1.contains(k) && !E2.contains(k);
    only2 += E2.contains(k) && !E1.contains(k);
  }
  return static_cast<double>(std::min(only1, only2)) * E1.grid().cell_volume();
}

AnalyticShape AnalyticShape::stripe(double position, int axis, double lx, double ly) {
  if (axis != 0 && axis != 1) throw InvalidArgument("stripe axis must be 0 or 1");
  const double len = axis == 0 ? lx : ly;
  if (!(position > 0.0 && position < len)) throw InvalidArgument("stripe position outside domain");
  AnalyticShape s;
  s.kind_ = ShapeKind::stripe;
  s.position_ = position;
  s.axis_ = axis;
  s.lx_ = lx;
  s.ly_ = ly;
  s.volume_ = position * (axis == 0 ? ly : lx);
  s.perimeter_ = axis == 0 ? ly : lx;
  s.curvature_ = 0.0;
  return s;
}

AnalyticShape AnalyticShape::ball(std::array<double, 2> center, double radius, double lx,
                                  double ly) {
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  const double clear = std::min({center[0], lx - center[0], center[1], ly - center[1]});
  if (!(clear > radius)) {
    throw InvalidArgument("ball is not compactly contained in the domain");
  }
  AnalyticShape s;
  s.kind_ = ShapeKind::ball;
  s.center_ = center;
  s.radius_ = radius;
  s.lx_ = lx;
  s.ly_ = ly;
  s.volume_ = std::numbers::pi * radius * radius;
  s.perimeter_ = 2.0 * std::numbers::pi * radius;
  s.curvature_ = 1.0 / radius;
  return s;
}

AnalyticShape AnalyticShape::quarter_disk(int corner, double radius, double lx, double ly) {
  if (corner < 0 || corner > 3) throw InvalidArgument("corner index must be 0..3");
  if (!(radius > 0.0) || radius >= std::min(lx, ly)) {
    throw InvalidArgument("quarter disk radius must be positive and below the shorter side");
  }
  AnalyticShape s;
  s.kind_ = ShapeKind::quarter_disk;
  s.corner_ = corner;
  s.radius_ = radius;
  s.lx_ = lx;
  s.ly_ = ly;
  s.center_ = {(corner & 1) ? lx : 0.0, (corner & 2) ? ly : 0.0};
  s.volume_ = 0.25 * std::numbers::pi * radius * radius;
  s.perimeter_ = 0.5 * std::numbers::pi * radius;
  s.curvature_ = 1.0 / radius;
  return s;
}

AnalyticShape AnalyticShape::custom(std::function<double(double, double)> signed_distance,
                                    double volume, double perimeter, double curvature,
                                    std::string tag) {
  if (!signed_distance) throw InvalidArgument("custom shape needs a signed distance");
  AnalyticShape s;
  s.kind_ = ShapeKind::custom;
  s.sd_ = std::move(signed_distance);
  s.volume_ = volume;
  s.perimeter_ = perimeter;
  s.curvature_ = curvature;
  s.custom_tag_ = std::move(tag);
  return s;
}

AnalyticShape AnalyticShape::on_grid(const DomainGrid& grid) const {
  switch (kind_) {
    case ShapeKind::stripe:
      return stripe(position_, axis_, grid.lx(), grid.ly());
    case ShapeKind::ball:
      return ball(center_, radius_, grid.lx(), grid.ly());
    case ShapeKind::quarter_disk:
      return quarter_disk(corner_, radius_, grid.lx(), grid.ly());
    case ShapeKind::custom:
      return *this;
  }
  return *this;
}

std::string AnalyticShape::tag() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case ShapeKind::stripe:
      os << "stripe(" << position_ << "," << axis_ << ")";
      break;
    case ShapeKind::ball:
      os << "ball(" << center_[0] << "," << center_[1] << "," << radius_ << ")";
      break;
    case ShapeKind::quarter_disk:
      os << "quarter_disk(" << corner_ << "," << radius_ << ")";
      break;
    case ShapeKind::custom:
      os << custom_tag_;
      break;
  }
  return os.str();
}

double AnalyticShape::signed_distance(double x, double y) const {
  switch (kind_) {
    case ShapeKind::stripe:
      return (axis_ == 0 ? x : y) - position_;
    case ShapeKind::ball:
    case ShapeKind::quarter_disk:
      return std::hypot(x - center_[0], y - center_[1]) - radius_;
    case ShapeKind::custom:
      return sd_(x, y);
  }
  return 0.0;
}

double AnalyticShape::boundary_clearance() const {
  switch (kind_) {
    case ShapeKind::stripe:
      return std::numeric_limits<double>::infinity();
    case ShapeKind::ball:
      return std::min({center_[0], lx_ - center_[0], center_[1], ly_ - center_[1]}) - radius_;
    case ShapeKind::quarter_disk:
      return std::min(lx_, ly_) - radius_;
    case ShapeKind::custom:
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

IndicatorSet AnalyticShape::rasterize(const DomainGrid& grid) const {
  std::vector<std::uint8_t> m(grid.size());
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) m[grid.index(i, j)] = contains(grid.x(i), grid.y(j));
  return IndicatorSet(grid, std::move(m));
}

ScalarField sharp_interface_field(const IndicatorSet& E) {
  ScalarField u(E.grid(), 1.0);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (E.contains(k)) u[k] = -1.0;
  return u;
}

ScalarField sharp_interface_field(const AnalyticShape& shape, const DomainGrid& grid) {
  return sharp_interface_field(shape.rasterize(grid));
}

ScalarField signed_distance(const IndicatorSet& E) {
  const DomainGrid& g = E.grid();
  const int nx = g.nx(), ny = g.ny();
  const double hx = g.hx(), hy = g.hy();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(g.size(), inf);
  std::vector<std::uint8_t> done(g.size(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      double best = inf;
      const bool in = E.contains(k);
      if (i > 0 && E.contains(i - 1, j) != in) best = std::min(best, 0.5 * hx);
      if (i + 1 < nx && E.contains(i + 1, j) != in) best = std::min(best, 0.5 * hx);
      if (g.dim() == 2) {
        if (j > 0 && E.contains(i, j - 1) != in) best = std::min(best, 0.5 * hy);
        if (j + 1 < ny && E.contains(i, j + 1) != in) best = std::min(best, 0.5 * hy);
      }
      if (best < inf) {
        d[k] = best;
        heap.push({best, k});
      }
    }
  }

  auto solve = [&](int i, int j) {
    const bool in = E.contains(i, j);
    auto nb = [&](int ii, int jj) {
      if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) return inf;
      const std::size_t kk = g.index(ii, jj);
      if (!done[kk] || E.contains(kk) != in) return inf;
      return d[kk];
    };
    const double a = std::min(nb(i - 1, j), nb(i + 1, j));
    const double b = g.dim() == 2 ? std::min(nb(i, j - 1), nb(i, j + 1)) : inf;
    if (a == inf && b == inf) return inf;
    if (a == inf) return b + hy;
    if (b == inf) return a + hx;
    // (t-a)^2/hx^2 + (t-b)^2/hy^2 = 1
    const double ax = 1.0 / (hx * hx), by = 1.0 / (hy * hy);
    const double qa = ax + by, qb = -2.0 * (a * ax + b * by), qc = a * a * ax + b * b * by - 1.0;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return std::min(a + hx, b + hy);
    const double t = (-qb + std::sqrt(disc)) / (2.0 * qa);
    if (t < std::max(a, b)) return std::min(a + hx, b + hy);
    return t;
  };

  while (!heap.empty()) {
    auto [dist, k] = heap.top();
    heap.pop();
    if (done[k] || dist > d[k]) continue;
    done[k] = 1;
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
    for (int t = 0; t < 4; ++t) {
      const int ii = i + di[t], jj = j + dj[t];
      if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
      const std::size_t kk = g.index(ii, jj);
      if (done[kk] || E.contains(kk) != E.contains(k)) continue;
      const double cand = solve(ii, jj);
      if (cand < d[kk]) {
        d[kk] = cand;
        heap.push({cand, kk});
      }
    }
  }
  // A set with no interface is all inside or all outside.
  const double far = g.lx() + g.ly();
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] == inf) d[k] = far;
    if (E.contains(k)) d[k] = -d[k];
  }
  return ScalarField(g, std::move(d));
}

void require_resolved(const DomainGrid& grid, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (eps < 2.0 * grid.max_spacing() * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "eps = " << eps << " is below twice the grid spacing " << grid.max_spacing()
        << "; the interface would span fewer than 4 cells";
    throw ResolutionError(msg.str());
  }
}

namespace {

WellPrepared finish_well_prepared(ScalarField u, double volume, double sharp, double eps,
                                  const DoubleWell& w, double theta) {
  WellPrepared out{std::move(u)};
  out.target_mass = (w.a + w.b) == 0.0 ? 1.0 - 2.0 * volume : w.a * volume + w.b * (1.0 - volume);
  out.shift = out.target_mass - integrate(out.field);
  for (double& v : out.field.raw()) v += out.shift;
  out.energy = energy_G(out.field, eps, w, theta).total;
  out.sharp_energy = sharp;
  out.achieved_C = (out.energy - out.sharp_energy) / eps;
  return out;
}

}  // namespace

WellPrepared well_prepared(const AnalyticShape& shape, const DomainGrid& grid, double eps,
                           const DoubleWell& w, double theta) {
  require_resolved(grid, eps);
  const OptimalProfile q(w, eps, theta);
  const ScalarField u = ScalarField::from_function(
      grid, [&](double x, double y) { return q(shape.signed_distance(x, y)); });
  const double sharp = sharp_energy_G0(shape, w, theta);
  WellPrepared out = finish_well_prepared(u, shape.volume(), sharp, eps, w, theta);
  out.clearance_ok = shape.boundary_clearance() >= 6.0 * eps;
  return out;
}

WellPrepared well_prepared(const IndicatorSet& E, double eps, const DoubleWell& w, double theta) {
  require_resolved(E.grid(), eps);
  const OptimalProfile q(w, eps, theta);
  ScalarField u = signed_distance(E);
  for (double& v : u.raw()) v = q(v);
  const double sharp = sharp_energy_G0(E, w, PerimeterEstimator::smoothed, theta);
  return finish_well_prepared(u, E.volume(), sharp, eps, w, theta);
}

}  // namespace slowmo
