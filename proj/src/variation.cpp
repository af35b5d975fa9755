#include "slowmo/variation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slowmo/error.hpp"

namespace slowmo {

Polyline boundary_polyline(const AnalyticShape& shape, int vertices) {
  if (vertices < 512) throw InvalidArgument("boundary polyline needs at least 512 vertices");
  Polyline p;
  const double pi = std::numbers::pi;
  switch (shape.kind()) {
    case ShapeKind::ball: {
      const auto c = shape.center();
      for (int k = 0; k < vertices; ++k) {
        const double a = 2.0 * pi * k / vertices;
        p.points.push_back({c[0] + shape.radius() * std::cos(a), c[1] + shape.radius() * std::sin(a)});
      }
      p.closed = true;
      break;
    }
    case ShapeKind::quarter_disk: {
      const auto c = shape.center();
      const double a0 = (shape.corner() & 1 ? 0.5 * pi : 0.0) + (shape.corner() == 2 ? 1.5 * pi : 0.0) +
                        (shape.corner() == 3 ? 0.5 * pi : 0.0);
      for (int k = 0; k <= vertices; ++k) {
        const double a = a0 + 0.5 * pi * k / vertices;
        p.points.push_back({c[0] + shape.radius() * std::cos(a), c[1] + shape.radius() * std::sin(a)});
      }
      p.closed = false;
      break;
    }
    case ShapeKind::stripe: {
      // the flat interface runs across the domain; length = shape.perimeter()
      const double len = shape.perimeter();
      for (int k = 0; k <= vertices; ++k) {
        const double s = len * k / vertices;
        if (shape.axis() == 0) {
          p.points.push_back({shape.position(), s});
        } else {
          p.points.push_back({s, shape.position()});
        }
      }
      p.closed = false;
      break;
    }
    case ShapeKind::custom:
      throw InvalidArgument("custom shapes have no boundary parametrization");
  }
  return p;
}

double polyline_length(const Polyline& p) {
  double len = 0.0;
  const std::size_t n = p.points.size();
  const std::size_t m = p.closed ? n : n - 1;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& a = p.points[k];
    const auto& b = p.points[(k + 1) % n];
    len += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return len;
}

namespace {

Polyline displaced(const Polyline& p, const VectorField2& T, double t) {
  Polyline q = p;
  for (auto& x : q.points) {
    const auto v = T(x[0], x[1]);
    x[0] += t * v[0];
    x[1] += t * v[1];
  }
  return q;
}

}  // namespace

FirstVariationReport first_variation_check(const AnalyticShape& shape, const VectorField2& T,
                                           const std::vector<double>& t_values, int vertices) {
  if (t_values.empty()) throw InvalidArgument("first variation check needs t values");
  const Polyline p = boundary_polyline(shape, vertices);
  FirstVariationReport r;
  r.perimeter = polyline_length(p);

  // tau . (DT tau) at segment midpoints, DT tau by a directional central difference
  const std::size_t n = p.points.size();
  const std::size_t m = p.closed ? n : n - 1;
  const double fd = 1e-6;
  double pred = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& a = p.points[k];
    const auto& b = p.points[(k + 1) % n];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    if (len == 0.0) throw InvalidArgument("degenerate boundary parametrization");
    const double tx = (b[0] - a[0]) / len, ty = (b[1] - a[1]) / len;
    const double mx = 0.5 * (a[0] + b[0]), my = 0.5 * (a[1] + b[1]);
    const auto tp = T(mx + fd * tx, my + fd * ty);
    const auto tm = T(mx - fd * tx, my - fd * ty);
    const double dx = (tp[0] - tm[0]) / (2 * fd), dy = (tp[1] - tm[1]) / (2 * fd);
    pred += (tx * dx + ty * dy) * len;
  }
  r.predicted = pred;

  for (double t : t_values) {
    if (!(t > 0.0)) throw InvalidArgument("t values must be positive");
    const double lp = polyline_length(displaced(p, T, t));
    const double lm = polyline_length(displaced(p, T, -t));
    r.t_values.push_back(t);
    r.forward_slope.push_back((lp - r.perimeter) / t);
    r.central_slope.push_back((lp - lm) / (2 * t));
    r.max_forward_discrepancy =
        std::max(r.max_forward_discrepancy, std::abs(r.forward_slope.back() - pred));
    r.max_central_discrepancy =
        std::max(r.max_central_discrepancy, std::abs(r.central_slope.back() - pred));
  }
  return r;
}

SecondVariationReport second_variation_check(const AnalyticShape& ball,
                                             const std::function<double(double)>& zeta,
                                             const std::vector<double>& t_values, int vertices) {
  if (ball.kind() != ShapeKind::ball) throw InvalidArgument("second variation check needs a ball");
  if (vertices < 512) throw InvalidArgument("second variation check needs at least 512 vertices");
  const double pi = std::numbers::pi;
  const double rho = ball.radius();
  const auto c = ball.center();

  auto length = [&](double t) {
    Polyline p;
    for (int k = 0; k < vertices; ++k) {
      const double a = 2.0 * pi * k / vertices;
      const double r = rho + t * zeta(a);
      p.points.push_back({c[0] + r * std::cos(a), c[1] + r * std::sin(a)});
    }
    return polyline_length(p);
  };

  // integral over the circle of (d zeta / ds)^2, ds = rho d phi
  const double dphi = 2.0 * pi / vertices, fd = 1e-5;
  double pred = 0.0;
  for (int k = 0; k < vertices; ++k) {
    const double a = (k + 0.5) * dphi;
    const double dz = (zeta(a + fd) - zeta(a - fd)) / (2 * fd);
    pred += (dz / rho) * (dz / rho) * rho * dphi;
  }

  SecondVariationReport r;
  r.predicted = pred;
  const double l0 = length(0.0);
  for (double t : t_values) {
    if (!(t > 0.0)) throw InvalidArgument("t values must be positive");
    const double d2 = (length(t) - 2.0 * l0 + length(-t)) / (t * t);
    r.t_values.push_back(t);
    r.second_difference.push_back(d2);
    const double err = std::abs(d2 - pred);
    r.max_abs_error = std::max(r.max_abs_error, err);
    if (pred != 0.0) r.max_rel_error = std::max(r.max_rel_error, err / std::abs(pred));
  }
  return r;
}

}  // namespace slowmo
