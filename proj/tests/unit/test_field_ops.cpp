#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "slowmo/error.hpp"
#include "slowmo/field_ops.hpp"

using namespace slowmo;
using std::numbers::pi;

namespace {

ScalarField random_zero_mean(const DomainGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = nd(rng);
  return remove_mean(f);
}

double inner(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * a.grid().cell_volume();
}

}  // namespace

TEST_CASE("laplacian of constants vanishes") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {16, 16});
  const ScalarField l = laplacian_neumann(ScalarField(g, 3.7));
  for (double v : l.values()) CHECK(v == 0.0);
}

TEST_CASE("laplacian eigenfunction examples") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {128, 128});
  const auto u = ScalarField::from_function(g, [](double x, double) { return std::cos(pi * x); });
  const ScalarField l = laplacian_neumann(u);
  double worst = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    worst = std::max(worst, std::abs(l[k] + pi * pi * u[k]) / std::abs(pi * pi * u[k]));
  CHECK(worst <= 1e-3);

  const auto v = ScalarField::from_function(
      g, [](double x, double y) { return std::cos(2 * pi * x) * std::cos(3 * pi * y); });
  const ScalarField lv = laplacian_neumann(v);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    num = std::max(num, std::abs(lv[k] + 13 * pi * pi * v[k]));
    den = std::max(den, std::abs(13 * pi * pi * v[k]));
  }
  CHECK(num / den <= 2e-3);
}

TEST_CASE("discrete divergence theorem and self-adjointness") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    const DomainGrid g = dim == 1 ? make_grid(1, {1.0}, {64}) : make_grid(2, {2.0, 0.5}, {48, 16});
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
      ScalarField u(g), v(g);
      for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = nd(rng);
        v[k] = nd(rng);
      }
      const ScalarField lu = laplacian_neumann(u), lv = laplacian_neumann(v);
      const double scale = std::sqrt(inner(lu, lu));
      CHECK(std::abs(integrate(lu)) <= 1e-10 * scale);
      const double a = inner(lu, v), b = inner(u, lv);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1.0));
    }
  }
}

TEST_CASE("grad_sq examples") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  const ScalarField gc = grad_sq(ScalarField(g, 2.0));
  for (double v : gc.values()) CHECK(v == 0.0);

  const DomainGrid g1 = make_grid(1, {1.0}, {64});
  const auto lin = ScalarField::from_function(g1, [](double x, double) { return x; });
  const ScalarField gl = grad_sq(lin);
  for (int i = 1; i < 63; ++i) CHECK(std::abs(gl[i] - 1.0) <= 1e-10);
  // boundary cells see one mirrored (zero) difference
  CHECK(gl[0] == doctest::Approx(0.5));

  const DomainGrid g2 = make_grid(2, {1.0, 1.0}, {128, 128});
  const auto c = ScalarField::from_function(g2, [](double x, double) { return std::cos(pi * x); });
  CHECK(std::abs(integrate(grad_sq(c)) - pi * pi / 2) <= 1e-2);
}

TEST_CASE("grad_sq integrates to the Dirichlet form -int u Lap u") {
  std::mt19937_64 rng(5);
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {24, 24});
  std::normal_distribution<double> nd;
  ScalarField u(g);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = nd(rng);
  const double a = integrate(grad_sq(u));
  const double b = -inner(u, laplacian_neumann(u));
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  CHECK(dirichlet_energy(u) == doctest::Approx(b).epsilon(1e-12));
  for (double v : grad_sq(u).values()) CHECK(v >= 0.0);
}

TEST_CASE("poisson examples") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {64, 64});
  OperatorWorkspace ws(g);
  const ScalarField z = ws.poisson_zero_mean(ScalarField(g, 0.0));
  for (double v : z.values()) CHECK(v == 0.0);

  const auto f = ScalarField::from_function(g, [](double x, double) { return std::cos(pi * x); });
  const ScalarField sol = ws.poisson_zero_mean(f);
  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    err = std::max(err, std::abs(sol[k] - f[k] / (pi * pi)));
    ref = std::max(ref, std::abs(f[k] / (pi * pi)));
  }
  CHECK(err / ref <= 1e-3);
  CHECK(std::abs(integrate(sol)) <= 1e-10);
  CHECK(ws.last_stats().relative_residual <= 1e-10);

  const auto f2 = ScalarField::from_function(
      g, [](double x, double y) { return std::cos(pi * x) + std::cos(pi * y); });
  const ScalarField s2 = ws.poisson_zero_mean(f2);
  err = 0.0;
  ref = 0.0;
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) {
      const double e = (std::cos(pi * g.x(i)) + std::cos(pi * g.y(j))) / (pi * pi);
      err = std::max(err, std::abs(s2.at(i, j) - e));
      ref = std::max(ref, std::abs(e));
    }
  CHECK(err / ref <= 1e-3);
}

TEST_CASE("poisson rejects nonzero mean and reports non-convergence") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  OperatorWorkspace ws(g);
  CHECK_THROWS_AS(ws.poisson_zero_mean(ScalarField(g, 1.0)), SolvabilityError);
  OperatorWorkspace tight(g, 1e-10, 100);
  std::mt19937_64 rng(3);
  try {
    (void)tight.poisson_zero_mean(random_zero_mean(g, rng));
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 100);
    CHECK(e.residual() > 1e-10);
  }
  CHECK_THROWS_AS(OperatorWorkspace(g, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(OperatorWorkspace(g, 1e-10, 50), InvalidArgument);
}

TEST_CASE("CG and cosine-transform solvers agree") {
  std::mt19937_64 rng(17);
  for (int dim : {1, 2}) {
    const DomainGrid g = dim == 1 ? make_grid(1, {1.0}, {100}) : make_grid(2, {2.0, 0.5}, {64, 20});
    OperatorWorkspace cg(g), fast(g);
    fast.set_fast(true);
    const ScalarField f = random_zero_mean(g, rng);
    const ScalarField a = cg.poisson_zero_mean(f), b = fast.poisson_zero_mean(f);
    double diff = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      diff = std::max(diff, std::abs(a[k] - b[k]));
      mag = std::max(mag, std::abs(a[k]));
    }
    CHECK(diff <= 1e-8 * mag);
    // residual of the transform solve against the stencil
    const ScalarField lb = laplacian_neumann(b);
    double res = 0.0, fn = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      res += std::pow(lb[k] + f[k], 2);
      fn += f[k] * f[k];
    }
    CHECK(std::sqrt(res / fn) <= 1e-10);
  }
}

TEST_CASE("x2 norm examples") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {64, 64});
  OperatorWorkspace ws(g);
  CHECK(ws.x2_norm(ScalarField(g, 0.0)) == 0.0);
  const auto f = ScalarField::from_function(g, [](double x, double) { return std::cos(pi * x); });
  const double n1 = ws.x2_norm(f);
  CHECK(std::abs(n1 - 1.0 / (pi * std::sqrt(2.0))) <= 1e-3);
  CHECK(ws.last_x2_identity_gap() <= 1e-8);
  ScalarField f2 = f;
  for (double& v : f2.raw()) v *= 2.0;
  CHECK(ws.x2_norm(f2) == doctest::Approx(2.0 * n1).epsilon(1e-9));
  CHECK_THROWS_AS(ws.x2_norm(ScalarField(g, 0.5)), SolvabilityError);
}

TEST_CASE("x2 inner product is symmetric") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {32, 32});
  OperatorWorkspace ws(g);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField a = random_zero_mean(g, rng), b = random_zero_mean(g, rng);
    const double ab = ws.x2_inner(a, b), ba = ws.x2_inner(b, a);
    CHECK(std::abs(ab - ba) <= 1e-8 * std::max(std::abs(ab), 1e-3));
  }
}

TEST_CASE("x2 norm has order -1") {
  const DomainGrid g = make_grid(2, {1.0, 1.0}, {128, 128});
  OperatorWorkspace ws(g);
  ws.set_fast(true);
  std::vector<double> lk, lr;
  for (int k : {1, 2, 4, 8}) {
    const auto f = ScalarField::from_function(g, [k](double x, double) { return std::cos(k * pi * x); });
    double l2 = 0.0;
    for (double v : f.values()) l2 += v * v;
    l2 = std::sqrt(l2 * g.cell_volume());
    lk.push_back(std::log(k * pi));
    lr.push_back(std::log(ws.x2_norm(f) / l2));
  }
  // least-squares slope
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lk.size(); ++i) {
    mx += lk[i];
    my += lr[i];
  }
  mx /= lk.size();
  my /= lk.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lk.size(); ++i) {
    sxy += (lk[i] - mx) * (lr[i] - my);
    sxx += (lk[i] - mx) * (lk[i] - mx);
  }
  CHECK(sxy / sxx == doctest::Approx(-1.0).epsilon(0.01));
}
