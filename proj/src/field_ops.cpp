#include "slowmo/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slowmo/error.hpp"

namespace slowmo {

void laplacian_neumann(const DomainGrid& grid, const std::vector<double>& u,
                       std::vector<double>& out) {
  const int nx = grid.nx(), ny = grid.ny();
  const double ix2 = 1.0 / (grid.hx() * grid.hx());
  const double iy2 = 1.0 / (grid.hy() * grid.hy());
  out.assign(u.size(), 0.0);
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const double c = u[row + i];
      const double l = i > 0 ? u[row + i - 1] : c;
      const double r = i < nx - 1 ? u[row + i + 1] : c;
      double v = (l - 2.0 * c + r) * ix2;
      if (grid.dim() == 2) {
        const double d = j > 0 ? u[row - nx + i] : c;
        const double t = j < ny - 1 ? u[row + nx + i] : c;
        v += (d - 2.0 * c + t) * iy2;
      }
      out[row + i] = v;
    }
  }
}

ScalarField laplacian_neumann(const ScalarField& u) {
  std::vector<double> out;
  laplacian_neumann(u.grid(), u.raw(), out);
  return ScalarField(u.grid(), std::move(out));
}

ScalarField grad_sq(const ScalarField& u) {
  const DomainGrid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  ScalarField out(g);
  const double hx = g.hx(), hy = g.hy();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = u.at(i, j);
      const double dxp = i < nx - 1 ? (u.at(i + 1, j) - c) / hx : 0.0;
      const double dxm = i > 0 ? (c - u.at(i - 1, j)) / hx : 0.0;
      double v = 0.5 * (dxp * dxp + dxm * dxm);
      if (g.dim() == 2) {
        const double dyp = j < ny - 1 ? (u.at(i, j + 1) - c) / hy : 0.0;
        const double dym = j > 0 ? (c - u.at(i, j - 1)) / hy : 0.0;
        v += 0.5 * (dyp * dyp + dym * dym);
      }
      out.at(i, j) = v;
    }
  }
  return out;
}

double dirichlet_energy(const ScalarField& u) {
  const DomainGrid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  double sum = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = (u.at(i + 1, j) - u.at(i, j)) / g.hx();
      sum += d * d;
    }
  }
  if (g.dim() == 2) {
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double d = (u.at(i, j + 1) - u.at(i, j)) / g.hy();
        sum += d * d;
      }
    }
  }
  return sum * g.cell_volume();
}

ScalarField remove_mean(const ScalarField& u) {
  const double m = integrate(u);
  ScalarField out = u;
  for (double& v : out.raw()) v -= m;
  return out;
}

OperatorWorkspace::OperatorWorkspace(const DomainGrid& grid, double tolerance, int max_iterations)
    : grid_(grid), tol_(tolerance), max_iter_(max_iterations) {
  if (!(tolerance > 0.0) || tolerance > 1e-6) {
    throw InvalidArgument("poisson tolerance must lie in (0, 1e-6]");
  }
  if (max_iter_ == 0) max_iter_ = std::max(1000, static_cast<int>(4 * (grid.nx() + grid.ny())) * 20);
  if (max_iter_ < 100) throw InvalidArgument("poisson iteration cap must be at least 100");
  const std::size_t n = grid.size();
  r_.resize(n);
  z_.resize(n);
  p_.resize(n);
  ap_.resize(n);
  diag_.resize(n);
  const double ix2 = 1.0 / (grid.hx() * grid.hx());
  const double iy2 = 1.0 / (grid.hy() * grid.hy());
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      double d = ((i > 0) + (i < grid.nx() - 1)) * ix2;
      if (grid.dim() == 2) d += ((j > 0) + (j < grid.ny() - 1)) * iy2;
      diag_[grid.index(i, j)] = d;
    }
  }
}

void OperatorWorkspace::set_fast(bool fast) {
  fast_ = fast;
  if (fast_) spectral();
}

const NeumannSpectral& OperatorWorkspace::spectral() {
  if (!spectral_) spectral_ = std::make_unique<NeumannSpectral>(grid_);
  return *spectral_;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void project_mean(std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

}  // namespace

ScalarField OperatorWorkspace::solve_cg(const ScalarField& f) {
  const std::size_t n = grid_.size();
  std::vector<double> x(n, 0.0);
  r_ = f.raw();
  project_mean(r_);
  const double fnorm = std::sqrt(dot(r_, r_));
  stats_ = PoissonStats{};
  if (fnorm == 0.0) return ScalarField(grid_, 0.0);
  for (std::size_t k = 0; k < n; ++k) z_[k] = r_[k] / diag_[k];
  project_mean(z_);
  p_ = z_;
  double rz = dot(r_, z_);
  int it = 0;
  double rel = 1.0;
  for (; it < max_iter_; ++it) {
    laplacian_neumann(grid_, p_, ap_);
    for (double& v : ap_) v = -v;
    const double pap = dot(p_, ap_);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p_[k];
      r_[k] -= alpha * ap_[k];
    }
    rel = std::sqrt(dot(r_, r_)) / fnorm;
    if (rel <= tol_) {
      ++it;
      break;
    }
    for (std::size_t k = 0; k < n; ++k) z_[k] = r_[k] / diag_[k];
    project_mean(z_);
    const double rz_new = dot(r_, z_);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p_[k] = z_[k] + beta * p_[k];
  }
  project_mean(x);
  // Recompute the true residual so the report does not rely on the recurrence.
  laplacian_neumann(grid_, x, ap_);
  std::vector<double> fr = f.raw();
  project_mean(fr);
  double res = 0.0;
  for (std::size_t k = 0; k < n; ++k) res += (ap_[k] + fr[k]) * (ap_[k] + fr[k]);
  stats_.iterations = it;
  stats_.relative_residual = std::sqrt(res) / fnorm;
  if (stats_.relative_residual > std::max(tol_ * 10.0, 1e-12) && rel > tol_) {
    std::ostringstream msg;
    msg << "poisson CG stopped after " << it << " iterations with relative residual "
        << stats_.relative_residual;
    throw ConvergenceError(msg.str(), it, stats_.relative_residual);
  }
  return ScalarField(grid_, std::move(x));
}

ScalarField OperatorWorkspace::poisson_zero_mean(const ScalarField& f) {
  if (!(f.grid() == grid_)) throw GridMismatch("poisson right-hand side on a different grid");
  const double mean = integrate(f);
  if (std::abs(mean) > 1e-8) {
    throw SolvabilityError("poisson right-hand side has mean " + std::to_string(mean) +
                           "; the Neumann problem needs zero mean");
  }
  if (fast_) {
    stats_ = PoissonStats{};
    return spectral().solve_poisson(f);
  }
  return solve_cg(f);
}

double OperatorWorkspace::x2_inner(const ScalarField& f1, const ScalarField& f2) {
  require_same_grid(f1, f2);
  const ScalarField g2 = poisson_zero_mean(f2);
  double s = 0.0;
  for (std::size_t k = 0; k < f1.size(); ++k) s += f1[k] * g2[k];
  return s * grid_.cell_volume();
}

double OperatorWorkspace::x2_norm(const ScalarField& f) {
  const ScalarField g = poisson_zero_mean(f);
  const double grad = dirichlet_energy(g);
  double fg = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) fg += f[k] * g[k];
  fg *= grid_.cell_volume();
  x2_gap_ = std::abs(std::sqrt(std::max(0.0, fg)) - std::sqrt(grad));
  return std::sqrt(grad);
}

ScalarField poisson_neumann_zero_mean(const ScalarField& f) {
  OperatorWorkspace ws(f.grid());
  return ws.poisson_zero_mean(f);
}

double x2_inner(const ScalarField& f1, const ScalarField& f2) {
  OperatorWorkspace ws(f1.grid());
  return ws.x2_inner(f1, f2);
}

double x2_norm(const ScalarField& f) {
  OperatorWorkspace ws(f.grid());
  return ws.x2_norm(f);
}

}  // namespace slowmo
