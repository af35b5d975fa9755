#include "slowmo/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "slowmo/error.hpp"

namespace slowmo {

struct NeumannSpectral::Plans {
  double* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  double norm = 1.0;
  std::size_t n = 0;

  ~Plans() {
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (buf) fftw_free(buf);
  }
};

NeumannSpectral::NeumannSpectral(const DomainGrid& grid) : grid_(grid), plans_(new Plans) {
  const int nx = grid.nx(), ny = grid.ny();
  plans_->n = grid.size();
  plans_->buf = static_cast<double*>(fftw_malloc(sizeof(double) * plans_->n));
  if (!plans_->buf) throw NumericalError("transform buffer allocation failed");
  if (grid.dim() == 1) {
    plans_->fwd = fftw_plan_r2r_1d(nx, plans_->buf, plans_->buf, FFTW_REDFT10, FFTW_ESTIMATE);
    plans_->inv = fftw_plan_r2r_1d(nx, plans_->buf, plans_->buf, FFTW_REDFT01, FFTW_ESTIMATE);
    plans_->norm = 1.0 / (2.0 * nx);
  } else {
    plans_->fwd = fftw_plan_r2r_2d(ny, nx, plans_->buf, plans_->buf, FFTW_REDFT10, FFTW_REDFT10,
                                   FFTW_ESTIMATE);
    plans_->inv = fftw_plan_r2r_2d(ny, nx, plans_->buf, plans_->buf, FFTW_REDFT01, FFTW_REDFT01,
                                   FFTW_ESTIMATE);
    plans_->norm = 1.0 / (4.0 * nx * ny);
  }
  if (!plans_->fwd || !plans_->inv) throw NumericalError("transform planning failed");

  auto axis_symbol = [](int k, int n, double h) {
    const double s = std::sin(std::numbers::pi * k / (2.0 * n));
    return 4.0 / (h * h) * s * s;
  };
  eig_.assign(plans_->n, 0.0);
  for (int j = 0; j < ny; ++j) {
    const double ey = grid.dim() == 2 ? axis_symbol(j, ny, grid.hy()) : 0.0;
    for (int i = 0; i < nx; ++i) eig_[grid.index(i, j)] = axis_symbol(i, nx, grid.hx()) + ey;
  }
}

NeumannSpectral::~NeumannSpectral() = default;
NeumannSpectral::NeumannSpectral(NeumannSpectral&&) noexcept = default;
NeumannSpectral& NeumannSpectral::operator=(NeumannSpectral&&) noexcept = default;

void NeumannSpectral::forward(const std::vector<double>& in, std::vector<double>& out) const {
  if (in.size() != plans_->n) throw GridMismatch("transform input has the wrong size");
  std::memcpy(plans_->buf, in.data(), sizeof(double) * plans_->n);
  fftw_execute(plans_->fwd);
  out.resize(plans_->n);
  std::memcpy(out.data(), plans_->buf, sizeof(double) * plans_->n);
}

void NeumannSpectral::inverse(const std::vector<double>& in, std::vector<double>& out) const {
  if (in.size() != plans_->n) throw GridMismatch("transform input has the wrong size");
  std::memcpy(plans_->buf, in.data(), sizeof(double) * plans_->n);
  fftw_execute(plans_->inv);
  out.resize(plans_->n);
  for (std::size_t k = 0; k < plans_->n; ++k) out[k] = plans_->buf[k] * plans_->norm;
}

ScalarField NeumannSpectral::solve_poisson(const ScalarField& f) const {
  if (!(f.grid() == grid_)) throw GridMismatch("poisson right-hand side on a different grid");
  const double mean = integrate(f);
  if (std::abs(mean) > 1e-8) {
    throw SolvabilityError("poisson right-hand side has mean " + std::to_string(mean));
  }
  std::vector<double> c;
  forward(f.raw(), c);
  c[0] = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) c[k] /= eig_[k];
  std::vector<double> g;
  inverse(c, g);
  return ScalarField(grid_, std::move(g));
}

}  // namespace slowmo
