#pragma once

#include <memory>
#include <vector>

#include "slowmo/grid.hpp"
#include "slowmo/spectral.hpp"

namespace slowmo {

/// 3/5-point Laplacian with mirror ghost cells (zero normal flux).
ScalarField laplacian_neumann(const ScalarField& u);
void laplacian_neumann(const DomainGrid& grid, const std::vector<double>& u,
                       std::vector<double>& out);

/**
 * Cellwise |grad u|^2 as the average of squared forward and backward
 * differences per axis. Differences across the boundary vanish under the
 * mirror ghosts, so the integral equals the discrete Dirichlet form
 * -integral(u * laplacian_neumann(u)).
 */
ScalarField grad_sq(const ScalarField& u);

/// integral of grad_sq(u), i.e. the sum over interior edges of (du/h)^2 * cell volume.
double dirichlet_energy(const ScalarField& u);

struct PoissonStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/**
 * Scratch space and solver state for the zero-mean Neumann Poisson problem.
 *
 * The reference path is Jacobi-preconditioned CG on the zero-mean subspace.
 * set_fast(true) switches to the cosine-transform solver.
 */
class OperatorWorkspace {
 public:
  explicit OperatorWorkspace(const DomainGrid& grid, double tolerance = 1e-10,
                             int max_iterations = 0);

  const DomainGrid& grid() const { return grid_; }
  double tolerance() const { return tol_; }
  int max_iterations() const { return max_iter_; }
  void set_fast(bool fast);
  bool fast() const { return fast_; }
  const NeumannSpectral& spectral();

  /// -Lap g = f with integral(g) = 0.
  ScalarField poisson_zero_mean(const ScalarField& f);
  const PoissonStats& last_stats() const { return stats_; }

  double x2_inner(const ScalarField& f1, const ScalarField& f2);
  double x2_norm(const ScalarField& f);
  /// |sqrt(int f g) - sqrt(int |grad g|^2)| from the last x2_norm call.
  double last_x2_identity_gap() const { return x2_gap_; }

 private:
  ScalarField solve_cg(const ScalarField& f);

  DomainGrid grid_;
  double tol_;
  int max_iter_;
  bool fast_ = false;
  std::unique_ptr<NeumannSpectral> spectral_;
  std::vector<double> r_, z_, p_, ap_, diag_;
  PoissonStats stats_;
  double x2_gap_ = 0.0;
};

/// Reference CG solve with default tolerance 1e-10.
ScalarField poisson_neumann_zero_mean(const ScalarField& f);
double x2_inner(const ScalarField& f1, const ScalarField& f2);
double x2_norm(const ScalarField& f);

/// u minus its mean.
ScalarField remove_mean(const ScalarField& u);

}  // namespace slowmo
