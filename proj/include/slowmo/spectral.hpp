#pragma once

#include <memory>
#include <vector>

#include "slowmo/grid.hpp"

namespace slowmo {

/**
 * Cosine-transform diagonalization of the mirror-ghost Neumann Laplacian.
 *
 * Coefficients share the row-major layout of the grid. eigenvalue(k) is the
 * symbol of -Laplacian, sum over axes of (4/h^2) sin^2(pi k / (2n)).
 * inverse(forward(x)) == x up to rounding.
 */
class NeumannSpectral {
 public:
  explicit NeumannSpectral(const DomainGrid& grid);
  ~NeumannSpectral();
  NeumannSpectral(NeumannSpectral&&) noexcept;
  NeumannSpectral& operator=(NeumannSpectral&&) noexcept;
  NeumannSpectral(const NeumannSpectral&) = delete;
  NeumannSpectral& operator=(const NeumannSpectral&) = delete;

  const DomainGrid& grid() const { return grid_; }
  void forward(const std::vector<double>& in, std::vector<double>& out) const;
  void inverse(const std::vector<double>& in, std::vector<double>& out) const;
  const std::vector<double>& eigenvalues() const { return eig_; }

  /// Zero-mean g with -Lap g = f; f must have zero mean.
  ScalarField solve_poisson(const ScalarField& f) const;

 private:
  struct Plans;
  DomainGrid grid_;
  std::vector<double> eig_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace slowmo
