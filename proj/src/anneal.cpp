#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "slowmo/error.hpp"
#include "slowmo/isoperimetry.hpp"

namespace slowmo {

namespace {

class IndexedSet {
 public:
  explicit IndexedSet(std::size_t n) : pos_(n, -1) {}
  void insert(int k) {
    if (pos_[k] >= 0) return;
    pos_[k] = static_cast<int>(items_.size());
    items_.push_back(k);
  }
  void erase(int k) {
    const int p = pos_[k];
    if (p < 0) return;
    const int last = items_.back();
    items_[p] = last;
    pos_[last] = p;
    items_.pop_back();
    pos_[k] = -1;
  }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  int operator[](std::size_t i) const { return items_[i]; }

 private:
  std::vector<int> items_;
  std::vector<int> pos_;
};

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

// Raster set with an incrementally maintained perimeter.
class AnnealState {
 public:
  AnnealState(const DomainGrid& g, const std::vector<std::uint8_t>& m, PerimeterEstimator est)
      : g_(g), nx_(g.nx()), ny_(g.ny()), est_(est), mem_(m),
        bmem_(g.size()), bnon_(g.size()) {
    if (est_ == PerimeterEstimator::smoothed) {
      phi_.assign(g.size(), 0.0);
      for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) phi_[idx(i, j)] = smooth_at(i, j);
      std::vector<double> ind(m.begin(), m.end());
      per_ = smoothed_perimeter(g, ind);
    } else {
      per_ = l1_perimeter(g, m);
    }
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) refresh_boundary(i, j);
  }

  double perimeter() const { return per_; }
  const std::vector<std::uint8_t>& members() const { return mem_; }
  const IndexedSet& boundary_members() const { return bmem_; }
  const IndexedSet& boundary_nonmembers() const { return bnon_; }

  /// Flips cell k and returns the perimeter change.
  double flip(int k) {
    const int i0 = k % nx_, j0 = k / nx_;
    double d = 0.0;
    if (est_ == PerimeterEstimator::l1) {
      const bool in = mem_[k] != 0;
      auto edge = [&](int i, int j, double len) {
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return;
        d += ((mem_[idx(i, j)] != 0) == in) ? len : -len;
      };
      edge(i0 - 1, j0, g_.hy());
      edge(i0 + 1, j0, g_.hy());
      edge(i0, j0 - 1, g_.hx());
      edge(i0, j0 + 1, g_.hx());
      mem_[k] ^= 1;
    } else {
      const double before = local_tv(i0, j0);
      mem_[k] ^= 1;
      if (i0 >= 2 && j0 >= 2 && i0 + 2 < nx_ && j0 + 2 < ny_) {
        // interior: the kernel footprint is not folded by the mirror
        static constexpr double w[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
        const double sgn = mem_[k] ? 1.0 : -1.0;
        for (int b = -2; b <= 2; ++b)
          for (int a = -2; a <= 2; ++a) phi_[idx(i0 + a, j0 + b)] += sgn * w[a + 2] * w[b + 2];
      } else {
        for (int j = std::max(0, j0 - 2); j <= std::min(ny_ - 1, j0 + 2); ++j)
          for (int i = std::max(0, i0 - 2); i <= std::min(nx_ - 1, i0 + 2); ++i)
            phi_[idx(i, j)] = smooth_at(i, j);
      }
      d = local_tv(i0, j0) - before;
    }
    per_ += d;
    for (int j = std::max(0, j0 - 1); j <= std::min(ny_ - 1, j0 + 1); ++j)
      for (int i = std::max(0, i0 - 1); i <= std::min(nx_ - 1, i0 + 1); ++i) refresh_boundary(i, j);
    return d;
  }

 private:
  int idx(int i, int j) const { return j * nx_ + i; }
  int mirror(int k, int n) const {
    if (k < 0) return -k - 1;
    if (k >= n) return 2 * n - k - 1;
    return k;
  }
  double smooth_at(int i, int j) const {
    static constexpr double w[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    double s = 0.0;
    for (int b = -2; b <= 2; ++b) {
      const int jj = mirror(j + b, ny_);
      for (int a = -2; a <= 2; ++a) s += w[a + 2] * w[b + 2] * mem_[idx(mirror(i + a, nx_), jj)];
    }
    return s;
  }
  double local_tv(int i0, int j0) const {
    const double hx = g_.hx(), hy = g_.hy();
    auto val = [&](int i, int j) {
      return phi_[idx(std::clamp(i, 0, nx_ - 1), std::clamp(j, 0, ny_ - 1))];
    };
    double total = 0.0;
    for (int j = std::max(0, j0 - 2); j <= std::min(ny_, j0 + 3); ++j) {
      const double wy = (j == 0 || j == ny_) ? 0.5 : 1.0;
      for (int i = std::max(0, i0 - 2); i <= std::min(nx_, i0 + 3); ++i) {
        const double wx = (i == 0 || i == nx_) ? 0.5 : 1.0;
        const double a = val(i - 1, j - 1), b = val(i, j - 1), c = val(i - 1, j), d = val(i, j);
        const double gx = ((b + d) - (a + c)) / (2.0 * hx);
        const double gy = ((c + d) - (a + b)) / (2.0 * hy);
        total += wx * wy * std::hypot(gx, gy);
      }
    }
    return total * hx * hy;
  }
  void refresh_boundary(int i, int j) {
    const int k = idx(i, j);
    const bool in = mem_[k] != 0;
    bool touches = false;
    auto check = [&](int a, int b) {
      if (a < 0 || b < 0 || a >= nx_ || b >= ny_) return;
      if ((mem_[idx(a, b)] != 0) != in) touches = true;
    };
    check(i - 1, j);
    check(i + 1, j);
    check(i, j - 1);
    check(i, j + 1);
    if (in) {
      bnon_.erase(k);
      if (touches) bmem_.insert(k); else bmem_.erase(k);
    } else {
      bmem_.erase(k);
      if (touches) bnon_.insert(k); else bnon_.erase(k);
    }
  }

  const DomainGrid& g_;
  int nx_, ny_;
  PerimeterEstimator est_;
  std::vector<std::uint8_t> mem_;
  std::vector<double> phi_;
  double per_ = 0.0;
  IndexedSet bmem_, bnon_;
};

}  // namespace

AnnealResult anneal_perimeter(const IndicatorSet& init, const AnnealConfig& cfg,
                              const std::optional<IndicatorSet>& e0, double delta) {
  const DomainGrid& g = init.grid();
  if (g.dim() != 2) throw InvalidArgument("annealing needs a two-dimensional grid");
  if (cfg.restarts < 1 || cfg.stages < 1 || cfg.proposals_per_stage < 1) {
    throw InvalidArgument("annealing schedule must have positive restarts, stages and proposals");
  }
  if (!(cfg.cooling > 0.0 && cfg.cooling < 1.0)) throw InvalidArgument("cooling must lie in (0,1)");
  if (e0 && !(e0->grid() == g)) throw GridMismatch("E0 not on the annealing grid");
  const double cv = g.cell_volume();
  const long delta_cells = e0 ? static_cast<long>(std::floor(delta / cv + 1e-9)) : 0;

  AnnealResult res{init, perimeter(init, cfg.estimator), 0, 0};
  // The mollified estimator cannot see sub-mollifier features (a checkerboard
  // blurs to a constant), so under it the objective is floored at l1/sqrt(2),
  // a lower bound for the length of any resolved curve's staircase.
  const bool smoothed = cfg.estimator == PerimeterEstimator::smoothed;
  const int nx = g.nx(), ny = g.ny();
  const double floor_scale = 1.0 / std::sqrt(2.0);
  auto l1_flip_delta = [&](const std::vector<std::uint8_t>& m, int k) {
    const int i = k % nx, j = k / nx;
    double d = 0.0;
    auto edge = [&](int n, double w) { d += m[n] == m[k] ? w : -w; };
    if (i > 0) edge(k - 1, g.hy());
    if (i + 1 < nx) edge(k + 1, g.hy());
    if (j > 0) edge(k - nx, g.hx());
    if (j + 1 < ny) edge(k + nx, g.hx());
    return d;
  };
  auto objective = [&](const IndicatorSet& E) {
    const double p = perimeter(E, cfg.estimator);
    return smoothed ? std::max(p, floor_scale * E.perimeter()) : p;
  };
  res.perimeter = objective(init);
  std::mt19937_64 rng(cfg.seed);
  for (int rs = 0; rs < cfg.restarts; ++rs) {
    AnnealState st(g, init.members(), cfg.estimator);
    long outside = 0, missing = 0;  // |E \ E0|, |E0 \ E| in cells
    if (e0) {
      for (std::size_t k = 0; k < g.size(); ++k) {
        outside += init.contains(k) && !e0->contains(k);
        missing += e0->contains(k) && !init.contains(k);
      }
    }
    double l1 = init.perimeter();
    auto J = [&](double p, double l) { return smoothed ? std::max(p, floor_scale * l) : p; };
    double best_here = J(st.perimeter(), l1);
    std::vector<std::uint8_t> best_set = st.members();
    double T = cfg.t0_in_h * g.max_spacing();
    for (int stage = 0; stage < cfg.stages; ++stage) {
      for (int p = 0; p < cfg.proposals_per_stage; ++p) {
        const auto& bm = st.boundary_members();
        const auto& bn = st.boundary_nonmembers();
        if (bm.empty() || bn.empty()) break;
        const int a = bm[pick(rng, bm.size())];
        const int b = bn[pick(rng, bn.size())];
        ++res.proposals;
        long out2 = outside, miss2 = missing;
        if (e0) {
          if (e0->contains(a)) ++miss2; else --out2;
          if (e0->contains(b)) --miss2; else ++out2;
          const long now = std::min(outside, missing), next = std::min(out2, miss2);
          if (next > delta_cells && next > now) continue;
        }
        const double before = J(st.perimeter(), l1);
        double l1_next = l1;
        if (smoothed) l1_next += l1_flip_delta(st.members(), a);
        st.flip(a);
        if (smoothed) l1_next += l1_flip_delta(st.members(), b);
        st.flip(b);
        const double d = J(st.perimeter(), l1_next) - before;
        const bool accept = d <= 0.0 || uniform01(rng) < std::exp(-d / T);
        if (!accept) {
          st.flip(b);
          st.flip(a);
          continue;
        }
        ++res.accepted;
        l1 = l1_next;
        outside = out2;
        missing = miss2;
      }
      const bool admissible = !e0 || std::min(outside, missing) <= delta_cells;
      if (admissible && J(st.perimeter(), l1) < best_here - 1e-12) {
        best_here = J(st.perimeter(), l1);
        best_set = st.members();
      }
      T *= cfg.cooling;
    }
    IndicatorSet cand(g, best_set);
    const double exact = objective(cand);
    if (exact < res.perimeter - 1e-12) {
      res.perimeter = exact;
      res.best = std::move(cand);
    }
  }
  return res;
}

IsoProfile anneal_profile(const DomainGrid& grid, const std::vector<double>& r_samples,
                          const AnnealConfig& cfg,
                          const std::function<double(double, double)>& init_level,
                          const std::optional<IndicatorSet>& e0, double delta) {
  const std::size_t n = grid.size();
  std::vector<std::size_t> order(n);
  std::vector<double> level(n);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) level[grid.index(i, j)] = init_level(grid.x(i), grid.y(j));
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return level[a] < level[b]; });
  IsoProfile p;
  p.domain = std::abs(grid.lx() - 1.0) < 1e-12 ? "unit_square" : "rectangle";
  p.method = "annealed";
  if (e0) p.delta = delta;
  const double cv = grid.cell_volume();
  long last = -1;
  for (double r : r_samples) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("volume fraction must lie in (0,1)");
    const long c = std::lround(r / cv);
    if (c <= 0 || c >= static_cast<long>(n) || c == last) continue;
    last = c;
    std::vector<std::uint8_t> m(n, 0);
    for (long t = 0; t < c; ++t) m[order[t]] = 1;
    AnnealConfig local = cfg;
    local.seed = cfg.seed + static_cast<std::uint64_t>(c);
    const AnnealResult a = anneal_perimeter(IndicatorSet(grid, std::move(m)), local, e0, delta);
    if (e0 && alpha(a.best, *e0) > delta + 1e-12) continue;  // init itself inadmissible
    p.samples.push_back(ProfileSample{static_cast<double>(c) * cv, a.perimeter, "annealed",
                                      std::numeric_limits<double>::quiet_NaN()});
  }
  p.validate();
  return p;
}

}  // namespace slowmo
