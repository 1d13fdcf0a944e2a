#pragma once
// Finite windows of coset fibers, sparse colorings, greedy sparse nets,
// local rules and the equivariance harness.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eqd/lattice.hpp"
#include "eqd/torus.hpp"

namespace eqd {

inline constexpr int64_t kDefaultVolumeCap = int64_t(1) << 26;

struct CosetWindow {
  TorusPoint base;
  FreeVectorSystem sys;
  Rect window;
  CellSet a_bits;
  CellSet b_bits;
  int64_t buffer = 0;  // taint margin
};

CosetWindow extract_window(const Shape& shape_a, const Shape& shape_b, const FreeVectorSystem& sys,
                           const TorusPoint& u, const Rect& window, int64_t volume_cap = kDefaultVolumeCap);

struct SparseColoring {
  int k = 0;
  int64_t n_grid = 1;
  int64_t t = 1;  // n_grid^k
  int64_t radius = 0;
  double min_distance = 0;  // smallest L-inf torus norm of a nonzero translate with |n| <= radius

  int64_t color(const double* p) const {
    int64_t idx = 0;
    for (int c = 0; c < k; ++c) {
      auto b = static_cast<int64_t>(p[c] * static_cast<double>(n_grid));
      if (b >= n_grid) b = n_grid - 1;
      idx = idx * n_grid + b;
    }
    return idx;
  }
};

SparseColoring build_sparse_coloring(const FreeVectorSystem& sys, int64_t r);
// Color of every window cell, indexed by the window's linear index.
std::vector<int64_t> window_colors(const CosetWindow& win, const SparseColoring& col);

// Maximal r-sparse set built color by color (row-major within a color) over
// the window grown by extension, then restricted to the window.
CellSet greedy_sparse_net(const CosetWindow& win, const SparseColoring& coloring, int64_t r, int64_t extension = 0);

// Pairwise L-inf distances all exceed r.
bool is_sparse(const std::vector<IVec>& cells, int64_t r);

struct IntGrid {
  Rect rect;
  std::vector<int64_t> v;
  IntGrid() = default;
  explicit IntGrid(const Rect& r, int64_t fill = 0) : rect(r), v(static_cast<size_t>(r.volume()), fill) {}
  int64_t at(const IVec& p) const { return v[rect.index(p)]; }
};

class Patch {
 public:
  Patch(const IntGrid& g, const IVec& center, int64_t r) : g_(g), center_(center), r_(r) {}
  const IVec& center() const { return center_; }
  int64_t radius() const { return r_; }
  // Value at center + offset; 0 outside the grid.
  int64_t at(const IVec& offset) const;

 private:
  const IntGrid& g_;
  IVec center_;
  int64_t r_;
};

struct LocalRuleResult {
  IntGrid out;
  CellSet tainted;  // cells within r of the window edge
};
LocalRuleResult apply_local_rule(const IntGrid& grid, const std::function<int64_t(const Patch&)>& rule, int64_t r);

// Output of a pipeline run used by the equivariance harness: an integer label
// per window cell (e.g. a piece index, -1 for none) and the untainted core.
struct LabelledRun {
  IntGrid labels;
  Rect core;
};
using PipelineRunner = std::function<LabelledRun(const TorusPoint& base, const Rect& window)>;

struct EquivarianceResult {
  bool equal = false;
  int64_t compared = 0;
  int64_t mismatches = 0;
  std::optional<IVec> first_mismatch;
};
// Runs the pipeline from u and from u + shift and compares the labels on
// cells n with n in both untainted cores after translating by -shift.
EquivarianceResult equivariance_check(const PipelineRunner& run, const FreeVectorSystem& sys, const TorusPoint& u,
                                      const IVec& shift, const Rect& window);

}  // namespace eqd
