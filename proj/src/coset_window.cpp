#include "eqd/coset_window.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eqd/parallel.hpp"

namespace eqd {

CosetWindow extract_window(const Shape& shape_a, const Shape& shape_b, const FreeVectorSystem& sys,
                           const TorusPoint& u, const Rect& window, int64_t volume_cap) {
  sys.validate();
  if (window.dim() != sys.d) throw ArgumentError("window dimension must equal d");
  if (shape_a.k() != sys.k || shape_b.k() != sys.k || u.k() != sys.k)
    throw ArgumentError("shape and base point dimensions must equal k");
  if (window.volume() > volume_cap)
    throw ResourceError("window volume " + std::to_string(window.volume()) + " exceeds cap " +
                        std::to_string(volume_cap));
  CosetWindow w{u, sys, window, CellSet(window), CellSet(window), 0};
  auto& a = w.a_bits.data();
  auto& b = w.b_bits.data();
  parallel_chunks(window.volume(), [&](int64_t lo, int64_t hi, int) {
    std::vector<double> p(sys.k);
    for (int64_t i = lo; i < hi; ++i) {
      coset_point_into(u, window.point(i), sys, p.data());
      a[i] = shape_a.contains(p.data());
      b[i] = shape_b.contains(p.data());
    }
  });
  return w;
}

SparseColoring build_sparse_coloring(const FreeVectorSystem& sys, int64_t r) {
  if (r < 1) throw ArgumentError("coloring radius must be >= 1");
  sys.validate();
  SparseColoring col;
  col.k = sys.k;
  col.radius = r;
  double best = 1.0;
  Rect box(IVec::filled(sys.d, -r), IVec::filled(sys.d, 2 * r + 1));
  std::vector<double> acc(sys.k);
  // n and -n have the same norm; scan the lexicographically positive half.
  for_each_point(box, [&](const IVec& n) {
    int sign = 0;
    for (int j = 0; j < sys.d && sign == 0; ++j) sign = n.c[j] > 0 ? 1 : (n.c[j] < 0 ? -1 : 0);
    if (sign <= 0) return;
    for (int c = 0; c < sys.k; ++c) {
      double s = 0;
      for (int j = 0; j < sys.d; ++j) s += static_cast<double>(n.c[j]) * sys.vectors[j].x[c];
      acc[c] = s;
    }
    best = std::min(best, torus_norm_linf(acc.data(), sys.k));
  });
  col.min_distance = best;
  if (best < std::ldexp(1.0, -40))
    throw PrecisionError("free vectors nearly dependent at radius " + std::to_string(r) +
                         ": minimum translate norm " + std::to_string(best));
  col.n_grid = static_cast<int64_t>(std::floor(1.0 / best)) + 1;
  double t = std::pow(static_cast<double>(col.n_grid), sys.k);
  if (t > 4e18) throw PrecisionError("color count overflows 64 bits");
  col.t = 1;
  for (int c = 0; c < sys.k; ++c) col.t *= col.n_grid;
  return col;
}

std::vector<int64_t> window_colors(const CosetWindow& win, const SparseColoring& col) {
  std::vector<int64_t> out(static_cast<size_t>(win.window.volume()));
  parallel_chunks(win.window.volume(), [&](int64_t lo, int64_t hi, int) {
    std::vector<double> p(win.sys.k);
    for (int64_t i = lo; i < hi; ++i) {
      coset_point_into(win.base, win.window.point(i), win.sys, p.data());
      out[i] = col.color(p.data());
    }
  });
  return out;
}

namespace {
// Bucket grid of side r+1 for radius-r proximity queries.
class ProximityGrid {
 public:
  ProximityGrid(const Rect& window, int64_t r) : window_(window), r_(r), cell_(r + 1) {
    IVec nb(window.dim());
    for (int j = 0; j < window.dim(); ++j) nb.c[j] = (window.sides.c[j] + cell_ - 1) / cell_;
    buckets_rect_ = Rect(IVec(window.dim()), nb);
    buckets_.resize(static_cast<size_t>(buckets_rect_.volume()));
  }
  IVec bucket_of(const IVec& p) const {
    IVec b(p.dim);
    for (int j = 0; j < p.dim; ++j) b.c[j] = (p.c[j] - window_.low.c[j]) / cell_;
    return b;
  }
  bool any_within(const IVec& p) const {
    IVec b = bucket_of(p);
    Rect around(b - IVec::filled(p.dim, 1), IVec::filled(p.dim, 3));
    bool hit = false;
    for_each_point(around, [&](const IVec& q) {
      if (hit || !buckets_rect_.contains(q)) return;
      for (const auto& s : buckets_[buckets_rect_.index(q)])
        if (linf_dist(s, p) <= r_) {
          hit = true;
          return;
        }
    });
    return hit;
  }
  void add(const IVec& p) { buckets_[buckets_rect_.index(bucket_of(p))].push_back(p); }

 private:
  Rect window_;
  int64_t r_, cell_;
  Rect buckets_rect_;
  std::vector<std::vector<IVec>> buckets_;
};
}  // namespace

CellSet greedy_sparse_net(const CosetWindow& win, const SparseColoring& coloring, int64_t r, int64_t extension) {
  if (coloring.radius < r) throw ArgumentError("coloring built for a smaller sparsity radius");
  if (extension < 0) throw ArgumentError("net extension must be >= 0");
  const Rect& w = win.window;
  // The net only needs coset points, so it can be grown past the window to
  // keep truncation effects away from it.
  const Rect region = w.grown(extension);
  std::vector<int64_t> colors(static_cast<size_t>(region.volume()));
  parallel_chunks(region.volume(), [&](int64_t lo, int64_t hi, int) {
    std::vector<double> p(win.sys.k);
    for (int64_t i = lo; i < hi; ++i) {
      coset_point_into(win.base, region.point(i), win.sys, p.data());
      colors[i] = coloring.color(p.data());
    }
  });
  std::vector<int64_t> order(colors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
    return colors[a] != colors[b] ? colors[a] < colors[b] : a < b;
  });
  CellSet s(w);
  // Radii beyond the region degenerate to the first cell.
  const int64_t eff = std::min<int64_t>(r, region.max_side());
  ProximityGrid grid(region, eff);
  for (int64_t idx : order) {
    IVec p = region.point(idx);
    if (grid.any_within(p)) continue;
    grid.add(p);
    if (w.contains(p)) s.set(p);
  }
  return s;
}

bool is_sparse(const std::vector<IVec>& cells, int64_t r) {
  for (size_t i = 0; i < cells.size(); ++i)
    for (size_t j = i + 1; j < cells.size(); ++j)
      if (linf_dist(cells[i], cells[j]) <= r) return false;
  return true;
}

int64_t Patch::at(const IVec& offset) const {
  if (linf_norm(offset) > r_) throw ArgumentError("patch offset beyond rule radius");
  IVec p = center_ + offset;
  return g_.rect.contains(p) ? g_.v[g_.rect.index(p)] : 0;
}

LocalRuleResult apply_local_rule(const IntGrid& grid, const std::function<int64_t(const Patch&)>& rule, int64_t r) {
  if (r < 0) throw ArgumentError("rule radius must be >= 0");
  LocalRuleResult res{IntGrid(grid.rect), CellSet(grid.rect)};
  const Rect& w = grid.rect;
  parallel_chunks(w.volume(), [&](int64_t lo, int64_t hi, int) {
    for (int64_t i = lo; i < hi; ++i) {
      IVec p = w.point(i);
      Patch patch(grid, p, r);
      res.out.v[i] = rule(patch);
      bool taint = false;
      for (int j = 0; j < w.dim(); ++j)
        if (p.c[j] - w.low.c[j] < r || w.low.c[j] + w.sides.c[j] - 1 - p.c[j] < r) taint = true;
      res.tainted.data()[i] = taint;
    }
  });
  return res;
}

EquivarianceResult equivariance_check(const PipelineRunner& run, const FreeVectorSystem& sys, const TorusPoint& u,
                                      const IVec& shift, const Rect& window) {
  if (shift.dim != sys.d) throw ArgumentError("shift dimension must equal d");
  LabelledRun r1 = run(u, window);
  LabelledRun r2 = run(coset_point(u, shift, sys), window);
  // Cell n of run 1 corresponds to cell n - shift of run 2.
  Rect core2 = r2.core.translated(shift);
  if (!r1.core.intersects(core2)) throw ArgumentError("shifted cores do not overlap");
  Rect common = r1.core.intersect(core2);
  EquivarianceResult res;
  for_each_point(common, [&](const IVec& n) {
    ++res.compared;
    if (r1.labels.at(n) != r2.labels.at(n - shift)) {
      if (!res.first_mismatch) res.first_mismatch = n;
      ++res.mismatches;
    }
  });
  res.equal = res.mismatches == 0;
  return res;
}

}  // namespace eqd
