#include "eqd/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eqd {

CellSet CellSet::from_cells(const std::vector<IVec>& cells, int d) {
  if (cells.empty()) {
    if (d < 1) throw ArgumentError("from_cells: dimension needed for empty input");
    return CellSet(Rect(IVec(d), IVec::filled(d, 1)));
  }
  IVec lo = cells[0], hi = cells[0];
  for (const auto& c : cells)
    for (int i = 0; i < c.dim; ++i) {
      lo.c[i] = std::min(lo.c[i], c.c[i]);
      hi.c[i] = std::max(hi.c[i], c.c[i]);
    }
  IVec s = hi - lo;
  for (int i = 0; i < s.dim; ++i) s.c[i] += 1;
  CellSet out(Rect(lo, s));
  for (const auto& c : cells) out.set(c);
  return out;
}

int64_t CellSet::count() const {
  int64_t n = 0;
  for (auto b : bits_) n += b != 0;
  return n;
}

std::vector<IVec> CellSet::cells() const {
  std::vector<IVec> out;
  for (int64_t i = 0; i < static_cast<int64_t>(bits_.size()); ++i)
    if (bits_[i]) out.push_back(rect_.point(i));
  return out;
}

CellSet CellSet::restricted(const Rect& r) const {
  CellSet out(r);
  if (!rect_.intersects(r)) return out;
  for_each_point(rect_.intersect(r), [&](const IVec& p) {
    if (bits_[rect_.index(p)]) out.bits_[r.index(p)] = 1;
  });
  return out;
}

Rect CellSet::bounding_box() const {
  auto cs = cells();
  if (cs.empty()) throw ArgumentError("bounding box of empty set");
  return CellSet::from_cells(cs).rect();
}

bool same_cells(const CellSet& a, const CellSet& b) {
  for (int64_t i = 0; i < a.rect().volume(); ++i)
    if (a.at(i) && !b.contains(a.rect().point(i))) return false;
  for (int64_t i = 0; i < b.rect().volume(); ++i)
    if (b.at(i) && !a.contains(b.rect().point(i))) return false;
  return true;
}

CellSet set_union(const CellSet& a, const CellSet& b) {
  const int d = a.dim();
  IVec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo.c[i] = std::min(a.rect().low.c[i], b.rect().low.c[i]);
    hi.c[i] = std::max(a.rect().high().c[i], b.rect().high().c[i]);
  }
  CellSet out(Rect(lo, hi - lo));
  for (const auto* s : {&a, &b})
    for (int64_t i = 0; i < s->rect().volume(); ++i)
      if (s->at(i)) out.set(s->rect().point(i));
  return out;
}

std::vector<BoundaryPair> boundary(const CellSet& x) {
  std::vector<BoundaryPair> out;
  const Rect& r = x.rect();
  for (int64_t i = 0; i < r.volume(); ++i) {
    if (!x.at(i)) continue;
    IVec p = r.point(i);
    for (int j = 0; j < r.dim(); ++j)
      for (int s : {-1, 1}) {
        IVec q = p;
        q.c[j] += s;
        if (!x.contains(q)) out.push_back({p, q});
      }
  }
  return out;
}

int64_t perimeter(const CellSet& x) {
  const Rect& r = x.rect();
  const auto st = r.strides();
  int64_t n = 0;
  for (int64_t i = 0; i < r.volume(); ++i) {
    if (!x.at(i)) continue;
    int64_t rem = i;
    for (int j = 0; j < r.dim(); ++j) {
      int64_t coord = (rem / st[j]) % r.sides.c[j];
      if (coord == 0 || !x.at(i - st[j])) ++n;
      if (coord == r.sides.c[j] - 1 || !x.at(i + st[j])) ++n;
    }
  }
  return n;
}

int64_t internal_boundary(const CellSet& x, const Rect& r) {
  int64_t n = 0;
  for (const auto& c : x.cells())
    if (!r.contains(c)) throw ArgumentError("internal_boundary: X must lie inside R");
  for (const auto& bp : boundary(x))
    if (r.contains(bp.outside)) ++n;
  return n;
}

IsoperimetryResult isoperimetry_check(const CellSet& x) {
  int64_t n = x.count();
  if (n == 0) throw ArgumentError("isoperimetry_check: X must be non-empty");
  const int d = x.dim();
  IsoperimetryResult r;
  r.perimeter = perimeter(x);
  r.bound = 2.0 * d * std::pow(static_cast<double>(n), double(d - 1) / d);
  // Tolerate rounding in the fractional power (e.g. 4^(1/2) computed as 1.9999..).
  r.ok = static_cast<double>(r.perimeter) >= r.bound * (1 - 1e-12);
  return r;
}

namespace {
struct UnionFind {
  std::vector<int32_t> p;
  explicit UnionFind(size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int32_t find(int32_t a) {
    while (p[a] != a) a = p[a] = p[p[a]];
    return a;
  }
  void unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    p[a] = b;  // root is the smallest index
  }
};
}  // namespace

Components ell_components(const CellSet& x, int64_t ell) {
  if (ell < 1) throw ArgumentError("ell_components: ell must be >= 1");
  const Rect& r = x.rect();
  const int64_t vol = r.volume();
  Components out;
  out.label.assign(static_cast<size_t>(vol), -1);
  std::vector<int32_t> id(static_cast<size_t>(vol), -1);
  std::vector<int64_t> members;
  for (int64_t i = 0; i < vol; ++i)
    if (x.at(i)) {
      id[i] = static_cast<int32_t>(members.size());
      members.push_back(i);
    }
  UnionFind uf(members.size());
  // Forward half of the ell-box in row-major order.
  std::vector<IVec> fwd;
  for (const auto& o : offsets_in_ball(r.dim(), ell))
    if (IVec(r.dim()) < o) fwd.push_back(o);
  for (size_t m = 0; m < members.size(); ++m) {
    IVec p = r.point(members[m]);
    for (const auto& o : fwd) {
      IVec q = p + o;
      if (r.contains(q)) {
        int32_t t = id[r.index(q)];
        if (t >= 0) uf.unite(static_cast<int32_t>(m), t);
      }
    }
  }
  std::vector<int32_t> cls(members.size(), -1);
  for (size_t m = 0; m < members.size(); ++m) {
    int32_t root = uf.find(static_cast<int32_t>(m));
    if (cls[root] < 0) {
      cls[root] = static_cast<int32_t>(out.classes.size());
      out.classes.emplace_back();
      out.representatives.push_back(r.point(members[root]));
    }
    int32_t c = cls[root];
    out.classes[c].push_back(r.point(members[m]));
    out.label[members[m]] = c;
  }
  return out;
}

CellSet dist_ball(const CellSet& x, int64_t m) {
  if (m < 0) throw ArgumentError("dist_ball: m must be >= 0");
  if (m == 0) return x;
  Rect g = x.rect().grown(m);
  CellSet cur = x.restricted(g);
  const auto st = g.strides();
  const int d = g.dim();
  std::vector<uint8_t> next(cur.data().size());
  // Separable L-inf dilation: one sliding-window max per axis.
  for (int a = 0; a < d; ++a) {
    const int64_t n = g.sides.c[a];
    const int64_t lines = g.volume() / n;
    auto& src = cur.data();
    for (int64_t l = 0; l < lines; ++l) {
      // Base index of line l: enumerate all coordinates except axis a.
      int64_t rem = l, base = 0;
      for (int j = d - 1; j >= 0; --j) {
        if (j == a) continue;
        base += (rem % g.sides.c[j]) * st[j];
        rem /= g.sides.c[j];
      }
      int64_t cnt = 0;
      for (int64_t t = 0; t < std::min(n, m); ++t) cnt += src[base + t * st[a]];
      for (int64_t t = 0; t < n; ++t) {
        if (t + m < n) cnt += src[base + (t + m) * st[a]];
        if (t - m - 1 >= 0) cnt -= src[base + (t - m - 1) * st[a]];
        next[base + t * st[a]] = cnt > 0;
      }
    }
    src.swap(next);
  }
  return cur;
}

RectTree build_rect_tree(const Rect& root, const IVec& origin, int64_t n_prev) {
  const int d = root.dim();
  const int64_t n = root.sides.c[0];
  for (int j = 0; j < d; ++j)
    if (root.sides.c[j] != n) throw ArgumentError("rect tree root must be a cube");
  if (!is_power_of_two(n) || !is_power_of_two(n_prev) || n_prev >= n)
    throw ArgumentError("rect tree sizes must be powers of two with n_prev < N");
  if (origin.dim != d) throw ArgumentError("grid origin dimension mismatch");
  RectTree t;
  t.root = root;
  t.n_prev = n_prev;
  t.h = ilog2(n / n_prev);
  const int64_t blocks = int64_t(1) << t.h;
  t.intervals.resize(d);
  for (int j = 0; j < d; ++j) {
    int64_t off = ((origin.c[j] - root.low.c[j]) % n_prev + n_prev) % n_prev;
    auto& iv = t.intervals[j];
    if (off == 0) {
      iv.assign(blocks, n_prev);
      continue;
    }
    // 2^h + 1 intervals: off, n_prev x (2^h - 1), n_prev - off. Merge the end
    // interval of length <= n_prev/2 into its neighbour; ties merge the trailing one.
    iv.assign(blocks, n_prev);
    const int64_t lead = off, trail = n_prev - off;
    if (trail > lead) {
      iv.front() = lead + n_prev;
      iv.back() = trail;
    } else {
      iv.front() = lead;
      iv.back() = n_prev + trail;
    }
  }
  // Prefix sums of interval starts per axis.
  std::vector<std::vector<int64_t>> start(d);
  for (int j = 0; j < d; ++j) {
    start[j].assign(blocks + 1, root.low.c[j]);
    for (int64_t s = 0; s < blocks; ++s) start[j][s + 1] = start[j][s] + t.intervals[j][s];
  }
  t.levels.resize(t.h + 1);
  for (int l = 0; l <= t.h; ++l) {
    const int64_t per = int64_t(1) << l, span = blocks / per;
    const int64_t nominal = n / per;
    Rect idx_box(IVec(d), IVec::filled(d, per));
    for_each_point(idx_box, [&](const IVec& ix) {
      RectNode node;
      node.level = l;
      node.index = ix;
      IVec lo(d), s(d);
      int differing = 0;
      for (int j = 0; j < d; ++j) {
        lo.c[j] = start[j][ix.c[j] * span];
        s.c[j] = start[j][(ix.c[j] + 1) * span] - lo.c[j];
        differing += s.c[j] != nominal;
      }
      node.rect = Rect(lo, s);
      node.special = differing >= 2;
      t.levels[l].push_back(node);
    });
  }
  return t;
}

}  // namespace eqd
