#pragma once
// Finite subsets of Z^d stored as dense grids, boundary and perimeter
// functionals, l-components, balls and the basic-rectangle tree.

#include <cstdint>
#include <vector>

#include "eqd/core.hpp"

namespace eqd {

class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(const Rect& r) : rect_(r), bits_(static_cast<size_t>(r.volume()), 0) {}
  // Smallest bounding rect of the given cells (d must be given for empty input).
  static CellSet from_cells(const std::vector<IVec>& cells, int d = 0);

  const Rect& rect() const { return rect_; }
  int dim() const { return rect_.dim(); }
  bool contains(const IVec& p) const { return rect_.contains(p) && bits_[rect_.index(p)]; }
  bool at(int64_t idx) const { return bits_[idx] != 0; }
  void set(const IVec& p, bool v = true) {
    if (!rect_.contains(p)) throw ArgumentError("cell outside CellSet rect: " + to_string(p));
    bits_[rect_.index(p)] = v;
  }
  void set_index(int64_t idx, bool v = true) { bits_[idx] = v; }
  int64_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<IVec> cells() const;  // row-major
  std::vector<uint8_t>& data() { return bits_; }
  const std::vector<uint8_t>& data() const { return bits_; }
  // Same membership re-expressed over another rect (cells outside r dropped).
  CellSet restricted(const Rect& r) const;
  // Smallest rect containing all members; undefined for empty sets.
  Rect bounding_box() const;

 private:
  Rect rect_;
  std::vector<uint8_t> bits_;
};

// Set equality irrespective of bounding rects.
bool same_cells(const CellSet& a, const CellSet& b);
CellSet set_union(const CellSet& a, const CellSet& b);

struct BoundaryPair {
  IVec inside;
  IVec outside;
  friend bool operator==(const BoundaryPair& a, const BoundaryPair& b) {
    return a.inside == b.inside && a.outside == b.outside;
  }
  friend bool operator<(const BoundaryPair& a, const BoundaryPair& b) {
    if (a.inside != b.inside) return a.inside < b.inside;
    return a.outside < b.outside;
  }
};

// Pairs (m, n) with m in X, n not in X, n - m = +-e_j; complement taken in Z^d.
std::vector<BoundaryPair> boundary(const CellSet& x);
int64_t perimeter(const CellSet& x);
// Boundary pairs with both cells inside r. Requires X within r.
int64_t internal_boundary(const CellSet& x, const Rect& r);

struct IsoperimetryResult {
  int64_t perimeter = 0;
  double bound = 0;
  bool ok = false;
};
IsoperimetryResult isoperimetry_check(const CellSet& x);

struct Components {
  std::vector<std::vector<IVec>> classes;  // each row-major, ordered by representative
  std::vector<IVec> representatives;
  std::vector<int32_t> label;  // per cell of the input rect, -1 outside X
};
Components ell_components(const CellSet& x, int64_t ell);

CellSet dist_ball(const CellSet& x, int64_t m);

struct RectNode {
  int level = 0;
  IVec index;  // per-axis position among the 2^level blocks
  Rect rect;
  bool special = false;
};

struct RectTree {
  Rect root;
  int h = 0;
  int64_t n_prev = 0;
  std::vector<std::vector<int64_t>> intervals;  // per axis, lengths in spatial order after merging
  std::vector<std::vector<RectNode>> levels;    // levels[l], row-major in index
  const std::vector<RectNode>& basic() const { return levels[h]; }
};

RectTree build_rect_tree(const Rect& root, const IVec& fine_grid_origin, int64_t n_prev);

}  // namespace eqd
