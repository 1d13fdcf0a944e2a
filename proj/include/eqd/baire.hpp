#pragma once
// Greedy construction over sparse nets: net ladders, the horizon-j
// extendability oracle, the chi-minimal greedy step and hole diagnostics.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqd/coset_window.hpp"
#include "eqd/matching.hpp"
#include "json.hpp"

namespace eqd {

struct SparseNetLadder {
  std::vector<int64_t> radii;     // r_1 <= ... <= r_I
  std::vector<int64_t> horizons;  // oracle horizon per level
  std::vector<TorusPoint> centers;
  std::vector<Rect> regions;      // window shrunk by horizon + M
  std::vector<CellSet> a_nets, b_nets;  // index i-1 holds level i
  std::vector<double> condition;  // partial sums of (M / r_j)^((d-1)/d)
  double condition_bound = 0;     // 4^(1-d)
  bool sparse_ok = true;

  int levels() const { return static_cast<int>(radii.size()); }
  // Odd levels carry B-nets, even levels A-nets.
  static bool a_level(int level) { return level % 2 == 0; }
};

// Deterministic torus centres from the "nets" sub-stream; each net is the
// largest initial run of cells (ordered by coset distance to the centre)
// that stays (r_i + 4M)-sparse.
SparseNetLadder build_nets(const CosetWindow& win, const std::vector<int64_t>& radii,
                           const std::vector<int64_t>& horizons, uint64_t seed);

// True iff m + (x, y) extends to a matching covering every A- and B-cell
// within distance j of x. x is taken as an A-vertex iff x_is_a; y is a
// vertex of the other part.
bool extendable_oracle(const TranslationGraph& g, const Matching& m, const IVec& x, const IVec& y, int64_t j,
                       bool x_is_a);

// Same question for many candidates y around one x: covering matchings are
// computed once and each candidate is tested by local repairs.
class ExtendabilityContext {
 public:
  ExtendabilityContext(const TranslationGraph& g, const Matching& m, const IVec& x, int64_t j, bool x_is_a);
  bool test(const IVec& y);
  int64_t repairs() const { return repairs_; }

 private:
  struct Side {
    detail::LocalBipartite lb;
    std::vector<int32_t> mate_l, mate_r;
    std::vector<int32_t> left_id, right_id;  // ball-local index -> local id
  };
  bool repair(Side& s, int32_t drop_left, int32_t drop_right);

  const TranslationGraph& g_;
  const Matching& m_;
  IVec x_;
  int64_t j_;
  Rect ball_, inner_;
  bool x_is_a_ = true;
  Side sa_, sb_;  // sa_: free A in inner vs free B in ball; sb_: the reverse
  std::vector<uint32_t> stamp_;
  uint32_t gen_ = 0;
  int64_t repairs_ = 0;
};

struct BaireConfig {
  std::vector<int64_t> radii{32, 96, 288};
  int64_t horizon_factor = 2;  // j_i = horizon_factor * r_i ...
  int64_t horizon = 0;         // ... unless a fixed horizon is given
  bool check_invariants = true;
  bool posthoc_oracle = true;  // re-run the direct oracle on every added edge
};

struct Hole {
  std::vector<IVec> cells;
  int64_t perimeter = 0;  // faces shared with X1
  bool rich = false;
  bool infinite = false;
};

struct HoleReport {
  IVec reference;  // per-axis minima of X
  int64_t grid = 0;  // M / 2
  CellSet x1, x2;
  Rect region;     // analysis box: bbox(X1) grown by 2M + 1
  std::vector<Hole> holes;
  int64_t perimeter_x1 = 0;
  double rich_threshold = 0;
  bool boundary_partition_ok = false;  // sum of hole perimeters equals p(X1)
};

// X must be non-empty and 2M-connected; M must be even.
HoleReport hole_analysis(const CellSet& x, int m_cap, int64_t r_i);

struct FillResult {
  CellSet x_new;
  bool same_reference = false;
  bool hull_is_union = false;   // X1' = X1 u H
  bool hole_removed = false;    // holes of X' = holes of X minus H
  bool connected = false;
};

// X' = X u (A n dist_{<=M}(H)) for a finite non-rich hole H = rep.holes[hole].
FillResult fill_hole(const CellSet& x, const HoleReport& rep, size_t hole, const CellSet& a_cells, int m_cap,
                     int64_t r_i);

struct NetEdge {
  IVec a, b;
};

struct PrivateSetReport {
  std::vector<int64_t> sizes;                 // |P_j(e)| per edge
  std::vector<std::vector<int64_t>> annuli;   // per edge, count per shell of width 2M
  bool disjoint = true;
};

PrivateSetReport private_set_audit(const std::vector<BoundaryPair>& x1_boundary, const std::vector<NetEdge>& edges,
                                   int64_t r_j, int m_cap);

struct BaireLevelReport {
  int level = 0;
  int64_t radius = 0, horizon = 0;
  bool a_side = false;
  int64_t net_cells = 0, already_matched = 0, added = 0, failures = 0;
  int64_t oracle_repairs = 0, posthoc_checked = 0;
  bool added_sparse = true;
  bool nets_covered = false;
  bool hall_ok = false;
  int64_t hall_required = 0;
  double condition_sum = 0;
  bool condition_holds = false;
};

struct BaireResult {
  Matching matching;
  SparseNetLadder nets;
  std::vector<BaireLevelReport> reports;
  std::vector<std::vector<NetEdge>> added;  // per level
  std::vector<HoleReport> failure_holes;
  std::vector<std::string> warnings;
  Rect core;
  bool aborted = false;
};

BaireResult run_baire(const CosetWindow& win, const BaireConfig& cfg);

nlohmann::json baire_report_json(const BaireLevelReport& r);
nlohmann::json hole_report_json(const HoleReport& r);

}  // namespace eqd
