#pragma once
// The bipartite translation graph on a window and matching algorithms.

#include <cstdint>
#include <optional>
#include <vector>

#include "eqd/lattice.hpp"

namespace eqd {

// Edges (a, b) with a in A, b in B and |a - b|_inf <= M. A and B share one rect.
class TranslationGraph {
 public:
  TranslationGraph(CellSet a, CellSet b, int m_cap);

  const Rect& window() const { return a_.rect(); }
  const CellSet& a() const { return a_; }
  const CellSet& b() const { return b_; }
  int m_cap() const { return m_cap_; }
  int dim() const { return window().dim(); }
  bool is_a(int64_t idx) const { return a_.at(idx); }
  bool is_b(int64_t idx) const { return b_.at(idx); }
  // Offsets of [-M, M]^d in row-major order and their window-linear deltas.
  const std::vector<IVec>& offsets() const { return offsets_; }
  const std::vector<int64_t>& deltas() const { return deltas_; }

 private:
  CellSet a_, b_;
  int m_cap_;
  std::vector<IVec> offsets_;
  std::vector<int64_t> deltas_;
};

inline constexpr int32_t kNone = -1;

// Partial injection A -> B stored as window-linear partner indices.
class Matching {
 public:
  Matching() = default;
  Matching(const Rect& window, int m_cap);

  const Rect& window() const { return window_; }
  int m_cap() const { return m_cap_; }
  int32_t partner_of_a(int64_t a) const { return a_to_b_[a]; }
  int32_t partner_of_b(int64_t b) const { return b_to_a_[b]; }
  std::optional<IVec> offset(const IVec& a) const;
  void add(int64_t a, int64_t b);
  void remove_edge_at_a(int64_t a);
  void remove_edge_at_b(int64_t b);
  int64_t size() const;
  const std::vector<int32_t>& a_to_b() const { return a_to_b_; }
  const std::vector<int32_t>& b_to_a() const { return b_to_a_; }
  // Throws InvariantError on broken injectivity, offset bound or endpoint types.
  void validate(const TranslationGraph* g = nullptr) const;

  friend bool operator==(const Matching& x, const Matching& y) {
    return x.window_ == y.window_ && x.m_cap_ == y.m_cap_ && x.a_to_b_ == y.a_to_b_;
  }

 private:
  Rect window_;
  int m_cap_ = 0;
  std::vector<int32_t> a_to_b_, b_to_a_;
};

// Reusable per-thread buffers for searches on one window.
struct SearchScratch {
  std::vector<uint32_t> stamp;
  uint32_t gen = 0;
  std::vector<int32_t> parent;
  std::vector<int32_t> layer;
  std::vector<int32_t> queue;
  void prepare(int64_t volume);
  uint32_t next_generation();
};

// Maximum matching of G[R,R] by Hopcroft-Karp with row-major vertex and
// neighbour order; depends only on the content of R relative to R.
Matching canonical_max_matching(const TranslationGraph& g, const Rect& r);
// Same, written into m after clearing every edge with an endpoint in R.
// Edges with one endpoint in R and one outside must not exist.
void rematch_region(const TranslationGraph& g, const Rect& r, Matching& m);

struct AugmentingPath {
  std::vector<int32_t> cells;  // a0, b0, a1, b1, ..., bk (window-linear)
  int64_t length() const { return static_cast<int64_t>(cells.size()) - 1; }
};

// Shortest augmenting path inside R of length <= max_len, searching from all
// unmatched A-cells of R at once (row-major sources, row-major offsets).
std::optional<AugmentingPath> bounded_augmenting_path(const TranslationGraph& g, const Rect& r, const Matching& m,
                                                      int64_t max_len, SearchScratch* scratch = nullptr);

void flip_in_place(const TranslationGraph& g, Matching& m, const AugmentingPath& path);
Matching flip(const TranslationGraph& g, const Matching& m, const AugmentingPath& path);

struct HallCertificate {
  bool a_side = true;            // the deficient set lies in A (else in B)
  std::vector<IVec> set;         // X
  std::vector<IVec> neighbours;  // Gamma(X) within R
};
// Decides whether a matching of G[R,R] covers required_a and required_b.
std::optional<HallCertificate> hall_deficiency(const TranslationGraph& g, const Rect& r, const CellSet& required_a,
                                               const CellSet& required_b);

struct ExpansionSample {
  int64_t size = 0;
  int64_t neighbourhood = 0;
  double margin = 0;
};
struct ExpansionAudit {
  double min_margin = 0;
  std::vector<ExpansionSample> samples;
};
ExpansionAudit expansion_audit(const TranslationGraph& g, const Rect& r, int64_t sample_sets, uint64_t seed);

namespace detail {
// Left/right vertex lists with CSR adjacency (row-major neighbour order).
struct LocalBipartite {
  std::vector<int32_t> left, right;  // window-linear indices
  std::vector<int64_t> start;
  std::vector<int32_t> adj;          // local right ids
};
// Left cells satisfy left_ok, right cells right_ok; both restricted to region.
LocalBipartite build_local(const Rect& window, const Rect& region, int m_cap, const std::vector<uint8_t>& left_ok,
                           const std::vector<uint8_t>& right_ok);
// Maximum matching; returns mate arrays indexed by local ids.
void hopcroft_karp(const LocalBipartite& g, std::vector<int32_t>& mate_left, std::vector<int32_t>& mate_right);
// Alternating-BFS from a free left vertex: all reached left/right vertices.
void alternating_reach(const LocalBipartite& g, const std::vector<int32_t>& mate_left,
                       const std::vector<int32_t>& mate_right, int32_t root, std::vector<int32_t>& left_out,
                       std::vector<int32_t>& right_out);
}  // namespace detail

}  // namespace eqd

namespace eqd {
// Row-major index of an offset within [-M, M]^d and its inverse.
int64_t offset_index(const IVec& o, int m_cap);
IVec offset_from_index(int64_t idx, int d, int m_cap);
}  // namespace eqd
