#pragma once
// Brute-force reference implementations used to cross-check the library.

#include <cstdint>
#include <optional>

#include "eqd/lattice.hpp"
#include "eqd/matching.hpp"

namespace eqd::checks {

// Face pairs counted one cell and one axis direction at a time.
int64_t brute_perimeter(const CellSet& x);
int64_t brute_internal_perimeter(const CellSet& x, const Rect& r);
// p >= 2d |X|^((d-1)/d) decided in integers.
bool loomis_whitney_holds(int64_t perimeter, int64_t size, int d);

// Explicit graph of G[R,R] as adjacency lists over A- and B-cell lists.
struct ExplicitGraph {
  std::vector<IVec> a, b;
  std::vector<std::vector<int>> adj;  // a index -> b indices
};
ExplicitGraph explicit_graph(const TranslationGraph& g, const Rect& r);

// Backtracking over all choices of partner for each required vertex.
bool exhaustive_cover(const TranslationGraph& g, const Rect& r, const CellSet& required_a, const CellSet& required_b);
// Edmonds-Karp on the unit-capacity flow network of G[R,R].
int64_t max_flow_matching_size(const TranslationGraph& g, const Rect& r);
// Length (edges) of a shortest augmenting path in G[R,R] w.r.t. m, no cap.
std::optional<int64_t> shortest_augmenting_length(const TranslationGraph& g, const Rect& r, const Matching& m);
// Enumerates extensions of m + (x, y) covering the j-ball around x.
bool exhaustive_extendable(const TranslationGraph& g, const Matching& m, const IVec& x, const IVec& y, int64_t j,
                           bool x_is_a);

}  // namespace eqd::checks
