#pragma once
// Multi-scale matching construction: seed nets, integer Voronoi cells, cube
// grids and the per-level prune / rematch / refine sequence.

#include <cstdint>
#include <string>
#include <vector>

#include "eqd/coset_window.hpp"
#include "eqd/matching.hpp"
#include "json.hpp"

namespace eqd {

struct LebesgueConfig {
  std::vector<int64_t> ladder{8, 32, 128};
  int levels = 2;      // last level index I
  TorusPoint anchor;   // single-seed regime: the cell whose coset point is nearest to this
  int64_t anchor_extension = -1;  // anchor search box: window grown by this (-1: twice the window side)
  int64_t net_extension = 3;      // nets are built on the window grown by this many N_{i+2}
  bool mutant_window_tiebreak = false;  // test hook: single seed at the window centre instead
  bool check_invariants = true;
};

struct Voronoi {
  std::vector<IVec> seeds;     // row-major
  std::vector<int32_t> owner;  // per window cell, kNone on ties
};
Voronoi integer_voronoi(const CellSet& seeds, const Rect& window);

struct GridDomain {
  int level = 0;
  int64_t n_cube = 0;
  std::vector<Rect> cubes;           // row-major by corner
  std::vector<int32_t> cube_seed;    // index into the Voronoi seed list
  std::vector<int32_t> cube_of_cell; // per window cell, kNone when uncovered
  CellSet uncovered;
};
GridDomain grid_domain(const Voronoi& vor, int64_t n_cube, const Rect& window, int level = 0);

struct GridSchedule {
  std::vector<int64_t> ladder;
  std::vector<CellSet> seeds;       // per level
  std::vector<bool> single_seed;    // level uses the one-seed regime
  std::vector<double> summability;  // partial sums of N_i^2 / N_{i+1}
};
GridSchedule build_schedule(const CosetWindow& win, const LebesgueConfig& cfg);

// Per-side taint margin for the configured ladder.
int64_t taint_margin(const LebesgueConfig& cfg, int m_cap, int64_t window_side);

struct IterationReport {
  int level = 0;
  int64_t n_cube = 0;
  int64_t core_volume = 0;
  int64_t changed_prune = 0, changed_rematch = 0, changed_refine = 0, changed_total = 0;
  double prune_fraction = 0, rematch_fraction = 0, refine_fraction = 0;
  int64_t core_a_cells = 0, core_unmatched_a = 0;
  double unmatched_fraction = 0;
  double uncovered_fraction = 0;  // core cells outside level cubes
  int64_t cubes = 0, dirty_cubes = 0, special_rects = 0, flips = 0;
  double mean_cube_discrepancy = 0;
  int64_t max_cube_discrepancy = 0;
  int64_t cubes_unmatched_above_discrepancy = 0;
  int64_t cubes_two_sided_unmatched = 0;
  int64_t cubes_with_short_path = 0;
  int64_t edges_outside_cubes = 0;
};
nlohmann::json report_json(const IterationReport& r);

struct PipelineResult {
  Matching matching;
  std::vector<IterationReport> reports;
  std::vector<int32_t> last_change;  // per window cell: last level an A-cell's partner changed, -1 if never matched
  int64_t margin = 0;
  Rect core;
  GridSchedule schedule;
  std::vector<GridDomain> domains;
};

// Individual stages; each parallelizes over cubes.
Matching init_m0(const TranslationGraph& g, const GridDomain& dom0);
int64_t prune_cross_cube(Matching& m, const GridDomain& dom);
// Returns the number of dirty cubes; dirty[i] is set per cube of dom.
int64_t rematch_dirty_cubes(const TranslationGraph& g, Matching& m, const GridDomain& dom, const GridDomain& prev,
                            const Voronoi& vor_prev, std::vector<uint8_t>& dirty);
struct RefineStats {
  int64_t flips = 0;
  int64_t fresh_rects = 0;
  int64_t special_rects = 0;
};
RefineStats refine_cube(const TranslationGraph& g, Matching& m, const Rect& q, const RectTree& tree,
                        SearchScratch& scratch);

PipelineResult run_pipeline(const CosetWindow& win, const LebesgueConfig& cfg);

// Piece index per window cell (-1 unmatched) and the core, for equivariance checks.
LabelledRun labelled(const PipelineResult& r);

}  // namespace eqd
