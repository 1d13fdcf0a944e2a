#include "eqd/lebesgue.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "eqd/parallel.hpp"
#include "eqd/rng.hpp"

namespace eqd {

Voronoi integer_voronoi(const CellSet& seeds, const Rect& window) {
  Voronoi v;
  v.seeds = seeds.cells();
  if (v.seeds.empty()) throw ArgumentError("integer_voronoi: seed set is empty");
  v.owner.assign(static_cast<size_t>(window.volume()), kNone);
  parallel_chunks(window.volume(), [&](int64_t lo, int64_t hi, int) {
    for (int64_t i = lo; i < hi; ++i) {
      IVec p = window.point(i);
      int64_t best = INT64_MAX;
      int32_t who = kNone;
      bool tie = false;
      for (size_t s = 0; s < v.seeds.size(); ++s) {
        int64_t dist = linf_dist(p, v.seeds[s]);
        if (dist < best) {
          best = dist;
          who = static_cast<int32_t>(s);
          tie = false;
        } else if (dist == best) {
          tie = true;
        }
      }
      v.owner[i] = tie ? kNone : who;
    }
  });
  return v;
}

GridDomain grid_domain(const Voronoi& vor, int64_t n_cube, const Rect& window, int level) {
  if (!is_power_of_two(n_cube)) throw ArgumentError("cube side must be a power of two");
  GridDomain dom;
  dom.level = level;
  dom.n_cube = n_cube;
  dom.cube_of_cell.assign(static_cast<size_t>(window.volume()), kNone);
  dom.uncovered = CellSet(window);
  const int d = window.dim();
  struct Found {
    Rect cube;
    int32_t seed;
  };
  std::vector<Found> found;
  for (size_t s = 0; s < vor.seeds.size(); ++s) {
    const IVec& seed = vor.seeds[s];
    IVec first(d), count(d);
    bool any = true;
    for (int j = 0; j < d; ++j) {
      int64_t lo = window.low.c[j], hi = window.low.c[j] + window.sides.c[j];
      int64_t k = (lo - seed.c[j] + n_cube - 1);
      // smallest corner >= lo congruent to seed mod n_cube
      int64_t q = k >= 0 ? k / n_cube : -((-k + n_cube - 1) / n_cube);
      first.c[j] = seed.c[j] + q * n_cube;
      count.c[j] = first.c[j] + n_cube <= hi ? (hi - n_cube - first.c[j]) / n_cube + 1 : 0;
      if (count.c[j] <= 0) any = false;
    }
    if (!any) continue;
    for_each_point(Rect(IVec(d), count), [&](const IVec& k) {
      IVec corner = first;
      for (int j = 0; j < d; ++j) corner.c[j] += k.c[j] * n_cube;
      if (vor.owner[window.index(corner)] != static_cast<int32_t>(s)) return;
      Rect cube = Rect::cube(corner, n_cube);
      bool inside = true;
      for_each_point(cube, [&](const IVec& p) {
        if (inside && vor.owner[window.index(p)] != static_cast<int32_t>(s)) inside = false;
      });
      if (inside) found.push_back({cube, static_cast<int32_t>(s)});
    });
  }
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.cube.low < b.cube.low; });
  for (const auto& f : found) {
    const auto id = static_cast<int32_t>(dom.cubes.size());
    dom.cubes.push_back(f.cube);
    dom.cube_seed.push_back(f.seed);
    for_each_point(f.cube, [&](const IVec& p) { dom.cube_of_cell[window.index(p)] = id; });
  }
  for (int64_t i = 0; i < window.volume(); ++i) dom.uncovered.set_index(i, dom.cube_of_cell[i] == kNone);
  return dom;
}

namespace {

void validate_ladder(const LebesgueConfig& cfg) {
  if (cfg.ladder.empty()) throw ArgumentError("ladder must not be empty");
  for (size_t i = 0; i < cfg.ladder.size(); ++i) {
    if (!is_power_of_two(cfg.ladder[i])) throw ArgumentError("ladder entries must be powers of two");
    if (i && cfg.ladder[i] <= cfg.ladder[i - 1]) throw ArgumentError("ladder must be strictly increasing");
  }
  if (cfg.levels < 0 || cfg.levels >= static_cast<int>(cfg.ladder.size()))
    throw ArgumentError("levels must index into the ladder");
}

bool standard_regime(const LebesgueConfig& cfg, int level, int64_t window_side) {
  size_t k = static_cast<size_t>(level) + 2;
  return k < cfg.ladder.size() && cfg.ladder[k] < window_side;
}

TorusPoint anchor_of(const CosetWindow& win, const LebesgueConfig& cfg) {
  if (cfg.anchor.k() == win.sys.k) return cfg.anchor;
  Rng rng(win.sys.rng_seed, "anchor");
  std::vector<double> a(win.sys.k);
  for (auto& x : a) x = rng.uniform();
  return TorusPoint(a);
}

// The cell of the search box whose coset point is nearest to the anchor
// (ties row-major).
IVec anchor_cell(const CosetWindow& win, const TorusPoint& anchor, const Rect& box) {
  const int t = thread_count();
  std::vector<double> best_d(t, 2.0);
  std::vector<int64_t> best_i(t, -1);
  parallel_chunks(box.volume(), [&](int64_t lo, int64_t hi, int worker) {
    std::vector<double> p(win.sys.k), diff(win.sys.k);
    for (int64_t i = lo; i < hi; ++i) {
      coset_point_into(win.base, box.point(i), win.sys, p.data());
      for (int c = 0; c < win.sys.k; ++c) diff[c] = p[c] - anchor.x[c];
      double dist = torus_norm_linf(diff.data(), win.sys.k);
      if (dist < best_d[worker]) {
        best_d[worker] = dist;
        best_i[worker] = i;
      }
    }
  });
  int64_t idx = -1;
  double bd = 3.0;
  for (int k = 0; k < t; ++k)
    if (best_i[k] >= 0 && (best_d[k] < bd || (best_d[k] == bd && best_i[k] < idx))) {
      bd = best_d[k];
      idx = best_i[k];
    }
  return box.point(idx);
}

// Representative of c inside the window modulo n (per axis).
IVec reduce_into(const IVec& c, const Rect& w, int64_t n) {
  IVec out = c;
  for (int j = 0; j < c.dim; ++j) {
    int64_t t = (c.c[j] - w.low.c[j]) % n;
    if (t < 0) t += n;
    out.c[j] = w.low.c[j] + std::min(t, w.sides.c[j] - 1);
  }
  return out;
}

}  // namespace

int64_t taint_margin(const LebesgueConfig& cfg, int m_cap, int64_t window_side) {
  validate_ladder(cfg);
  int64_t margin = 0;
  for (int i = 0; i <= cfg.levels; ++i) {
    int64_t seeds = standard_regime(cfg, i, window_side) ? cfg.ladder[i + 2] : 0;
    margin += seeds + cfg.ladder[i] + m_cap;
  }
  return margin;
}

GridSchedule build_schedule(const CosetWindow& win, const LebesgueConfig& cfg) {
  validate_ladder(cfg);
  GridSchedule s;
  s.ladder = cfg.ladder;
  double acc = 0;
  for (size_t i = 0; i + 1 < cfg.ladder.size(); ++i) {
    acc += double(cfg.ladder[i]) * double(cfg.ladder[i]) / double(cfg.ladder[i + 1]);
    s.summability.push_back(acc);
  }
  const int64_t side = win.window.min_side();
  std::optional<IVec> single;
  for (int i = 0; i <= cfg.levels; ++i) {
    if (standard_regime(cfg, i, side)) {
      const int64_t r = cfg.ladder[i + 2];
      auto col = build_sparse_coloring(win.sys, r);
      s.seeds.push_back(greedy_sparse_net(win, col, r, cfg.net_extension * r));
      s.single_seed.push_back(false);
      continue;
    }
    if (!single) {
      if (cfg.mutant_window_tiebreak) {
        IVec c = win.window.low;
        for (int j = 0; j < c.dim; ++j) c.c[j] += win.window.sides.c[j] / 2;
        single = c;
      } else {
        // Only the residue of the anchor modulo the coarsest fitting cube
        // matters, so it may lie outside the window.
        const int64_t ext = cfg.anchor_extension >= 0 ? cfg.anchor_extension : 2 * win.window.max_side();
        const IVec c = anchor_cell(win, anchor_of(win, cfg), win.window.grown(ext));
        int64_t n = 1;
        for (int l = 0; l <= cfg.levels; ++l)
          if (cfg.ladder[l] <= side) n = cfg.ladder[l];
        single = reduce_into(c, win.window, n);
      }
    }
    CellSet one(win.window);
    one.set(*single);
    s.seeds.push_back(one);
    s.single_seed.push_back(true);
  }
  return s;
}

nlohmann::json report_json(const IterationReport& r) {
  return {{"level", r.level},
          {"n_cube", r.n_cube},
          {"core_volume", r.core_volume},
          {"changed_cells", {{"prune", r.changed_prune}, {"rematch", r.changed_rematch}, {"refine", r.changed_refine}, {"total", r.changed_total}}},
          {"changed_fraction", {{"prune", r.prune_fraction}, {"rematch", r.rematch_fraction}, {"refine", r.refine_fraction}}},
          {"core_a_cells", r.core_a_cells},
          {"core_unmatched_a", r.core_unmatched_a},
          {"unmatched_fraction", r.unmatched_fraction},
          {"uncovered_fraction", r.uncovered_fraction},
          {"cubes", r.cubes},
          {"dirty_cubes", r.dirty_cubes},
          {"special_rects", r.special_rects},
          {"flips", r.flips},
          {"cube_discrepancy", {{"mean", r.mean_cube_discrepancy}, {"max", r.max_cube_discrepancy}}},
          {"cubes_unmatched_above_discrepancy", r.cubes_unmatched_above_discrepancy},
          {"cubes_two_sided_unmatched", r.cubes_two_sided_unmatched},
          {"cubes_with_short_path", r.cubes_with_short_path},
          {"edges_outside_cubes", r.edges_outside_cubes}};
}

Matching init_m0(const TranslationGraph& g, const GridDomain& dom0) {
  Matching m(g.window(), g.m_cap());
  parallel_for(static_cast<int64_t>(dom0.cubes.size()), [&](int64_t c) { rematch_region(g, dom0.cubes[c], m); });
  return m;
}

int64_t prune_cross_cube(Matching& m, const GridDomain& dom) {
  int64_t changed = 0;
  const int64_t vol = m.window().volume();
  for (int64_t a = 0; a < vol; ++a) {
    int32_t b = m.partner_of_a(a);
    if (b == kNone) continue;
    int32_t ca = dom.cube_of_cell[a];
    if (ca == kNone || ca != dom.cube_of_cell[b]) {
      m.remove_edge_at_a(a);
      changed += 2;
    }
  }
  return changed;
}

int64_t rematch_dirty_cubes(const TranslationGraph& g, Matching& m, const GridDomain& dom, const GridDomain& prev,
                            const Voronoi& vor_prev, std::vector<uint8_t>& dirty) {
  const Rect& w = g.window();
  dirty.assign(dom.cubes.size(), 0);
  parallel_for(static_cast<int64_t>(dom.cubes.size()), [&](int64_t c) {
    int32_t owner = kNone - 1;
    bool is_dirty = false;
    for_each_point(dom.cubes[c], [&](const IVec& p) {
      if (is_dirty) return;
      int64_t i = w.index(p);
      int32_t o = vor_prev.owner[i];
      if (prev.cube_of_cell[i] == kNone || o == kNone) is_dirty = true;
      else if (owner == kNone - 1) owner = o;
      else if (o != owner) is_dirty = true;
    });
    dirty[c] = is_dirty;
    if (is_dirty) rematch_region(g, dom.cubes[c], m);
  });
  int64_t n = 0;
  for (auto x : dirty) n += x;
  return n;
}

RefineStats refine_cube(const TranslationGraph& g, Matching& m, const Rect& q, const RectTree& tree,
                        SearchScratch& scratch) {
  RefineStats st;
  for (const auto& lvl : tree.levels)
    for (const auto& node : lvl) st.special_rects += node.special;
  // Basic rectangles that are not inherited cubes get fresh matchings.
  for (const auto& node : tree.basic()) {
    bool inherited = true;
    for (int j = 0; j < node.rect.dim(); ++j) inherited &= node.rect.sides.c[j] == tree.n_prev;
    if (!inherited) {
      rematch_region(g, node.rect, m);
      ++st.fresh_rects;
    }
  }
  for (int l = tree.h; l >= 1; --l) {
    const double factor = std::ldexp(1.0, tree.h - l + 1) + 0.5;
    const auto cap = static_cast<int64_t>(std::floor(factor * static_cast<double>(tree.n_prev)));
    for (const auto& node : tree.levels[l - 1]) {
      while (auto path = bounded_augmenting_path(g, node.rect, m, cap, &scratch)) {
        flip_in_place(g, m, *path);
        ++st.flips;
      }
    }
  }
  (void)q;
  return st;
}

namespace {

struct CubeChecks {
  int64_t disc = 0;
  int64_t unmatched_a = 0, unmatched_b = 0;
  bool short_path = false;
};

void level_checks(const TranslationGraph& g, const Matching& m, const GridDomain& dom, bool check_paths,
                  std::vector<CubeChecks>& out) {
  const Rect& w = g.window();
  out.assign(dom.cubes.size(), {});
  std::vector<SearchScratch> scratch(static_cast<size_t>(thread_count()));
  parallel_chunks(static_cast<int64_t>(dom.cubes.size()), [&](int64_t lo, int64_t hi, int worker) {
    for (int64_t c = lo; c < hi; ++c) {
      CubeChecks& cc = out[c];
      int64_t na = 0, nb = 0;
      for_each_point(dom.cubes[c], [&](const IVec& p) {
        int64_t i = w.index(p);
        if (g.is_a(i)) {
          ++na;
          cc.unmatched_a += m.partner_of_a(i) == kNone;
        }
        if (g.is_b(i)) {
          ++nb;
          cc.unmatched_b += m.partner_of_b(i) == kNone;
        }
      });
      cc.disc = na > nb ? na - nb : nb - na;
      if (check_paths && cc.unmatched_a > 0 && cc.unmatched_b > 0)
        cc.short_path = bounded_augmenting_path(g, dom.cubes[c], m, dom.cubes[c].max_side(), &scratch[worker]).has_value();
    }
  });
}

void fill_report(IterationReport& rep, const TranslationGraph& g, const Matching& m, const GridDomain& dom,
                 const Rect& core, bool check_paths) {
  const Rect& w = g.window();
  rep.n_cube = dom.n_cube;
  rep.core_volume = core.volume();
  rep.cubes = static_cast<int64_t>(dom.cubes.size());
  int64_t uncovered = 0;
  for_each_point(core, [&](const IVec& p) {
    int64_t i = w.index(p);
    uncovered += dom.cube_of_cell[i] == kNone;
    if (g.is_a(i)) {
      ++rep.core_a_cells;
      rep.core_unmatched_a += m.partner_of_a(i) == kNone;
    }
  });
  rep.unmatched_fraction = rep.core_a_cells ? double(rep.core_unmatched_a) / double(rep.core_a_cells) : 0.0;
  rep.uncovered_fraction = double(uncovered) / double(rep.core_volume);
  std::vector<CubeChecks> cc;
  level_checks(g, m, dom, check_paths, cc);
  double sum = 0;
  for (const auto& c : cc) {
    sum += double(c.disc);
    rep.max_cube_discrepancy = std::max(rep.max_cube_discrepancy, c.disc);
    rep.cubes_unmatched_above_discrepancy += c.unmatched_a > c.disc;
    rep.cubes_two_sided_unmatched += c.unmatched_a > 0 && c.unmatched_b > 0;
    rep.cubes_with_short_path += c.short_path;
  }
  rep.mean_cube_discrepancy = cc.empty() ? 0.0 : sum / double(cc.size());
  for (int64_t a = 0; a < w.volume(); ++a) {
    int32_t b = m.partner_of_a(a);
    if (b == kNone) continue;
    if (dom.cube_of_cell[a] == kNone || dom.cube_of_cell[a] != dom.cube_of_cell[b]) ++rep.edges_outside_cubes;
  }
}

int64_t count_changes(const TranslationGraph& g, const std::vector<int32_t>& before, const std::vector<int32_t>& after,
                      const Rect& core) {
  int64_t n = 0;
  const Rect& w = g.window();
  for_each_point(core, [&](const IVec& p) {
    int64_t i = w.index(p);
    n += g.is_a(i) && before[i] != after[i];
  });
  return n;
}

}  // namespace

PipelineResult run_pipeline(const CosetWindow& win, const LebesgueConfig& cfg) {
  validate_ladder(cfg);
  const int m_cap = win.sys.m_cap;
  const Rect& w = win.window;
  PipelineResult res;
  res.margin = taint_margin(cfg, m_cap, w.min_side());
  if (2 * res.margin >= w.min_side())
    throw ArgumentError("window side " + std::to_string(w.min_side()) + " too small for the ladder: taint margin is " +
                        std::to_string(res.margin) + " per side");
  res.core = w.shrunk(res.margin);
  TranslationGraph g(win.a_bits, win.b_bits, m_cap);
  res.schedule = build_schedule(win, cfg);
  std::vector<Voronoi> vor;
  for (int i = 0; i <= cfg.levels; ++i) {
    vor.push_back(integer_voronoi(res.schedule.seeds[i], w));
    res.domains.push_back(grid_domain(vor[i], cfg.ladder[i], w, i));
  }
  res.last_change.assign(static_cast<size_t>(w.volume()), -1);

  res.matching = init_m0(g, res.domains[0]);
  {
    IterationReport rep;
    rep.level = 0;
    fill_report(rep, g, res.matching, res.domains[0], res.core, cfg.check_invariants);
    res.reports.push_back(rep);
    for (int64_t a = 0; a < w.volume(); ++a)
      if (res.matching.partner_of_a(a) != kNone) res.last_change[a] = 0;
  }
  for (int i = 1; i <= cfg.levels; ++i) {
    const GridDomain& dom = res.domains[i];
    const GridDomain& prev = res.domains[i - 1];
    Matching& m = res.matching;
    IterationReport rep;
    rep.level = i;
    const std::vector<int32_t> before = m.a_to_b();
    prune_cross_cube(m, dom);
    const std::vector<int32_t> after_prune = m.a_to_b();
    std::vector<uint8_t> dirty;
    rep.dirty_cubes = rematch_dirty_cubes(g, m, dom, prev, vor[i - 1], dirty);
    const std::vector<int32_t> after_rematch = m.a_to_b();
    std::vector<SearchScratch> scratch(static_cast<size_t>(thread_count()));
    std::vector<RefineStats> stats(dom.cubes.size());
    parallel_chunks(static_cast<int64_t>(dom.cubes.size()), [&](int64_t lo, int64_t hi, int worker) {
      for (int64_t c = lo; c < hi; ++c) {
        if (dirty[c]) continue;
        const Rect& q = dom.cubes[c];
        const IVec& seed = vor[i - 1].seeds[vor[i - 1].owner[w.index(q.low)]];
        RectTree tree = build_rect_tree(q, seed, cfg.ladder[i - 1]);
        stats[c] = refine_cube(g, m, q, tree, scratch[worker]);
      }
    });
    for (const auto& s : stats) {
      rep.flips += s.flips;
      rep.special_rects += s.special_rects;
    }
    const std::vector<int32_t>& after = m.a_to_b();
    rep.changed_prune = count_changes(g, before, after_prune, res.core);
    rep.changed_rematch = count_changes(g, after_prune, after_rematch, res.core);
    rep.changed_refine = count_changes(g, after_rematch, after, res.core);
    rep.changed_total = count_changes(g, before, after, res.core);
    if (cfg.check_invariants && rep.changed_total > rep.changed_prune + rep.changed_rematch + rep.changed_refine)
      throw InvariantError("level change set exceeds the union of its phases");
    for (int64_t a = 0; a < w.volume(); ++a) {
      if (before[a] != after[a]) res.last_change[a] = i;
    }
    fill_report(rep, g, m, dom, res.core, cfg.check_invariants);
    const double cv = double(res.core.volume());
    rep.prune_fraction = double(rep.changed_prune) / cv;
    rep.rematch_fraction = double(rep.changed_rematch) / cv;
    rep.refine_fraction = double(rep.changed_refine) / cv;
    res.reports.push_back(rep);
  }
  if (cfg.check_invariants) res.matching.validate(&g);
  return res;
}

LabelledRun labelled(const PipelineResult& r) {
  const Rect& w = r.matching.window();
  LabelledRun out{IntGrid(w, -1), r.core};
  const int d = w.dim();
  for (int64_t a = 0; a < w.volume(); ++a) {
    int32_t b = r.matching.partner_of_a(a);
    if (b != kNone) out.labels.v[a] = offset_index(w.point(b) - w.point(a), r.matching.m_cap());
  }
  (void)d;
  return out;
}

}  // namespace eqd
