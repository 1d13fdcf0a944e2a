#include "eqd/baire.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "eqd/rng.hpp"

namespace eqd {

namespace {

// Additive recurrence with the generalised golden ratio in k dimensions.
std::vector<double> recurrence_step(int k) {
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (k + 1));
  std::vector<double> a(k);
  for (int c = 0; c < k; ++c) a[c] = wrap01(std::pow(1.0 / phi, c + 1));
  return a;
}

int64_t edge_distance(const NetEdge& e, const NetEdge& f) {
  return std::min({linf_dist(e.a, f.a), linf_dist(e.a, f.b), linf_dist(e.b, f.a), linf_dist(e.b, f.b)});
}

Rect ball_around(const IVec& x, int64_t r) { return Rect(x - IVec::filled(x.dim, r), IVec::filled(x.dim, 2 * r + 1)); }

}  // namespace

SparseNetLadder build_nets(const CosetWindow& win, const std::vector<int64_t>& radii,
                           const std::vector<int64_t>& horizons, uint64_t seed) {
  if (radii.size() != horizons.size()) throw ArgumentError("one horizon per radius is required");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 1) throw ArgumentError("radii must be positive");
    if (i && radii[i] < radii[i - 1]) throw ArgumentError("radii must be non-decreasing");
    if (horizons[i] < 0) throw ArgumentError("horizons must be non-negative");
  }
  const int k = win.sys.k, d = win.sys.d, m_cap = win.sys.m_cap;
  const Rect& w = win.window;
  SparseNetLadder net;
  net.radii = radii;
  net.horizons = horizons;
  net.condition_bound = std::pow(4.0, 1 - d);
  Rng rng(seed, "nets");
  std::vector<double> shift(k);
  for (auto& s : shift) s = rng.uniform();
  const auto step = recurrence_step(k);
  double acc = 0;
  std::vector<double> p(k);
  for (size_t li = 0; li < radii.size(); ++li) {
    const int level = static_cast<int>(li) + 1;
    std::vector<double> y(k);
    for (int c = 0; c < k; ++c) y[c] = wrap01(shift[c] + level * step[c]);
    net.centers.emplace_back(y);
    const int64_t pad = horizons[li] + m_cap;
    if (2 * pad >= w.min_side())
      throw ArgumentError("window too small for horizon " + std::to_string(horizons[li]) + " at level " +
                          std::to_string(level));
    Rect region = w.shrunk(pad);
    net.regions.push_back(region);
    const CellSet& side = SparseNetLadder::a_level(level) ? win.a_bits : win.b_bits;
    std::vector<std::pair<double, int64_t>> cand;
    for_each_point(region, [&](const IVec& n) {
      int64_t i = w.index(n);
      if (!side.at(i)) return;
      coset_point_into(win.base, n, win.sys, p.data());
      for (int c = 0; c < k; ++c) p[c] -= y[c];
      cand.emplace_back(torus_norm_linf(p.data(), k), i);
    });
    std::sort(cand.begin(), cand.end());
    const int64_t sep = radii[li] + 4 * m_cap;
    std::vector<IVec> chosen;
    for (const auto& c : cand) {
      IVec q = w.point(c.second);
      bool ok = true;
      for (const auto& s : chosen)
        if (linf_dist(s, q) <= sep) {
          ok = false;
          break;
        }
      if (!ok) break;
      chosen.push_back(q);
    }
    net.sparse_ok = net.sparse_ok && is_sparse(chosen, sep);
    CellSet a(w), b(w);
    for (const auto& q : chosen) (SparseNetLadder::a_level(level) ? a : b).set(q);
    net.a_nets.push_back(std::move(a));
    net.b_nets.push_back(std::move(b));
    acc += std::pow(double(m_cap) / double(radii[li]), double(d - 1) / double(d));
    net.condition.push_back(acc);
  }
  return net;
}

bool extendable_oracle(const TranslationGraph& g, const Matching& m, const IVec& x, const IVec& y, int64_t j,
                       bool x_is_a) {
  const Rect& w = g.window();
  const int m_cap = g.m_cap();
  if (j < 0) throw ArgumentError("horizon must be non-negative");
  const Rect ball = ball_around(x, j + m_cap);
  if (!w.contains(ball)) throw ArgumentError("horizon exceeds the window around " + to_string(x));
  if (linf_dist(x, y) > m_cap) throw ArgumentError("(x, y) is not an edge");
  const IVec a = x_is_a ? x : y, b = x_is_a ? y : x;
  const int64_t ai = w.index(a), bi = w.index(b);
  if (!g.is_a(ai) || !g.is_b(bi)) throw ArgumentError("(x, y) is not an edge");
  if (m.partner_of_a(ai) != kNone || m.partner_of_b(bi) != kNone) return false;
  CellSet fa(ball), fb(ball), ra(ball), rb(ball);
  const Rect inner = ball_around(x, j);
  for_each_point(ball, [&](const IVec& p) {
    int64_t i = w.index(p);
    bool free_a = g.is_a(i) && m.partner_of_a(i) == kNone && i != ai;
    bool free_b = g.is_b(i) && m.partner_of_b(i) == kNone && i != bi;
    fa.set(p, free_a);
    fb.set(p, free_b);
    if (inner.contains(p)) {
      ra.set(p, free_a);
      rb.set(p, free_b);
    }
  });
  TranslationGraph local(std::move(fa), std::move(fb), m_cap);
  return !hall_deficiency(local, ball, ra, rb).has_value();
}

ExtendabilityContext::ExtendabilityContext(const TranslationGraph& g, const Matching& m, const IVec& x, int64_t j,
                                           bool x_is_a)
    : g_(g), m_(m), x_(x), j_(j), x_is_a_(x_is_a) {
  const Rect& w = g.window();
  const int m_cap = g.m_cap();
  if (j < 0) throw ArgumentError("horizon must be non-negative");
  ball_ = ball_around(x, j + m_cap);
  inner_ = ball_around(x, j);
  if (!w.contains(ball_)) throw ArgumentError("horizon exceeds the window around " + to_string(x));
  const auto offs = offsets_in_ball(x.dim, m_cap);
  const auto bst = ball_.strides();
  std::vector<int64_t> bdelta;
  for (const auto& o : offs) {
    int64_t dl = 0;
    for (int a = 0; a < x.dim; ++a) dl += o.c[a] * bst[a];
    bdelta.push_back(dl);
  }
  auto build = [&](Side& s, bool left_a) {
    const int64_t vol = ball_.volume();
    s.left_id.assign(static_cast<size_t>(vol), kNone);
    s.right_id.assign(static_cast<size_t>(vol), kNone);
    int64_t bi = 0;
    for_each_point(ball_, [&](const IVec& p) {
      int64_t i = w.index(p);
      bool r_ok = left_a ? (g.is_b(i) && m.partner_of_b(i) == kNone) : (g.is_a(i) && m.partner_of_a(i) == kNone);
      if (r_ok) {
        s.right_id[bi] = static_cast<int32_t>(s.lb.right.size());
        s.lb.right.push_back(static_cast<int32_t>(i));
      }
      ++bi;
    });
    s.lb.start.push_back(0);
    for_each_point(inner_, [&](const IVec& p) {
      int64_t i = w.index(p);
      bool l_ok = left_a ? (g.is_a(i) && m.partner_of_a(i) == kNone) : (g.is_b(i) && m.partner_of_b(i) == kNone);
      if (!l_ok) return;
      int64_t b0 = ball_.index(p);
      s.left_id[b0] = static_cast<int32_t>(s.lb.left.size());
      s.lb.left.push_back(static_cast<int32_t>(i));
      for (int64_t dl : bdelta) {
        int32_t r = s.right_id[b0 + dl];
        if (r != kNone) s.lb.adj.push_back(r);
      }
      s.lb.start.push_back(static_cast<int64_t>(s.lb.adj.size()));
    });
    detail::hopcroft_karp(s.lb, s.mate_l, s.mate_r);
  };
  build(sa_, true);
  build(sb_, false);
  stamp_.assign(std::max(sa_.lb.right.size(), sb_.lb.right.size()) + 1, 0);
}

bool ExtendabilityContext::repair(Side& s, int32_t drop_left, int32_t drop_right) {
  std::vector<int32_t> ml = s.mate_l, mr = s.mate_r;
  std::vector<int32_t> todo;
  if (drop_left != kNone && ml[drop_left] != kNone) {
    mr[ml[drop_left]] = kNone;
    ml[drop_left] = kNone;
  }
  if (drop_right != kNone && mr[drop_right] != kNone) {
    ml[mr[drop_right]] = kNone;
    todo.push_back(mr[drop_right]);
    mr[drop_right] = kNone;
  }
  for (size_t u = 0; u < ml.size(); ++u)
    if (ml[u] == kNone && static_cast<int32_t>(u) != drop_left && (todo.empty() || todo[0] != static_cast<int32_t>(u)))
      todo.push_back(static_cast<int32_t>(u));
  std::vector<int32_t> parent(mr.size(), kNone), queue;
  for (int32_t root : todo) {
    ++repairs_;
    if (++gen_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      gen_ = 1;
    }
    queue.assign(1, root);
    int32_t found = kNone;
    for (size_t qi = 0; qi < queue.size() && found == kNone; ++qi) {
      int32_t u = queue[qi];
      for (int64_t e = s.lb.start[u]; e < s.lb.start[u + 1]; ++e) {
        int32_t r = s.lb.adj[e];
        if (r == drop_right || stamp_[r] == gen_) continue;
        stamp_[r] = gen_;
        parent[r] = u;
        if (mr[r] == kNone) {
          found = r;
          break;
        }
        queue.push_back(mr[r]);
      }
    }
    if (found == kNone) return false;
    for (int32_t r = found; r != kNone;) {
      int32_t u = parent[r];
      int32_t prev = ml[u];
      ml[u] = r;
      mr[r] = u;
      r = u == root ? kNone : prev;
    }
  }
  return true;
}

bool ExtendabilityContext::test(const IVec& y) {
  const Rect& w = g_.window();
  if (linf_dist(x_, y) > g_.m_cap() || !w.contains(y)) return false;
  const IVec a = x_is_a_ ? x_ : y, b = x_is_a_ ? y : x_;
  const int64_t ai = w.index(a), bi = w.index(b);
  if (!g_.is_a(ai) || !g_.is_b(bi)) return false;
  if (m_.partner_of_a(ai) != kNone || m_.partner_of_b(bi) != kNone) return false;
  const int64_t la = ball_.index(a), lb = ball_.index(b);
  return repair(sa_, sa_.left_id[la], sa_.right_id[lb]) && repair(sb_, sb_.left_id[lb], sb_.right_id[la]);
}

HoleReport hole_analysis(const CellSet& x, int m_cap, int64_t r_i) {
  if (m_cap < 2 || m_cap % 2) throw ArgumentError("hole analysis needs an even M >= 2");
  const auto cells = x.cells();
  if (cells.empty()) throw ArgumentError("hole analysis needs a non-empty set");
  const int d = x.dim();
  if (ell_components(x, 2 * m_cap).classes.size() != 1) throw ArgumentError("set is not 2M-connected");
  HoleReport rep;
  rep.grid = m_cap / 2;
  rep.reference = cells[0];
  for (const auto& c : cells)
    for (int a = 0; a < d; ++a) rep.reference.c[a] = std::min(rep.reference.c[a], c.c[a]);
  auto cube_of = [&](const IVec& c) {
    IVec k(d);
    for (int a = 0; a < d; ++a) {
      int64_t t = c.c[a] - rep.reference.c[a];
      k.c[a] = t >= 0 ? t / rep.grid : -((-t + rep.grid - 1) / rep.grid);
    }
    return k;
  };
  std::set<IVec> hull;
  for (const auto& c : cells) hull.insert(cube_of(c));
  std::set<IVec> hull2 = hull;
  for (const auto& k : hull)
    for (int a = 0; a < d; ++a)
      for (int s : {-1, 1}) {
        IVec n = k;
        n.c[a] += s;
        hull2.insert(n);
      }
  auto cube_rect = [&](const IVec& k) {
    IVec lo = rep.reference;
    for (int a = 0; a < d; ++a) lo.c[a] += k.c[a] * rep.grid;
    return Rect::cube(lo, rep.grid);
  };
  Rect bb = cube_rect(*hull2.begin());
  IVec lo = bb.low, hi = bb.high();
  for (const auto& k : hull2) {
    Rect r = cube_rect(k);
    for (int a = 0; a < d; ++a) {
      lo.c[a] = std::min(lo.c[a], r.low.c[a]);
      hi.c[a] = std::max(hi.c[a], r.high().c[a]);
    }
  }
  // Region around X1: X2 extends X1 by one grid cube, so this box holds both.
  rep.region = Rect(lo, hi - lo).grown(2 * m_cap + 1 - rep.grid);
  rep.x1 = CellSet(rep.region);
  rep.x2 = CellSet(rep.region);
  for (const auto& k : hull) for_each_point(cube_rect(k), [&](const IVec& p) { rep.x1.set(p); });
  for (const auto& k : hull2) for_each_point(cube_rect(k), [&](const IVec& p) { rep.x2.set(p); });
  CellSet comp(rep.region);
  for (int64_t i = 0; i < rep.region.volume(); ++i) comp.set_index(i, !rep.x1.at(i));
  const Components cc = ell_components(comp, 2 * m_cap);
  const int32_t frame = cc.label[0];
  rep.rich_threshold = std::pow(double(r_i) / double(m_cap), double(d - 1) / double(d));
  rep.perimeter_x1 = perimeter(rep.x1);
  std::vector<int64_t> per(cc.classes.size(), 0);
  for_each_point(rep.region, [&](const IVec& p) {
    if (!rep.x1.contains(p)) return;
    for (int a = 0; a < d; ++a)
      for (int s : {-1, 1}) {
        IVec q = p;
        q.c[a] += s;
        if (rep.region.contains(q) && !rep.x1.contains(q)) ++per[cc.label[rep.region.index(q)]];
      }
  });
  int64_t total = 0;
  for (size_t h = 0; h < cc.classes.size(); ++h) {
    Hole hole;
    hole.cells = cc.classes[h];
    hole.perimeter = per[h];
    hole.infinite = static_cast<int32_t>(h) == frame;
    hole.rich = double(hole.perimeter) >= rep.rich_threshold;
    total += per[h];
    rep.holes.push_back(std::move(hole));
  }
  rep.boundary_partition_ok = total == rep.perimeter_x1;
  return rep;
}

FillResult fill_hole(const CellSet& x, const HoleReport& rep, size_t hole, const CellSet& a_cells, int m_cap,
                     int64_t r_i) {
  if (hole >= rep.holes.size()) throw ArgumentError("no such hole");
  const Hole& h = rep.holes[hole];
  if (h.infinite) throw ArgumentError("the infinite hole cannot be filled");
  if (h.rich) throw ArgumentError("rich holes are not filled");
  CellSet hs = CellSet::from_cells(h.cells, x.dim());
  CellSet near = dist_ball(hs, m_cap);
  CellSet add(near.rect());
  for (int64_t i = 0; i < near.rect().volume(); ++i)
    if (near.at(i) && a_cells.contains(near.rect().point(i))) add.set_index(i);
  FillResult out;
  out.x_new = set_union(x, add);
  HoleReport rep2;
  try {
    rep2 = hole_analysis(out.x_new, m_cap, r_i);
    out.connected = true;
  } catch (const ArgumentError&) {
    return out;
  }
  out.same_reference = rep2.reference == rep.reference;
  out.hull_is_union = same_cells(rep2.x1, set_union(rep.x1, hs));
  std::vector<std::vector<IVec>> before, after;
  for (size_t i = 0; i < rep.holes.size(); ++i)
    if (!rep.holes[i].infinite && i != hole) before.push_back(rep.holes[i].cells);
  for (const auto& hh : rep2.holes)
    if (!hh.infinite) after.push_back(hh.cells);
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());
  out.hole_removed = before == after;
  return out;
}

PrivateSetReport private_set_audit(const std::vector<BoundaryPair>& x1_boundary, const std::vector<NetEdge>& edges,
                                   int64_t r_j, int m_cap) {
  PrivateSetReport rep;
  const int64_t reach = r_j / 2 + m_cap;
  const int64_t shells = std::max<int64_t>(1, r_j / (4 * m_cap));
  std::vector<int32_t> owner(x1_boundary.size(), kNone);
  for (size_t e = 0; e < edges.size(); ++e) {
    int64_t size = 0;
    std::vector<int64_t> ann(static_cast<size_t>(shells), 0);
    for (size_t k = 0; k < x1_boundary.size(); ++k) {
      const auto& bp = x1_boundary[k];
      int64_t dist = std::min({linf_dist(bp.inside, edges[e].a), linf_dist(bp.inside, edges[e].b),
                               linf_dist(bp.outside, edges[e].a), linf_dist(bp.outside, edges[e].b)});
      if (dist > reach) continue;
      ++size;
      if (owner[k] != kNone) rep.disjoint = false;
      owner[k] = static_cast<int32_t>(e);
      int64_t s = dist / (2 * m_cap);
      if (s < shells) ++ann[s];
    }
    rep.sizes.push_back(size);
    rep.annuli.push_back(std::move(ann));
  }
  return rep;
}

BaireResult run_baire(const CosetWindow& win, const BaireConfig& cfg) {
  const int m_cap = win.sys.m_cap;
  const int d = win.sys.d;
  const Rect& w = win.window;
  std::vector<int64_t> horizons;
  for (auto r : cfg.radii) horizons.push_back(cfg.horizon > 0 ? cfg.horizon : cfg.horizon_factor * r);
  BaireResult res;
  res.nets = build_nets(win, cfg.radii, horizons, win.sys.rng_seed);
  const int64_t pad = horizons.empty() ? m_cap : *std::max_element(horizons.begin(), horizons.end()) + m_cap;
  if (2 * (pad + m_cap) >= w.min_side()) throw ArgumentError("window too small for the largest horizon");
  res.core = w.shrunk(pad);
  TranslationGraph g(win.a_bits, win.b_bits, m_cap);
  res.matching = Matching(w, m_cap);
  Matching& m = res.matching;
  const auto chi = window_colors(win, build_sparse_coloring(win.sys, 2 * m_cap));
  const auto offs = offsets_in_ball(d, m_cap);

  for (int level = 1; level <= res.nets.levels(); ++level) {
    const size_t li = static_cast<size_t>(level) - 1;
    BaireLevelReport rep;
    rep.level = level;
    rep.radius = cfg.radii[li];
    rep.horizon = horizons[li];
    rep.a_side = SparseNetLadder::a_level(level);
    rep.condition_sum = res.nets.condition[li];
    rep.condition_holds = rep.condition_sum <= res.nets.condition_bound;
    if (!rep.condition_holds)
      res.warnings.push_back("level " + std::to_string(level) + ": sum of (M/r_j)^((d-1)/d) = " +
                             std::to_string(rep.condition_sum) + " exceeds " +
                             std::to_string(res.nets.condition_bound));
    const CellSet& net = rep.a_side ? res.nets.a_nets[li] : res.nets.b_nets[li];
    std::vector<int64_t> order;
    for (int64_t i = 0; i < w.volume(); ++i)
      if (net.at(i)) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int64_t p, int64_t q) {
      return chi[p] != chi[q] ? chi[p] < chi[q] : p < q;
    });
    rep.net_cells = static_cast<int64_t>(order.size());
    std::vector<NetEdge> added;
    for (int64_t xi : order) {
      const bool matched = rep.a_side ? m.partner_of_a(xi) != kNone : m.partner_of_b(xi) != kNone;
      if (matched) {
        ++rep.already_matched;
        continue;
      }
      const IVec x = w.point(xi);
      std::vector<int64_t> cand;
      for (const auto& o : offs) {
        IVec y = x + o;
        if (!w.contains(y)) continue;
        int64_t yi = w.index(y);
        bool ok = rep.a_side ? g.is_b(yi) && m.partner_of_b(yi) == kNone : g.is_a(yi) && m.partner_of_a(yi) == kNone;
        if (ok) cand.push_back(yi);
      }
      std::sort(cand.begin(), cand.end(), [&](int64_t p, int64_t q) {
        return chi[p] != chi[q] ? chi[p] < chi[q] : p < q;
      });
      ExtendabilityContext ctx(g, m, x, rep.horizon, rep.a_side);
      int64_t pick = -1;
      for (int64_t yi : cand)
        if (ctx.test(w.point(yi))) {
          pick = yi;
          break;
        }
      rep.oracle_repairs += ctx.repairs();
      if (pick < 0) {
        ++rep.failures;
        // Diagnose with the deficient set of the first candidate, if any.
        if (!cand.empty()) {
          const Rect ball = ball_around(x, rep.horizon + m_cap), inner = ball_around(x, rep.horizon);
          const int64_t ai = rep.a_side ? xi : cand[0], bi = rep.a_side ? cand[0] : xi;
          CellSet fa(ball), fb(ball), ra(ball), rb(ball);
          for_each_point(ball, [&](const IVec& p) {
            int64_t i = w.index(p);
            bool free_a = g.is_a(i) && m.partner_of_a(i) == kNone && i != ai;
            bool free_b = g.is_b(i) && m.partner_of_b(i) == kNone && i != bi;
            fa.set(p, free_a);
            fb.set(p, free_b);
            ra.set(p, free_a && inner.contains(p));
            rb.set(p, free_b && inner.contains(p));
          });
          TranslationGraph local(std::move(fa), std::move(fb), m_cap);
          if (auto cert = hall_deficiency(local, ball, ra, rb); cert && m_cap % 2 == 0) {
            CellSet xs = CellSet::from_cells(cert->set, d);
            for (const auto& comp : ell_components(xs, 2 * m_cap).classes)
              res.failure_holes.push_back(hole_analysis(CellSet::from_cells(comp, d), m_cap, rep.radius));
          }
        }
        res.aborted = true;
        break;
      }
      const int64_t ai = rep.a_side ? xi : pick, bi = rep.a_side ? pick : xi;
      if (cfg.posthoc_oracle) {
        if (!extendable_oracle(g, m, x, w.point(pick), rep.horizon, rep.a_side))
          throw InvariantError("selected edge at " + to_string(x) + " fails the direct oracle");
        ++rep.posthoc_checked;
      }
      m.add(ai, bi);
      added.push_back({w.point(ai), w.point(bi)});
      ++rep.added;
    }
    for (size_t e = 0; e < added.size(); ++e)
      for (size_t f = e + 1; f < added.size(); ++f)
        if (edge_distance(added[e], added[f]) <= rep.radius + 2 * m_cap) rep.added_sparse = false;
    rep.nets_covered = true;
    for (int64_t xi : order)
      if ((rep.a_side ? m.partner_of_a(xi) : m.partner_of_b(xi)) == kNone) rep.nets_covered = false;
    if (cfg.check_invariants) {
      m.validate(&g);
      // Free cells of the core must still be coverable by free cells.
      CellSet fa(res.core), fb(res.core), ra(res.core), rb(res.core);
      const Rect inner = res.core.shrunk(m_cap);
      for_each_point(res.core, [&](const IVec& p) {
        int64_t i = w.index(p);
        bool free_a = g.is_a(i) && m.partner_of_a(i) == kNone;
        bool free_b = g.is_b(i) && m.partner_of_b(i) == kNone;
        fa.set(p, free_a);
        fb.set(p, free_b);
        if (inner.contains(p)) {
          ra.set(p, free_a);
          rb.set(p, free_b);
        }
      });
      rep.hall_required = ra.count() + rb.count();
      TranslationGraph local(std::move(fa), std::move(fb), m_cap);
      rep.hall_ok = !hall_deficiency(local, res.core, ra, rb).has_value();
    }
    res.added.push_back(std::move(added));
    res.reports.push_back(rep);
    if (res.aborted) break;
  }
  return res;
}

nlohmann::json baire_report_json(const BaireLevelReport& r) {
  return {{"level", r.level},
          {"radius", r.radius},
          {"horizon", r.horizon},
          {"side", r.a_side ? "a" : "b"},
          {"net_cells", r.net_cells},
          {"already_matched", r.already_matched},
          {"added", r.added},
          {"failures", r.failures},
          {"oracle_repairs", r.oracle_repairs},
          {"posthoc_checked", r.posthoc_checked},
          {"added_sparse", r.added_sparse},
          {"nets_covered", r.nets_covered},
          {"hall_ok", r.hall_ok},
          {"hall_required", r.hall_required},
          {"condition_sum", r.condition_sum},
          {"condition_holds", r.condition_holds}};
}

nlohmann::json hole_report_json(const HoleReport& r) {
  nlohmann::json holes = nlohmann::json::array();
  for (const auto& h : r.holes)
    holes.push_back({{"cells", h.cells.size()}, {"perimeter", h.perimeter}, {"rich", h.rich}, {"infinite", h.infinite}});
  return {{"reference", r.reference.to_vector()},
          {"grid", r.grid},
          {"x1_cells", r.x1.count()},
          {"x2_cells", r.x2.count()},
          {"perimeter_x1", r.perimeter_x1},
          {"rich_threshold", r.rich_threshold},
          {"boundary_partition_ok", r.boundary_partition_ok},
          {"holes", holes}};
}

}  // namespace eqd
