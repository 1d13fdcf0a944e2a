#include "eqd/matching.hpp"

#include <algorithm>
#include <cmath>

#include "eqd/rng.hpp"

namespace eqd {

TranslationGraph::TranslationGraph(CellSet a, CellSet b, int m_cap) : a_(std::move(a)), b_(std::move(b)), m_cap_(m_cap) {
  if (a_.rect() != b_.rect()) throw ArgumentError("A and B must share one window");
  if (m_cap < 0) throw ArgumentError("M must be >= 0");
  offsets_ = offsets_in_ball(a_.dim(), m_cap);
  const auto st = window().strides();
  for (const auto& o : offsets_) {
    int64_t dl = 0;
    for (int j = 0; j < o.dim; ++j) dl += o.c[j] * st[j];
    deltas_.push_back(dl);
  }
}

Matching::Matching(const Rect& window, int m_cap)
    : window_(window),
      m_cap_(m_cap),
      a_to_b_(static_cast<size_t>(window.volume()), kNone),
      b_to_a_(static_cast<size_t>(window.volume()), kNone) {
  if (window.volume() > INT32_MAX) throw ResourceError("window too large for 32-bit cell indices");
}

std::optional<IVec> Matching::offset(const IVec& a) const {
  if (!window_.contains(a)) return std::nullopt;
  int32_t b = a_to_b_[window_.index(a)];
  if (b == kNone) return std::nullopt;
  return window_.point(b) - a;
}

void Matching::add(int64_t a, int64_t b) {
  if (a_to_b_[a] != kNone || b_to_a_[b] != kNone) throw InvariantError("add: endpoint already matched");
  if (linf_dist(window_.point(a), window_.point(b)) > m_cap_) throw InvariantError("add: offset exceeds M");
  a_to_b_[a] = static_cast<int32_t>(b);
  b_to_a_[b] = static_cast<int32_t>(a);
}

void Matching::remove_edge_at_a(int64_t a) {
  int32_t b = a_to_b_[a];
  if (b == kNone) return;
  a_to_b_[a] = kNone;
  b_to_a_[b] = kNone;
}

void Matching::remove_edge_at_b(int64_t b) {
  int32_t a = b_to_a_[b];
  if (a == kNone) return;
  b_to_a_[b] = kNone;
  a_to_b_[a] = kNone;
}

int64_t Matching::size() const {
  int64_t n = 0;
  for (auto x : a_to_b_) n += x != kNone;
  return n;
}

void Matching::validate(const TranslationGraph* g) const {
  if (g && g->window() != window_) throw InvariantError("matching and graph windows differ");
  int64_t forward = 0, backward = 0;
  for (int64_t a = 0; a < static_cast<int64_t>(a_to_b_.size()); ++a) {
    int32_t b = a_to_b_[a];
    if (b == kNone) continue;
    ++forward;
    if (b < 0 || b >= static_cast<int64_t>(b_to_a_.size())) throw InvariantError("partner index out of range");
    if (b_to_a_[b] != a) throw InvariantError("injectivity broken at B-cell " + to_string(window_.point(b)));
    if (linf_dist(window_.point(a), window_.point(b)) > m_cap_)
      throw InvariantError("offset bound broken at A-cell " + to_string(window_.point(a)));
    if (g && !g->is_a(a)) throw InvariantError("matched source is not an A-cell");
    if (g && !g->is_b(b)) throw InvariantError("matched target is not a B-cell");
  }
  for (auto a : b_to_a_) backward += a != kNone;
  if (forward != backward) throw InvariantError("inverse map inconsistent");
}

void SearchScratch::prepare(int64_t volume) {
  if (static_cast<int64_t>(stamp.size()) < 2 * volume) {
    stamp.assign(static_cast<size_t>(2 * volume), 0);
    parent.assign(static_cast<size_t>(2 * volume), kNone);
    layer.assign(static_cast<size_t>(volume), 0);
    gen = 0;
  }
}

uint32_t SearchScratch::next_generation() {
  if (++gen == 0) {
    std::fill(stamp.begin(), stamp.end(), 0);
    gen = 1;
  }
  return gen;
}

namespace detail {

LocalBipartite build_local(const Rect& window, const Rect& region, int m_cap, const std::vector<uint8_t>& left_ok,
                           const std::vector<uint8_t>& right_ok) {
  if (!window.contains(region)) throw ArgumentError("region must lie inside the window");
  const int d = window.dim();
  LocalBipartite g;
  std::vector<int32_t> right_id(static_cast<size_t>(region.volume()), kNone);
  std::vector<IVec> left_pos;
  int64_t rl = 0;
  for_each_point(region, [&](const IVec& p) {
    int64_t wi = window.index(p);
    if (right_ok[wi]) {
      right_id[rl] = static_cast<int32_t>(g.right.size());
      g.right.push_back(static_cast<int32_t>(wi));
    }
    if (left_ok[wi]) {
      g.left.push_back(static_cast<int32_t>(wi));
      left_pos.push_back(p - region.low);
    }
    ++rl;
  });
  const auto offs = offsets_in_ball(d, m_cap);
  const auto rst = region.strides();
  std::vector<int64_t> rdelta;
  for (const auto& o : offs) {
    int64_t dl = 0;
    for (int j = 0; j < d; ++j) dl += o.c[j] * rst[j];
    rdelta.push_back(dl);
  }
  g.start.reserve(g.left.size() + 1);
  g.start.push_back(0);
  for (const IVec& lp : left_pos) {
    int64_t base = 0;
    bool interior = true;
    for (int j = 0; j < d; ++j) {
      base += lp.c[j] * rst[j];
      if (lp.c[j] < m_cap || lp.c[j] + m_cap >= region.sides.c[j]) interior = false;
    }
    for (size_t k = 0; k < offs.size(); ++k) {
      if (!interior) {
        bool ok = true;
        for (int j = 0; j < d; ++j) {
          int64_t q = lp.c[j] + offs[k].c[j];
          if (q < 0 || q >= region.sides.c[j]) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
      }
      int32_t id = right_id[base + rdelta[k]];
      if (id != kNone) g.adj.push_back(id);
    }
    g.start.push_back(static_cast<int64_t>(g.adj.size()));
  }
  return g;
}

void hopcroft_karp(const LocalBipartite& g, std::vector<int32_t>& mate_l, std::vector<int32_t>& mate_r) {
  const int32_t nl = static_cast<int32_t>(g.left.size());
  const int32_t nr = static_cast<int32_t>(g.right.size());
  mate_l.assign(nl, kNone);
  mate_r.assign(nr, kNone);
  const int32_t inf = INT32_MAX;
  std::vector<int32_t> dist(nl), queue, stack;
  std::vector<int64_t> it(nl);
  queue.reserve(nl);
  while (true) {
    queue.clear();
    for (int32_t u = 0; u < nl; ++u) {
      if (mate_l[u] == kNone) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = inf;
      }
    }
    bool found = false;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      int32_t u = queue[qi];
      for (int64_t e = g.start[u]; e < g.start[u + 1]; ++e) {
        int32_t w = mate_r[g.adj[e]];
        if (w == kNone) {
          found = true;
        } else if (dist[w] == inf) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    if (!found) return;
    for (int32_t u = 0; u < nl; ++u) it[u] = g.start[u];
    for (int32_t root = 0; root < nl; ++root) {
      if (mate_l[root] != kNone) continue;
      stack.clear();
      stack.push_back(root);
      while (!stack.empty()) {
        int32_t u = stack.back();
        if (it[u] == g.start[u + 1]) {
          dist[u] = inf;
          stack.pop_back();
          if (!stack.empty()) ++it[stack.back()];
          continue;
        }
        int32_t v = g.adj[it[u]];
        int32_t w = mate_r[v];
        if (w == kNone) {
          for (int32_t x : stack) {
            int32_t y = g.adj[it[x]];
            mate_l[x] = y;
            mate_r[y] = x;
          }
          for (int32_t x : stack) ++it[x];
          break;
        }
        if (dist[w] == dist[u] + 1) {
          stack.push_back(w);
        } else {
          ++it[u];
        }
      }
    }
  }
}

void alternating_reach(const LocalBipartite& g, const std::vector<int32_t>& mate_l, const std::vector<int32_t>& mate_r,
                       int32_t root, std::vector<int32_t>& left_out, std::vector<int32_t>& right_out) {
  std::vector<uint8_t> seen_l(g.left.size(), 0), seen_r(g.right.size(), 0);
  left_out.clear();
  right_out.clear();
  left_out.push_back(root);
  seen_l[root] = 1;
  for (size_t qi = 0; qi < left_out.size(); ++qi) {
    int32_t u = left_out[qi];
    for (int64_t e = g.start[u]; e < g.start[u + 1]; ++e) {
      int32_t v = g.adj[e];
      if (seen_r[v]) continue;
      seen_r[v] = 1;
      right_out.push_back(v);
      int32_t w = mate_r[v];
      if (w != kNone && !seen_l[w]) {
        seen_l[w] = 1;
        left_out.push_back(w);
      }
    }
  }
  (void)mate_l;
}

}  // namespace detail

void rematch_region(const TranslationGraph& g, const Rect& r, Matching& m) {
  const Rect& w = g.window();
  for_each_point(r, [&](const IVec& p) {
    int64_t i = w.index(p);
    m.remove_edge_at_a(i);
    m.remove_edge_at_b(i);
  });
  auto lb = detail::build_local(w, r, g.m_cap(), g.a().data(), g.b().data());
  std::vector<int32_t> ml, mr;
  detail::hopcroft_karp(lb, ml, mr);
  for (size_t u = 0; u < lb.left.size(); ++u)
    if (ml[u] != kNone) m.add(lb.left[u], lb.right[ml[u]]);
}

Matching canonical_max_matching(const TranslationGraph& g, const Rect& r) {
  Matching m(g.window(), g.m_cap());
  rematch_region(g, r, m);
  return m;
}

std::optional<AugmentingPath> bounded_augmenting_path(const TranslationGraph& g, const Rect& r, const Matching& m,
                                                      int64_t max_len, SearchScratch* scratch) {
  if (max_len < 1) return std::nullopt;
  const Rect& w = g.window();
  if (!w.contains(r)) throw ArgumentError("search rect must lie inside the window");
  SearchScratch local;
  SearchScratch& s = scratch ? *scratch : local;
  s.prepare(w.volume());
  const int64_t vol = w.volume();
  s.queue.clear();
  bool free_b = false;
  for_each_point(r, [&](const IVec& p) {
    int64_t i = w.index(p);
    if (g.is_a(i) && m.partner_of_a(i) == kNone) s.queue.push_back(static_cast<int32_t>(i));
    if (g.is_b(i) && m.partner_of_b(i) == kNone) free_b = true;
  });
  if (s.queue.empty() || !free_b) return std::nullopt;
  const uint32_t gen = s.next_generation();
  for (int32_t a : s.queue) {
    s.stamp[a] = gen;
    s.parent[a] = kNone;
    s.layer[a] = 0;
  }
  const int d = w.dim();
  const auto& offs = g.offsets();
  const auto& deltas = g.deltas();
  const int64_t max_layer = (max_len - 1) / 2;
  for (size_t qi = 0; qi < s.queue.size(); ++qi) {
    const int32_t a = s.queue[qi];
    if (s.layer[a] > max_layer) break;
    const IVec pa = w.point(a);
    for (size_t k = 0; k < offs.size(); ++k) {
      bool inside = true;
      for (int j = 0; j < d; ++j) {
        int64_t q = pa.c[j] + offs[k].c[j];
        if (q < r.low.c[j] || q >= r.low.c[j] + r.sides.c[j]) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      const int64_t b = a + deltas[k];
      if (!g.is_b(b) || s.stamp[vol + b] == gen) continue;
      const int32_t mate = m.partner_of_b(b);
      if (mate != kNone && !r.contains(w.point(mate))) continue;
      s.stamp[vol + b] = gen;
      s.parent[vol + b] = a;
      if (mate == kNone) {
        AugmentingPath path;
        int64_t cur_b = b;
        while (true) {
          path.cells.push_back(static_cast<int32_t>(cur_b));
          int32_t ca = s.parent[vol + cur_b];
          path.cells.push_back(ca);
          int32_t pb = s.parent[ca];
          if (pb == kNone) break;
          cur_b = pb;
        }
        std::reverse(path.cells.begin(), path.cells.end());
        return path;
      }
      if (s.stamp[mate] != gen) {
        s.stamp[mate] = gen;
        s.parent[mate] = static_cast<int32_t>(b);
        s.layer[mate] = s.layer[a] + 1;
        s.queue.push_back(mate);
      }
    }
  }
  return std::nullopt;
}

void flip_in_place(const TranslationGraph& g, Matching& m, const AugmentingPath& path) {
  const auto& c = path.cells;
  if (c.size() < 2 || c.size() % 2 != 0) throw ArgumentError("augmenting path must have odd length");
  const Rect& w = g.window();
  const int64_t vol = w.volume();
  for (auto x : c)
    if (x < 0 || x >= vol) throw ArgumentError("path cell outside window");
  if (!g.is_a(c.front()) || m.partner_of_a(c.front()) != kNone) throw ArgumentError("path must start at a free A-cell");
  if (!g.is_b(c.back()) || m.partner_of_b(c.back()) != kNone) throw ArgumentError("path must end at a free B-cell");
  for (size_t i = 0; i + 1 < c.size(); i += 2) {
    if (!g.is_a(c[i]) || !g.is_b(c[i + 1])) throw ArgumentError("path does not alternate A/B");
    if (linf_dist(w.point(c[i]), w.point(c[i + 1])) > g.m_cap()) throw ArgumentError("path edge exceeds M");
    if (m.partner_of_a(c[i]) == c[i + 1]) throw ArgumentError("path uses a matched edge as unmatched");
    if (i + 2 < c.size() && m.partner_of_b(c[i + 1]) != c[i + 2])
      throw ArgumentError("path does not follow the matching");
  }
  for (size_t i = 1; i + 1 < c.size(); i += 2) m.remove_edge_at_b(c[i]);
  for (size_t i = 0; i + 1 < c.size(); i += 2) m.add(c[i], c[i + 1]);
}

Matching flip(const TranslationGraph& g, const Matching& m, const AugmentingPath& path) {
  Matching out = m;
  flip_in_place(g, out, path);
  return out;
}

namespace {
std::vector<uint8_t> mask_of(const CellSet& req, const CellSet& kind, const Rect& r, const Rect& window,
                             const char* what) {
  std::vector<uint8_t> mask(static_cast<size_t>(window.volume()), 0);
  for (const auto& p : req.cells()) {
    if (!r.contains(p)) throw ArgumentError(std::string(what) + " cell outside R");
    int64_t i = window.index(p);
    if (!kind.at(i)) throw ArgumentError(std::string(what) + " cell is not a vertex of that part");
    mask[i] = 1;
  }
  return mask;
}
}  // namespace

std::optional<HallCertificate> hall_deficiency(const TranslationGraph& g, const Rect& r, const CellSet& required_a,
                                               const CellSet& required_b) {
  const Rect& w = g.window();
  if (!w.contains(r)) throw ArgumentError("R must lie inside the window");
  // A matching covering both sides exists iff each side can be covered on its
  // own (Mendelsohn-Dulmage), so the two one-sided problems are solved apart.
  for (int side = 0; side < 2; ++side) {
    const bool a_side = side == 0;
    std::vector<uint8_t> left = a_side ? mask_of(required_a, g.a(), r, w, "required_a")
                                       : mask_of(required_b, g.b(), r, w, "required_b");
    auto lb = detail::build_local(w, r, g.m_cap(), left, a_side ? g.b().data() : g.a().data());
    std::vector<int32_t> ml, mr;
    detail::hopcroft_karp(lb, ml, mr);
    for (size_t u = 0; u < lb.left.size(); ++u) {
      if (ml[u] != kNone) continue;
      std::vector<int32_t> lo, ro;
      detail::alternating_reach(lb, ml, mr, static_cast<int32_t>(u), lo, ro);
      HallCertificate cert;
      cert.a_side = a_side;
      for (auto x : lo) cert.set.push_back(w.point(lb.left[x]));
      for (auto y : ro) cert.neighbours.push_back(w.point(lb.right[y]));
      std::sort(cert.set.begin(), cert.set.end());
      std::sort(cert.neighbours.begin(), cert.neighbours.end());
      return cert;
    }
  }
  return std::nullopt;
}

ExpansionAudit expansion_audit(const TranslationGraph& g, const Rect& r, int64_t sample_sets, uint64_t seed) {
  if (r.balance() > 3.0) throw ArgumentError("expansion audit needs a 3-balanced rect");
  const Rect& w = g.window();
  const int d = w.dim();
  std::vector<int64_t> a_cells;
  int64_t nb = 0;
  for_each_point(r, [&](const IVec& p) {
    int64_t i = w.index(p);
    if (g.is_a(i)) a_cells.push_back(i);
    nb += g.is_b(i);
  });
  ExpansionAudit out;
  out.min_margin = std::numeric_limits<double>::infinity();
  if (a_cells.empty()) return out;
  Rng rng(seed, "samplers");
  const auto& offs = g.offsets();
  std::vector<uint8_t> in_x(static_cast<size_t>(w.volume()), 0), in_gamma(static_cast<size_t>(w.volume()), 0);
  for (int64_t s = 0; s < sample_sets; ++s) {
    const int64_t target = rng.range(1, std::min<int64_t>(static_cast<int64_t>(a_cells.size()), 256));
    std::vector<int64_t> x{a_cells[rng.range(0, static_cast<int64_t>(a_cells.size()) - 1)]};
    in_x[x[0]] = 1;
    for (int64_t attempts = 0; static_cast<int64_t>(x.size()) < target && attempts < 50 * target; ++attempts) {
      IVec p = w.point(x[rng.range(0, static_cast<int64_t>(x.size()) - 1)]) + offs[rng.range(0, offs.size() - 1)];
      if (!r.contains(p)) continue;
      int64_t i = w.index(p);
      if (g.is_a(i) && !in_x[i]) {
        in_x[i] = 1;
        x.push_back(i);
      }
    }
    std::vector<int64_t> gamma;
    for (int64_t a : x) {
      IVec p = w.point(a);
      for (const auto& o : offs) {
        IVec q = p + o;
        if (!r.contains(q)) continue;
        int64_t i = w.index(q);
        if (g.is_b(i) && !in_gamma[i]) {
          in_gamma[i] = 1;
          gamma.push_back(i);
        }
      }
    }
    const double sz = static_cast<double>(x.size());
    const double need = std::min(sz + 10.0 * d * std::pow(sz, double(d - 1) / d), nb / 2.0);
    ExpansionSample es{static_cast<int64_t>(x.size()), static_cast<int64_t>(gamma.size()),
                       static_cast<double>(gamma.size()) - need};
    out.min_margin = std::min(out.min_margin, es.margin);
    out.samples.push_back(es);
    for (auto a : x) in_x[a] = 0;
    for (auto b : gamma) in_gamma[b] = 0;
  }
  return out;
}

}  // namespace eqd

namespace eqd {

int64_t offset_index(const IVec& o, int m_cap) {
  int64_t idx = 0;
  for (int j = 0; j < o.dim; ++j) {
    if (o.c[j] < -m_cap || o.c[j] > m_cap) throw ArgumentError("offset outside [-M, M]^d");
    idx = idx * (2 * m_cap + 1) + (o.c[j] + m_cap);
  }
  return idx;
}

IVec offset_from_index(int64_t idx, int d, int m_cap) {
  IVec o(d);
  const int64_t base = 2 * m_cap + 1;
  for (int j = d - 1; j >= 0; --j) {
    o.c[j] = idx % base - m_cap;
    idx /= base;
  }
  return o;
}

}  // namespace eqd
