#include "eqd/checks/oracles.hpp"

#include <deque>
#include <map>

namespace eqd::checks {

int64_t brute_perimeter(const CellSet& x) {
  int64_t n = 0;
  for (const auto& c : x.cells())
    for (int j = 0; j < x.dim(); ++j)
      for (int s : {-1, 1}) {
        IVec q = c;
        q.c[j] += s;
        if (!x.contains(q)) ++n;
      }
  return n;
}

int64_t brute_internal_perimeter(const CellSet& x, const Rect& r) {
  int64_t n = 0;
  for (const auto& c : x.cells()) {
    if (!r.contains(c)) continue;
    for (int j = 0; j < x.dim(); ++j)
      for (int s : {-1, 1}) {
        IVec q = c;
        q.c[j] += s;
        if (r.contains(q) && !x.contains(q)) ++n;
      }
  }
  return n;
}

bool loomis_whitney_holds(int64_t perimeter, int64_t size, int d) {
  __int128 lhs = 1, rhs = 1;
  for (int i = 0; i < d; ++i) lhs *= perimeter;
  for (int i = 0; i < d; ++i) rhs *= 2 * d;
  for (int i = 0; i < d - 1; ++i) rhs *= size;
  return lhs >= rhs;
}

ExplicitGraph explicit_graph(const TranslationGraph& g, const Rect& r) {
  ExplicitGraph eg;
  const Rect& w = g.window();
  for_each_point(r, [&](const IVec& p) {
    if (g.is_a(w.index(p))) eg.a.push_back(p);
    if (g.is_b(w.index(p))) eg.b.push_back(p);
  });
  eg.adj.resize(eg.a.size());
  for (size_t i = 0; i < eg.a.size(); ++i)
    for (size_t k = 0; k < eg.b.size(); ++k)
      if (linf_dist(eg.a[i], eg.b[k]) <= g.m_cap()) eg.adj[i].push_back(static_cast<int>(k));
  return eg;
}

bool exhaustive_cover(const TranslationGraph& g, const Rect& r, const CellSet& required_a, const CellSet& required_b) {
  const ExplicitGraph eg = explicit_graph(g, r);
  const size_t na = eg.a.size(), nb = eg.b.size();
  std::vector<std::vector<int>> badj(nb);
  for (size_t i = 0; i < na; ++i)
    for (int k : eg.adj[i]) badj[k].push_back(static_cast<int>(i));
  std::vector<char> used_a(na, 0), used_b(nb, 0), req_a(na, 0), req_b(nb, 0);
  for (size_t i = 0; i < na; ++i) req_a[i] = required_a.contains(eg.a[i]);
  for (size_t k = 0; k < nb; ++k) req_b[k] = required_b.contains(eg.b[k]);
  // Required cells outside R can never be covered.
  for (const auto& c : required_a.cells())
    if (!r.contains(c) || !g.is_a(g.window().index(c))) return false;
  for (const auto& c : required_b.cells())
    if (!r.contains(c) || !g.is_b(g.window().index(c))) return false;
  auto rec = [&](auto&& self) -> bool {
    for (size_t i = 0; i < na; ++i)
      if (req_a[i] && !used_a[i]) {
        for (int k : eg.adj[i])
          if (!used_b[k]) {
            used_a[i] = used_b[k] = 1;
            bool ok = self(self);
            used_a[i] = used_b[k] = 0;
            if (ok) return true;
          }
        return false;
      }
    for (size_t k = 0; k < nb; ++k)
      if (req_b[k] && !used_b[k]) {
        for (int i : badj[k])
          if (!used_a[i]) {
            used_a[i] = used_b[k] = 1;
            bool ok = self(self);
            used_a[i] = used_b[k] = 0;
            if (ok) return true;
          }
        return false;
      }
    return true;
  };
  return rec(rec);
}

int64_t max_flow_matching_size(const TranslationGraph& g, const Rect& r) {
  const ExplicitGraph eg = explicit_graph(g, r);
  const int na = static_cast<int>(eg.a.size()), nb = static_cast<int>(eg.b.size());
  const int s = na + nb, t = s + 1, n = t + 1;
  struct Edge {
    int to, rev, cap;
  };
  std::vector<std::vector<Edge>> net(n);
  auto add = [&](int u, int v) {
    net[u].push_back({v, static_cast<int>(net[v].size()), 1});
    net[v].push_back({u, static_cast<int>(net[u].size()) - 1, 0});
  };
  for (int i = 0; i < na; ++i) add(s, i);
  for (int k = 0; k < nb; ++k) add(na + k, t);
  for (int i = 0; i < na; ++i)
    for (int k : eg.adj[i]) add(i, na + k);
  int64_t flow = 0;
  for (;;) {
    std::vector<std::pair<int, int>> prev(n, {-1, -1});
    std::deque<int> q{s};
    prev[s] = {s, -1};
    while (!q.empty() && prev[t].first < 0) {
      int u = q.front();
      q.pop_front();
      for (size_t e = 0; e < net[u].size(); ++e)
        if (net[u][e].cap > 0 && prev[net[u][e].to].first < 0) {
          prev[net[u][e].to] = {u, static_cast<int>(e)};
          q.push_back(net[u][e].to);
        }
    }
    if (prev[t].first < 0) break;
    for (int v = t; v != s;) {
      auto [u, e] = prev[v];
      net[u][e].cap -= 1;
      net[v][net[u][e].rev].cap += 1;
      v = u;
    }
    ++flow;
  }
  return flow;
}

std::optional<int64_t> shortest_augmenting_length(const TranslationGraph& g, const Rect& r, const Matching& m) {
  const ExplicitGraph eg = explicit_graph(g, r);
  const Rect& w = g.window();
  std::map<IVec, int> a_id, b_id;
  for (size_t i = 0; i < eg.a.size(); ++i) a_id[eg.a[i]] = static_cast<int>(i);
  for (size_t k = 0; k < eg.b.size(); ++k) b_id[eg.b[k]] = static_cast<int>(k);
  std::vector<int> mate_a(eg.a.size(), -1), mate_b(eg.b.size(), -1);
  for (size_t i = 0; i < eg.a.size(); ++i) {
    int32_t p = m.partner_of_a(w.index(eg.a[i]));
    if (p == kNone) continue;
    auto it = b_id.find(w.point(p));
    mate_a[i] = it == b_id.end() ? -2 : it->second;  // -2: matched outside R
    if (it != b_id.end()) mate_b[it->second] = static_cast<int>(i);
  }
  for (size_t k = 0; k < eg.b.size(); ++k)
    if (m.partner_of_b(w.index(eg.b[k])) != kNone && mate_b[k] < 0) mate_b[k] = -2;
  std::vector<int64_t> dist(eg.a.size(), -1);
  std::deque<int> q;
  for (size_t i = 0; i < eg.a.size(); ++i)
    if (mate_a[i] == -1) {
      dist[i] = 0;
      q.push_back(static_cast<int>(i));
    }
  while (!q.empty()) {
    int i = q.front();
    q.pop_front();
    for (int k : eg.adj[i]) {
      if (k == mate_a[i]) continue;
      if (mate_b[k] == -1) return dist[i] + 1;
      if (mate_b[k] >= 0 && dist[mate_b[k]] < 0) {
        dist[mate_b[k]] = dist[i] + 2;
        q.push_back(mate_b[k]);
      }
    }
  }
  return std::nullopt;
}

bool exhaustive_extendable(const TranslationGraph& g, const Matching& m, const IVec& x, const IVec& y, int64_t j,
                           bool x_is_a) {
  const Rect& w = g.window();
  const int mc = g.m_cap();
  const IVec a = x_is_a ? x : y, b = x_is_a ? y : x;
  if (m.partner_of_a(w.index(a)) != kNone || m.partner_of_b(w.index(b)) != kNone) return false;
  const Rect ball(x - IVec::filled(x.dim, j + mc), IVec::filled(x.dim, 2 * (j + mc) + 1));
  const Rect inner(x - IVec::filled(x.dim, j), IVec::filled(x.dim, 2 * j + 1));
  CellSet fa(ball), fb(ball), ra(ball), rb(ball);
  for_each_point(ball, [&](const IVec& p) {
    if (!w.contains(p)) return;
    int64_t i = w.index(p);
    bool free_a = g.is_a(i) && m.partner_of_a(i) == kNone && !(p == a);
    bool free_b = g.is_b(i) && m.partner_of_b(i) == kNone && !(p == b);
    fa.set(p, free_a);
    fb.set(p, free_b);
    ra.set(p, free_a && inner.contains(p));
    rb.set(p, free_b && inner.contains(p));
  });
  TranslationGraph local(fa, fb, mc);
  return exhaustive_cover(local, ball, ra, rb);
}

}  // namespace eqd::checks
