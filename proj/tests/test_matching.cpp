#include <cmath>

#include "doctest.h"
#include "eqd/checks/oracles.hpp"
#include "eqd/matching.hpp"
#include "eqd/rng.hpp"

using namespace eqd;

namespace {

TranslationGraph random_graph(const Rect& w, double pa, double pb, int m, Rng& rng) {
  CellSet a(w), b(w);
  for (int64_t i = 0; i < w.volume(); ++i) {
    a.set_index(i, rng.bernoulli(pa));
    b.set_index(i, rng.bernoulli(pb));
  }
  return TranslationGraph(a, b, m);
}

TranslationGraph graph_of(const Rect& w, std::initializer_list<IVec> a, std::initializer_list<IVec> b, int m) {
  CellSet sa(w), sb(w);
  for (const auto& p : a) sa.set(p);
  for (const auto& p : b) sb.set(p);
  return TranslationGraph(sa, sb, m);
}

// Random partial matching by greedy scan in a shuffled order.
Matching random_matching(const TranslationGraph& g, const Rect& r, Rng& rng) {
  const Rect& w = g.window();
  Matching m(w, g.m_cap());
  std::vector<int64_t> as;
  for_each_point(r, [&](const IVec& p) {
    if (g.is_a(w.index(p))) as.push_back(w.index(p));
  });
  for (size_t i = as.size(); i > 1; --i) std::swap(as[i - 1], as[rng.range(0, int64_t(i) - 1)]);
  for (auto a : as) {
    if (!rng.bernoulli(0.6)) continue;
    for (const auto& o : g.offsets()) {
      IVec q = w.point(a) + o;
      if (!r.contains(q)) continue;
      int64_t b = w.index(q);
      if (g.is_b(b) && m.partner_of_b(b) == kNone) {
        m.add(a, b);
        break;
      }
    }
  }
  return m;
}

}  // namespace

TEST_CASE("translation graph degree bound") {
  Rng rng(1);
  Rect w(IVec{0, 0}, IVec{10, 10});
  auto g = random_graph(w, 1.0, 1.0, 2, rng);
  CHECK(g.offsets().size() == 25);
  CHECK(g.offsets().front() == IVec{-2, -2});
  CHECK(g.offsets().back() == IVec{2, 2});
}

TEST_CASE("matching invariants are enforced") {
  Rect w(IVec{0, 0}, IVec{4, 4});
  auto g = graph_of(w, {IVec{0, 0}, IVec{0, 1}}, {IVec{1, 1}, IVec{3, 3}}, 1);
  Matching m(w, 1);
  m.add(w.index(IVec{0, 0}), w.index(IVec{1, 1}));
  CHECK_NOTHROW(m.validate(&g));
  CHECK(m.offset(IVec{0, 0}) == IVec{1, 1});
  CHECK_FALSE(m.offset(IVec{0, 1}).has_value());
  CHECK_THROWS(m.add(w.index(IVec{0, 1}), w.index(IVec{1, 1})));
  Matching far(w, 1);
  CHECK_THROWS(far.add(w.index(IVec{0, 0}), w.index(IVec{3, 3})));
  Matching wrong_side(w, 1);
  wrong_side.add(w.index(IVec{0, 1}), w.index(IVec{0, 0}));  // B endpoint is not a B cell
  CHECK_THROWS_AS(wrong_side.validate(&g), InvariantError);
}

TEST_CASE("canonical max matching examples") {
  Rect w(IVec{0, 0}, IVec{5, 5});
  auto empty = graph_of(w, {}, {}, 1);
  CHECK(canonical_max_matching(empty, w).size() == 0);
  auto one = graph_of(w, {IVec{2, 2}}, {IVec{2, 2}}, 0);
  auto m = canonical_max_matching(one, w);
  CHECK(m.size() == 1);
  CHECK(m.offset(IVec{2, 2}) == IVec{0, 0});
}

TEST_CASE("canonical max matching size equals max flow") {
  Rng rng(2024);
  Rect w(IVec{0, 0}, IVec{12, 12});
  int agree = 0;
  for (int t = 0; t < 1000; ++t) {
    auto g = random_graph(w, rng.uniform() * 0.5, rng.uniform() * 0.5, 2, rng);
    auto m = canonical_max_matching(g, w);
    m.validate(&g);
    agree += m.size() == checks::max_flow_matching_size(g, w);
  }
  CHECK(agree == 1000);
}

TEST_CASE("canonical max matching is translation covariant") {
  Rng rng(3);
  Rect w(IVec{0, 0}, IVec{24, 24});
  auto g = random_graph(w, 0.3, 0.3, 2, rng);
  Rect r1(IVec{2, 3}, IVec{9, 11});
  IVec shift{7, 5};
  // Second window holds the same content as r1 at r1 + shift.
  CellSet a2(w), b2(w);
  for_each_point(r1, [&](const IVec& p) {
    a2.set(p + shift, g.a().contains(p));
    b2.set(p + shift, g.b().contains(p));
  });
  TranslationGraph g2(a2, b2, 2);
  auto m1 = canonical_max_matching(g, r1);
  auto m2 = canonical_max_matching(g2, r1.translated(shift));
  for_each_point(r1, [&](const IVec& p) { CHECK(m1.offset(p) == m2.offset(p + shift)); });
}

TEST_CASE("bounded augmenting path examples") {
  Rect w(IVec{0, 0}, IVec{3, 3});
  auto g = graph_of(w, {IVec{0, 0}}, {IVec{0, 1}}, 1);
  Matching m(w, 1);
  auto p = bounded_augmenting_path(g, w, m, 5);
  REQUIRE(p.has_value());
  CHECK(p->length() == 1);
  auto full = canonical_max_matching(g, w);
  CHECK_FALSE(bounded_augmenting_path(g, w, full, 100).has_value());
}

TEST_CASE("bounded augmenting path agrees with uncapped BFS") {
  Rng rng(55);
  Rect w(IVec{0, 0}, IVec{10, 10});
  int agree = 0;
  for (int t = 0; t < 1000; ++t) {
    const int mc = 1 + t % 2;
    auto g = random_graph(w, 0.35, 0.35, mc, rng);
    auto m = random_matching(g, w, rng);
    const int64_t cap = rng.range(1, 15);
    auto oracle = checks::shortest_augmenting_length(g, w, m);
    auto got = bounded_augmenting_path(g, w, m, cap);
    bool want_present = oracle && *oracle <= cap;
    bool ok = got.has_value() == want_present;
    if (ok && got) ok = got->length() == *oracle;
    agree += ok;
  }
  CHECK(agree == 1000);
}

TEST_CASE("flip") {
  Rect w(IVec{0, 0}, IVec{1, 4});
  // a0 - b0 = a1 - b1 in a row, M = 1.
  auto g = graph_of(w, {IVec{0, 0}, IVec{0, 2}}, {IVec{0, 1}, IVec{0, 3}}, 1);
  Matching m(w, 1);
  auto len1 = flip(g, m, AugmentingPath{{0, 1}});
  CHECK(len1.size() == 1);
  Matching mid(w, 1);
  mid.add(2, 1);
  auto len3 = flip(g, mid, AugmentingPath{{0, 1, 2, 3}});
  CHECK(len3.size() == 2);
  CHECK(len3.partner_of_a(0) == 1);
  CHECK(len3.partner_of_a(2) == 3);
  CHECK_THROWS_AS(flip(g, mid, AugmentingPath{{2, 3}}), ArgumentError);
  CHECK_THROWS_AS(flip(g, m, AugmentingPath{{0, 1, 2}}), ArgumentError);
}

TEST_CASE("random flip sequences grow the matching by one each") {
  Rng rng(8);
  Rect w(IVec{0, 0}, IVec{10, 10});
  for (int t = 0; t < 100; ++t) {
    auto g = random_graph(w, 0.4, 0.4, 1, rng);
    auto m = random_matching(g, w, rng);
    const int64_t start = m.size();
    int64_t k = 0;
    while (auto p = bounded_augmenting_path(g, w, m, 1000)) {
      m = flip(g, m, *p);
      ++k;
      m.validate(&g);
    }
    CHECK(m.size() == start + k);
    CHECK(m.size() == checks::max_flow_matching_size(g, w));
  }
}

TEST_CASE("hall deficiency examples") {
  Rect w(IVec{0, 0}, IVec{1, 3});
  auto g = graph_of(w, {IVec{0, 0}, IVec{0, 2}}, {IVec{0, 1}}, 1);
  CHECK_FALSE(hall_deficiency(g, w, CellSet(w), CellSet(w)).has_value());
  auto cert = hall_deficiency(g, w, g.a(), CellSet(w));
  REQUIRE(cert.has_value());
  CHECK(cert->a_side);
  CHECK(cert->set.size() == 2);
  CHECK(cert->neighbours.size() == 1);
}

TEST_CASE("hall deficiency agrees with exhaustive enumeration") {
  Rng rng(77);
  Rect w(IVec{0, 0}, IVec{10, 10});
  int done = 0, agree = 0;
  while (done < 1000) {
    CellSet a(w), b(w);
    const int na = static_cast<int>(rng.range(1, 4)), nb = static_cast<int>(rng.range(1, 4));
    for (int i = 0; i < na; ++i) a.set(IVec{rng.range(0, 9), rng.range(0, 9)});
    for (int i = 0; i < nb; ++i) b.set(IVec{rng.range(0, 9), rng.range(0, 9)});
    TranslationGraph g(a, b, 2);
    auto eg = checks::explicit_graph(g, w);
    size_t edges = 0;
    for (const auto& l : eg.adj) edges += l.size();
    if (edges > 12) continue;
    CellSet ra(w), rb(w);
    for (const auto& p : a.cells()) ra.set(p, rng.bernoulli(0.7));
    for (const auto& p : b.cells()) rb.set(p, rng.bernoulli(0.7));
    ++done;
    auto cert = hall_deficiency(g, w, ra, rb);
    bool feasible = checks::exhaustive_cover(g, w, ra, rb);
    bool ok = cert.has_value() != feasible;
    if (cert) ok = ok && cert->neighbours.size() < cert->set.size();
    agree += ok;
  }
  CHECK(agree == 1000);
}

TEST_CASE("expansion audit on a complete graph") {
  Rect w(IVec{0, 0}, IVec{6, 6});
  Rng rng(10);
  auto g = random_graph(w, 0.05, 1.0, 6, rng);
  if (g.a().count() > 0) {
    auto au = expansion_audit(g, w, 50, 1);
    for (const auto& s : au.samples) {
      CHECK(s.size >= 1);
      CHECK(s.neighbourhood == 36);
      const double need = s.size + 20.0 * std::sqrt(double(s.size));
      if (36 >= 2 * need) CHECK(s.margin >= 0);
    }
  }
  CHECK_THROWS_AS(expansion_audit(g, Rect(IVec{0, 0}, IVec{1, 6}), 5, 1), ArgumentError);
}

TEST_CASE("offset index round trip") {
  for (int m = 0; m <= 3; ++m) {
    auto offs = offsets_in_ball(2, m);
    for (size_t i = 0; i < offs.size(); ++i) {
      CHECK(offset_index(offs[i], m) == int64_t(i));
      CHECK(offset_from_index(int64_t(i), 2, m) == offs[i]);
    }
  }
}
