#include <set>

#include "doctest.h"
#include "eqd/checks/oracles.hpp"
#include "eqd/lattice.hpp"
#include "eqd/rng.hpp"

using namespace eqd;

namespace {

CellSet cells(std::initializer_list<IVec> v) { return CellSet::from_cells(std::vector<IVec>(v)); }

CellSet random_subset(const Rect& r, double p, Rng& rng) {
  CellSet x(r);
  for (int64_t i = 0; i < r.volume(); ++i) x.set_index(i, rng.bernoulli(p));
  return x;
}

}  // namespace

TEST_CASE("perimeter examples") {
  CHECK(perimeter(cells({IVec{0, 0}})) == 4);
  CellSet r(Rect(IVec{0, 0}, IVec{2, 3}));
  for (int64_t i = 0; i < 6; ++i) r.set_index(i);
  CHECK(perimeter(r) == 10);
  auto tromino = cells({IVec{0, 0}, IVec{1, 0}, IVec{1, 1}});
  CHECK(perimeter(tromino) == checks::brute_perimeter(tromino));
  CHECK(perimeter(tromino) == 8);
  auto b = boundary(tromino);
  CHECK(b.size() == 8);
  for (const auto& e : b) {
    CHECK(tromino.contains(e.inside));
    CHECK_FALSE(tromino.contains(e.outside));
    CHECK(linf_dist(e.inside, e.outside) == 1);
  }
}

TEST_CASE("perimeter matches brute force on random sets") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    int d = 2 + t % 2;
    auto x = random_subset(Rect(IVec(d), IVec::filled(d, 5)), 0.4, rng);
    CHECK(perimeter(x) == checks::brute_perimeter(x));
  }
}

TEST_CASE("internal boundary examples") {
  Rect r(IVec{0, 0}, IVec{5, 5});
  CellSet full(r);
  for (int64_t i = 0; i < 25; ++i) full.set_index(i);
  CHECK(internal_boundary(full, r) == 0);
  CellSet center(r);
  center.set(IVec{2, 2});
  CHECK(internal_boundary(center, r) == 4);
  CellSet corner(r);
  corner.set(IVec{0, 0});
  CHECK(internal_boundary(corner, r) == 2);
  CellSet outside(Rect(IVec{0, 0}, IVec{6, 6}));
  outside.set(IVec{5, 5});
  CHECK_THROWS_AS(internal_boundary(outside, r), ArgumentError);
}

TEST_CASE("isoperimetry examples") {
  auto one = isoperimetry_check(cells({IVec{0, 0}}));
  CHECK(one.perimeter == 4);
  CHECK(one.bound == doctest::Approx(4.0));
  CHECK(one.ok);
  auto sq = isoperimetry_check(cells({IVec{0, 0}, IVec{0, 1}, IVec{1, 0}, IVec{1, 1}}));
  CHECK(sq.perimeter == 8);
  CHECK(sq.bound == doctest::Approx(8.0));
  CHECK(sq.ok);
  CHECK_THROWS_AS(isoperimetry_check(CellSet(Rect(IVec{0, 0}, IVec{2, 2}))), ArgumentError);
}

TEST_CASE("isoperimetry holds on every subset of 3x3") {
  Rect r(IVec{0, 0}, IVec{3, 3});
  int ok = 0;
  for (int mask = 1; mask < 512; ++mask) {
    CellSet x(r);
    for (int i = 0; i < 9; ++i) x.set_index(i, (mask >> i) & 1);
    auto res = isoperimetry_check(x);
    bool exact = checks::loomis_whitney_holds(checks::brute_perimeter(x), x.count(), 2);
    ok += res.ok && exact && res.perimeter == checks::brute_perimeter(x);
  }
  CHECK(ok == 511);
}

TEST_CASE("ell components examples") {
  auto two = cells({IVec{0, 0}, IVec{5, 5}});
  CHECK(ell_components(two, 4).classes.size() == 2);
  CHECK(ell_components(two, 5).classes.size() == 1);
  CellSet ring(Rect(IVec{0, 0}, IVec{9, 9}));
  for_each_point(ring.rect(), [&](const IVec& p) {
    if (p[0] == 0 || p[0] == 8 || p[1] == 0 || p[1] == 8) ring.set(p);
  });
  auto comp = ell_components(ring, 1);
  REQUIRE(comp.classes.size() == 1);
  CHECK(comp.classes[0].size() == 32);
  CHECK(comp.representatives[0] == IVec{0, 0});
  CHECK(ell_components(CellSet(Rect(IVec{0, 0}, IVec{3, 3})), 1).classes.empty());
}

TEST_CASE("ell components agree with a union-find oracle") {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const int64_t ell = 1 + t % 3;
    auto x = random_subset(Rect(IVec{0, 0}, IVec{12, 12}), 0.15, rng);
    auto cs = x.cells();
    std::vector<size_t> parent(cs.size());
    for (size_t i = 0; i < cs.size(); ++i) parent[i] = i;
    auto find = [&](size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (size_t i = 0; i < cs.size(); ++i)
      for (size_t j = i + 1; j < cs.size(); ++j)
        if (linf_dist(cs[i], cs[j]) <= ell) parent[find(i)] = find(j);
    std::set<size_t> roots;
    for (size_t i = 0; i < cs.size(); ++i) roots.insert(find(i));
    auto comp = ell_components(x, ell);
    CHECK(comp.classes.size() == roots.size());
    for (const auto& cl : comp.classes)
      for (const auto& c : cl) CHECK(find(std::find(cs.begin(), cs.end(), c) - cs.begin()) ==
                                     find(std::find(cs.begin(), cs.end(), cl[0]) - cs.begin()));
    for (size_t i = 1; i < comp.representatives.size(); ++i)
      CHECK(comp.representatives[i - 1] < comp.representatives[i]);
  }
}

TEST_CASE("dist_ball examples") {
  auto one = cells({IVec{4, 4}});
  CHECK(same_cells(dist_ball(one, 0), one));
  auto b1 = dist_ball(one, 1);
  CHECK(b1.count() == 9);
  auto two = cells({IVec{0, 0}, IVec{3, 0}});
  CHECK(dist_ball(two, 1).count() == 18);
  Rng rng(2);
  auto x = random_subset(Rect(IVec{0, 0}, IVec{6, 6}), 0.1, rng);
  if (!x.empty()) {
    auto b = dist_ball(x, 2);
    auto xs = x.cells();
    for_each_point(x.rect().grown(3), [&](const IVec& p) {
      bool near = false;
      for (const auto& c : xs) near = near || linf_dist(p, c) <= 2;
      CHECK(b.contains(p) == near);
    });
  }
}

TEST_CASE("rect tree with aligned grid has no special nodes") {
  auto t = build_rect_tree(Rect::cube(IVec{0, 0}, 16), IVec{32, -64}, 4);
  CHECK(t.h == 2);
  for (int l = 0; l <= t.h; ++l)
    for (const auto& n : t.levels[l]) {
      CHECK_FALSE(n.special);
      CHECK(n.rect.sides == IVec::filled(2, 16 >> l));
    }
}

TEST_CASE("rect tree merge trace") {
  auto t = build_rect_tree(Rect::cube(IVec{0, 0}, 8), IVec{1, 1}, 2);
  for (int j = 0; j < 2; ++j) CHECK(t.intervals[j] == std::vector<int64_t>{1, 2, 2, 3});
  std::set<int64_t> sides;
  for (const auto& n : t.basic())
    for (int j = 0; j < 2; ++j) sides.insert(n.rect.sides[j]);
  CHECK(sides == std::set<int64_t>{1, 2, 3});
}

TEST_CASE("rect tree side bounds and tiling over random offsets") {
  Rng rng(23);
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 2;
    const int64_t n_prev = int64_t(1) << rng.range(1, 3);
    const int64_t n = n_prev << rng.range(1, 3);
    IVec low(d), origin(d);
    for (int j = 0; j < d; ++j) {
      low[j] = rng.range(-40, 40);
      origin[j] = rng.range(-40, 40);
    }
    Rect root = Rect::cube(low, n);
    auto tree = build_rect_tree(root, origin, n_prev);
    bool ok = true;
    for (int l = 0; l <= tree.h; ++l) {
      const int64_t nominal = (int64_t(1) << (tree.h - l)) * n_prev;
      int64_t vol = 0;
      for (const auto& node : tree.levels[l]) {
        vol += node.rect.volume();
        ok = ok && root.contains(node.rect) && node.rect.balance() <= 3.0;
        for (int j = 0; j < d; ++j) {
          ok = ok && 2 * node.rect.sides[j] >= 2 * nominal - n_prev;
          ok = ok && 2 * node.rect.sides[j] <= 2 * nominal + n_prev;
        }
      }
      ok = ok && vol == root.volume();
    }
    // Basic rectangles tile the root: every cell covered once.
    std::vector<int> cover(static_cast<size_t>(root.volume()), 0);
    for (const auto& node : tree.basic()) for_each_point(node.rect, [&](const IVec& p) { ++cover[root.index(p)]; });
    for (int c : cover) ok = ok && c == 1;
    CHECK(ok);
  }
  CHECK_THROWS_AS(build_rect_tree(Rect::cube(IVec{0, 0}, 12), IVec{0, 0}, 4), ArgumentError);
}

TEST_CASE("boundary splits over complement components") {
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    auto x = random_subset(Rect(IVec{0, 0}, IVec{8, 8}), 0.5, rng);
    if (x.empty()) continue;
    Rect big = x.rect().grown(1);
    CellSet comp(big);
    for_each_point(big, [&](const IVec& p) { comp.set(p, !x.contains(p)); });
    auto holes = ell_components(comp, 1);
    std::vector<int64_t> per(holes.classes.size(), 0);
    for (const auto& e : boundary(x)) ++per[holes.label[big.index(e.outside)]];
    int64_t total = 0;
    for (auto v : per) total += v;
    CHECK(total == perimeter(x));
  }
}
