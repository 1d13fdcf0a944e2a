#include <cmath>

#include "doctest.h"
#include "eqd/discrepancy.hpp"
#include "eqd/rng.hpp"

using namespace eqd;

namespace {

CellSet bernoulli(const Rect& r, double p, Rng& rng) {
  CellSet x(r);
  for (int64_t i = 0; i < r.volume(); ++i) x.set_index(i, rng.bernoulli(p));
  return x;
}

CellSet filled(const Rect& r, bool (*f)(const IVec&)) {
  CellSet x(r);
  for_each_point(r, [&](const IVec& p) { x.set(p, f(p)); });
  return x;
}

// Every stride-1 cube counted cell by cell.
double naive_cube_discrepancy(const CellSet& x, double delta, int i, const Rect& w) {
  const int64_t s = int64_t(1) << i;
  IVec span = w.sides;
  for (int j = 0; j < w.dim(); ++j) span[j] -= s - 1;
  double best = 0;
  for_each_point(Rect(w.low, span), [&](const IVec& lo) {
    int64_t c = 0;
    for_each_point(Rect::cube(lo, s), [&](const IVec& p) { c += x.contains(p); });
    best = std::max(best, std::fabs(double(c) - delta * std::pow(double(s), w.dim())));
  });
  return best;
}

int64_t naive_count(const CellSet& x, const CellSet& y) {
  int64_t c = 0;
  for (const auto& p : y.cells()) c += x.contains(p);
  return c;
}

}  // namespace

TEST_CASE("cube discrepancy examples") {
  Rect w(IVec{0, 0}, IVec{16, 16});
  CHECK(cube_discrepancy(CellSet(w), 0.5, 2, w) == 8.0);
  CHECK(cube_discrepancy(filled(w, [](const IVec&) { return true; }), 0.5, 2, w) == 8.0);
  auto checker = filled(w, [](const IVec& p) { return (p[0] + p[1]) % 2 == 0; });
  CHECK(cube_discrepancy(checker, 0.5, 1, w) == 0.0);
  CHECK_THROWS_AS(cube_discrepancy(checker, 0.5, 5, w), ArgumentError);
}

TEST_CASE("summed-area table matches the naive loop") {
  Rng rng(101);
  Rect w(IVec{-16, -16}, IVec{32, 32});
  int agree = 0, total = 0;
  for (int t = 0; t < 100; ++t) {
    auto x = bernoulli(w, rng.uniform(), rng);
    const double delta = rng.uniform();
    for (int i = 0; i <= 5; ++i) {
      ++total;
      agree += std::fabs(cube_discrepancy(x, delta, i, w) - naive_cube_discrepancy(x, delta, i, w)) < 1e-9;
    }
  }
  CHECK(agree == total);
}

TEST_CASE("cube discrepancy complement symmetry") {
  Rng rng(5);
  Rect w(IVec{0, 0, 0}, IVec{16, 16, 16});
  for (int t = 0; t < 10; ++t) {
    auto x = bernoulli(w, 0.3, rng);
    CellSet c(w);
    for (int64_t i = 0; i < w.volume(); ++i) c.set_index(i, !x.at(i));
    for (int i = 0; i <= 4; ++i) CHECK(cube_discrepancy(x, 0.3, i, w) == doctest::Approx(cube_discrepancy(c, 0.7, i, w)));
  }
}

TEST_CASE("rect discrepancy pair") {
  Rng rng(9);
  Rect w(IVec{0, 0}, IVec{64, 64});
  auto a = bernoulli(w, 0.4, rng), b = bernoulli(w, 0.4, rng);
  auto y = random_test_set(w, 0, 1);
  CHECK(rect_discrepancy_pair(a, a, y) == 0);
  CellSet a5(w), b3(w), y8(w);
  for (int i = 0; i < 8; ++i) y8.set(IVec{0, i});
  for (int i = 0; i < 5; ++i) a5.set(IVec{0, i});
  for (int i = 0; i < 3; ++i) b3.set(IVec{0, 7 - i});
  CHECK(rect_discrepancy_pair(a5, b3, y8) == 2);
  int agree = 0;
  for (int t = 0; t < 1000; ++t) {
    IVec lo{rng.range(0, 63), rng.range(0, 63)};
    IVec s{rng.range(1, 64 - lo[0]), rng.range(1, 64 - lo[1])};
    CellSet yr(w);
    for_each_point(Rect(lo, s), [&](const IVec& p) { yr.set(p); });
    int64_t want = 0, ca = 0, cb = 0;
    for (int64_t i = lo[0]; i < lo[0] + s[0]; ++i)
      for (int64_t j = lo[1]; j < lo[1] + s[1]; ++j) {
        ca += a.contains(IVec{i, j});
        cb += b.contains(IVec{i, j});
      }
    want = std::llabs(ca - cb);
    agree += rect_discrepancy_pair(a, b, yr) == want;
  }
  CHECK(agree == 1000);
}

TEST_CASE("density discrepancy") {
  Rect r(IVec{0, 0}, IVec{10, 10});
  CellSet full(r);
  for (int64_t i = 0; i < 100; ++i) full.set_index(i);
  CHECK(density_discrepancy(full, 1.0, r) == 0.0);
  CHECK(density_discrepancy(CellSet(r), 0.3, r) == doctest::Approx(30.0));
  Rect w(IVec{0, 0}, IVec{128, 128});
  const double bound = 4 * std::sqrt(double(w.volume()) * 0.25);
  int within = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng(static_cast<uint64_t>(t), "bernoulli");
    within += density_discrepancy(bernoulli(w, 0.5, rng), 0.5, w) <= bound;
  }
  CHECK(within >= 990);
}

TEST_CASE("laczkovich audit") {
  Rect w(IVec{0, 0}, IVec{64, 64});
  auto striped = filled(w, [](const IVec& p) { return p[1] % 2 == 0; });
  auto s = laczkovich_bound_audit(striped, 0.5, 1000, 3);
  CHECK(s.max_ratio <= 0.5);
  // Brute force over the same samples.
  double brute = 0;
  for (int64_t k = 0; k < 1000; ++k) {
    auto y = random_test_set(w, static_cast<uint64_t>(k), 3);
    brute = std::max(brute, std::fabs(naive_count(striped, y) - 0.5 * y.count()) / perimeter(y));
  }
  CHECK(s.max_ratio == doctest::Approx(brute));
  auto e = laczkovich_bound_audit(CellSet(w), 0.5, 300, 4);
  double best = 0;
  for (int64_t k = 0; k < 300; ++k) {
    auto y = random_test_set(w, static_cast<uint64_t>(k), 4);
    best = std::max(best, 0.5 * double(y.count()) / double(perimeter(y)));
  }
  CHECK(e.max_ratio == doctest::Approx(best));
  CHECK(laczkovich_bound_audit(CellSet(w), 0.5, 300, 4).max_ratio == e.max_ratio);
  CHECK_THROWS_AS(laczkovich_bound_audit(striped, 0.5, 0, 1), ArgumentError);
}

TEST_CASE("profile of random, striped and empty sets") {
  Rect w = Rect::centered(2, 256);
  double mean = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed, "bernoulli");
    auto p = profile(bernoulli(w, 0.5, rng), 0.5, w, 6);
    CHECK(p.max_dev[0] == 0.5);
    mean += p.fitted_exponent / 20;
  }
  CHECK(mean == doctest::Approx(1.0).epsilon(0.2));

  auto striped = filled(w, [](const IVec& p) { return ((p[1] % 2) + 2) % 2 == 0; });
  auto ps = profile(striped, 0.5, w, 6);
  for (size_t i = 0; i < ps.scales.size(); ++i) CHECK(ps.max_dev[i] <= double(ps.scales[i]));
  CHECK(ps.fitted_exponent <= 1.0 + 1e-9);

  auto pe = profile(CellSet(w), 0.5, w, 6);
  CHECK(pe.fitted_exponent == 2.0);
  for (size_t i = 0; i < pe.scales.size(); ++i) CHECK(pe.max_dev[i] == 0.5 * double(pe.scales[i] * pe.scales[i]));
  CHECK_THROWS_AS(profile(CellSet(w), 0.5, w, 9), ArgumentError);
  CHECK(profile_csv(pe).rfind("scale,max_dev\n", 0) == 0);
}

TEST_CASE("summability partial sums") {
  std::vector<double> psi;
  for (int i = 0; i <= 10; ++i) psi.push_back(std::ldexp(1.0, (4 - 3) * i));
  auto b = UniformityBudget::from_psi(0.5, psi);
  for (int i = 0; i <= 10; ++i) CHECK(b.phi[i] == std::ldexp(b.psi[i], i));
  auto r = summability_report(b, 4, 10);
  CHECK(r.psi_partial.back() == doctest::Approx(2.0 - std::ldexp(1.0, -10)));
  CHECK(r.monotone_tail);

  auto c = summability_report(UniformityBudget::from_psi(0.5, std::vector<double>(11, 3.0)), 2, 10);
  for (int i = 0; i <= 10; ++i) CHECK(c.psi_partial[i] == doctest::Approx(3.0 * (i + 1)));
  CHECK_FALSE(c.monotone_tail);
  CHECK_THROWS_AS(summability_report(b, 4, 11), ArgumentError);
}

TEST_CASE("special rectangle subadditivity") {
  Rng rng(77);
  int ok = 0;
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 2;
    const int64_t big = d == 2 ? 32 : 12, n = d == 2 ? 6 : 3;
    Rect w(IVec(d), IVec::filled(d, big + n));
    auto a = bernoulli(w, 0.5, rng), b = bernoulli(w, 0.5, rng);
    IVec e(d);
    for (int j = 0; j < d; ++j) e[j] = rng.range(-n, n);
    auto box = [&](const Rect& r) {
      CellSet y(w);
      if (r.volume() > 0) for_each_point(r, [&](const IVec& p) { y.set(p); });
      return y;
    };
    IVec rs(d);
    for (int j = 0; j < d; ++j) rs[j] = big + e[j];
    int64_t lhs = rect_discrepancy_pair(a, b, box(Rect(IVec(d), rs)));
    int64_t rhs = rect_discrepancy_pair(a, b, box(Rect::cube(IVec(d), big)));
    for (int j = 0; j < d; ++j) {
      if (e[j] == 0) continue;
      IVec lo(d), s = IVec::filled(d, big);
      lo[j] = std::min(big, big + e[j]);
      s[j] = std::llabs(e[j]);
      rhs += rect_discrepancy_pair(a, b, box(Rect(lo, s)));
    }
    int64_t n2 = d * (d * (d - 1) / 2) * n * n;
    for (int j = 0; j < d - 2; ++j) n2 *= big;
    ok += lhs <= rhs + n2;
  }
  CHECK(ok == 1000);
}

TEST_CASE("row slices bound the two-dimensional discrepancy") {
  Rng rng(31);
  Rect w(IVec{0, 0}, IVec{64, 64});
  auto x = bernoulli(w, 0.5, rng);
  for (int i = 0; i <= 5; ++i) {
    double worst_row = 0;
    for (int64_t row = 0; row < 64; ++row) {
      Rect r1(IVec{0}, IVec{64});
      CellSet line(r1);
      for (int64_t c = 0; c < 64; ++c) line.set(IVec{c}, x.contains(IVec{row, c}));
      worst_row = std::max(worst_row, cube_discrepancy(line, 0.5, i, r1));
    }
    CHECK(cube_discrepancy(x, 0.5, i, w) <= std::ldexp(worst_row, i) + 1e-9);
  }
}
