#include "eqd/checks/suites.hpp"

#include <chrono>
#include <cmath>

#include "eqd/baire.hpp"
#include "eqd/checks/oracles.hpp"
#include "eqd/lebesgue.hpp"
#include "eqd/rng.hpp"

namespace eqd::checks {

namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
  Clock::time_point t0 = Clock::now();
  double seconds() const { return std::chrono::duration<double>(Clock::now() - t0).count(); }
};

CellSet random_cells(const Rect& r, double p, Rng& rng) {
  CellSet s(r);
  for (int64_t i = 0; i < r.volume(); ++i) s.set_index(i, rng.bernoulli(p));
  return s;
}

// Random partial matching: A-cells in random order grab a random free neighbour.
Matching random_matching(const TranslationGraph& g, const Rect& r, double q, Rng& rng) {
  const Rect& w = g.window();
  Matching m(w, g.m_cap());
  std::vector<int64_t> as;
  for_each_point(r, [&](const IVec& p) {
    if (g.is_a(w.index(p))) as.push_back(w.index(p));
  });
  for (size_t i = as.size(); i > 1; --i) std::swap(as[i - 1], as[static_cast<size_t>(rng.range(0, int64_t(i) - 1))]);
  for (int64_t a : as) {
    if (!rng.bernoulli(q)) continue;
    std::vector<int64_t> nb;
    for (const auto& o : g.offsets()) {
      IVec p = w.point(a) + o;
      if (!r.contains(p)) continue;
      int64_t b = w.index(p);
      if (g.is_b(b) && m.partner_of_b(b) == kNone) nb.push_back(b);
    }
    if (!nb.empty()) m.add(a, nb[static_cast<size_t>(rng.range(0, int64_t(nb.size()) - 1))]);
  }
  return m;
}

SuiteResult finish(SuiteResult r, const Timer& t) {
  r.pass = r.violations == 0 && r.cases > 0;
  r.seconds = t.seconds();
  return r;
}

}  // namespace

SuiteResult suite_isoperimetry(uint64_t seed, int64_t random_cases) {
  Timer t;
  SuiteResult r;
  r.name = "isoperimetry";
  const Rect sq(IVec{0, 0}, IVec{3, 3});
  for (int mask = 1; mask < 512; ++mask) {
    CellSet x(sq);
    for (int i = 0; i < 9; ++i) x.set_index(i, (mask >> i) & 1);
    const int64_t p = brute_perimeter(x);
    ++r.cases;
    if (!loomis_whitney_holds(p, x.count(), 2) || perimeter(x) != p || !isoperimetry_check(x).ok) ++r.violations;
  }
  Rng rng(seed, "isoperimetry");
  const Rect cube(IVec{0, 0, 0}, IVec{4, 4, 4});
  for (int64_t c = 0; c < random_cases; ++c) {
    CellSet x = random_cells(cube, rng.uniform(), rng);
    if (x.empty()) x.set_index(rng.range(0, 63));
    const int64_t p = brute_perimeter(x);
    ++r.cases;
    if (!loomis_whitney_holds(p, x.count(), 3) || perimeter(x) != p || !isoperimetry_check(x).ok) ++r.violations;
  }
  r.detail = "511 subsets of 3x3 and " + std::to_string(random_cases) + " random subsets of 4^3";
  return finish(r, t);
}

SuiteResult suite_internal_perimeter(uint64_t seed, int64_t cases) {
  Timer t;
  SuiteResult r;
  r.name = "internal_perimeter";
  Rng rng(seed, "internal_perimeter");
  while (r.cases < cases) {
    const int d = rng.bernoulli(0.5) ? 2 : 3;
    const int64_t s0 = rng.range(1, d == 2 ? 8 : 5);
    IVec sides(d), low(d);
    for (int j = 0; j < d; ++j) {
      sides.c[j] = rng.range(s0, 3 * s0);
      low.c[j] = rng.range(-5, 5);
    }
    const Rect rr(low, sides);
    CellSet x(rr);
    switch (rng.range(0, 2)) {
      case 0:
        x = random_cells(rr, rng.uniform(), rng);
        break;
      case 1: {  // sub-box
        IVec lo(d), sd(d);
        for (int j = 0; j < d; ++j) {
          sd.c[j] = rng.range(1, rr.sides.c[j]);
          lo.c[j] = rr.low.c[j] + rng.range(0, rr.sides.c[j] - sd.c[j]);
        }
        for_each_point(Rect(lo, sd), [&](const IVec& p) { x.set(p); });
        break;
      }
      default: {  // nearly full
        for (int64_t i = 0; i < rr.volume(); ++i) x.set_index(i, !rng.bernoulli(0.1));
      }
    }
    if (x.empty()) continue;
    ++r.cases;
    const int64_t p = brute_perimeter(x);
    const int64_t pr = brute_internal_perimeter(x, rr);
    if (pr != internal_boundary(x, rr)) {
      ++r.violations;
      continue;
    }
    // pr >= p / (3 d rho) * |R \ X| / |R| with rho = max side / min side.
    const __int128 lhs = __int128(pr) * 3 * d * rr.max_side() * rr.volume();
    const __int128 rhs = __int128(p) * (rr.volume() - x.count()) * rr.min_side();
    if (lhs < rhs) ++r.violations;
  }
  r.detail = "random (R, X), d in {2,3}, balance <= 3";
  return finish(r, t);
}

SuiteResult suite_short_aug(uint64_t seed, int64_t cases) {
  Timer t;
  SuiteResult r;
  r.name = "short_aug";
  Rng rng(seed, "short_aug");
  SearchScratch scratch;
  for (int64_t c = 0; c < cases; ++c) {
    const Rect rr(IVec{0, 0}, IVec{10, 10});
    const int mc = static_cast<int>(rng.range(1, 2));
    TranslationGraph g(random_cells(rr, 0.1 + 0.5 * rng.uniform(), rng), random_cells(rr, 0.1 + 0.5 * rng.uniform(), rng),
                       mc);
    Matching m = random_matching(g, rr, 0.3 + 0.7 * rng.uniform(), rng);
    const auto want = shortest_augmenting_length(g, rr, m);
    const int64_t cap = rng.range(1, 40);
    ++r.cases;
    for (int64_t len : {cap, int64_t(1) << 30}) {
      auto got = bounded_augmenting_path(g, rr, m, len, &scratch);
      const bool expect = want && *want <= len;
      if (expect != got.has_value() || (got && got->length() != *want)) {
        ++r.violations;
        break;
      }
      if (got) {
        Matching f = flip(g, m, *got);
        if (f.size() != m.size() + 1) ++r.violations;
      }
    }
  }
  r.detail = "10x10 rects, M in {1,2}, random partial matchings";
  return finish(r, t);
}

SuiteResult suite_hall(uint64_t seed, int64_t cases) {
  Timer t;
  SuiteResult r;
  r.name = "hall";
  Rng rng(seed, "hall");
  while (r.cases < cases) {
    const Rect rr(IVec{0, 0}, IVec{rng.range(2, 4), rng.range(2, 4)});
    TranslationGraph g(random_cells(rr, rng.uniform(), rng), random_cells(rr, rng.uniform(), rng), 1);
    const ExplicitGraph eg = explicit_graph(g, rr);
    int64_t edges = 0;
    for (const auto& l : eg.adj) edges += static_cast<int64_t>(l.size());
    if (edges > 12) continue;
    CellSet ra(rr), rb(rr);
    for (const auto& p : eg.a) ra.set(p, rng.bernoulli(0.7));
    for (const auto& p : eg.b) rb.set(p, rng.bernoulli(0.7));
    ++r.cases;
    const auto cert = hall_deficiency(g, rr, ra, rb);
    if (cert.has_value() == exhaustive_cover(g, rr, ra, rb)) {
      ++r.violations;
      continue;
    }
    if (cert) {
      // The certificate must be a genuine Hall violation.
      const CellSet& req = cert->a_side ? ra : rb;
      const auto& other = cert->a_side ? eg.b : eg.a;
      std::vector<IVec> nb;
      for (const auto& o : other)
        for (const auto& p : cert->set)
          if (linf_dist(o, p) <= 1) {
            nb.push_back(o);
            break;
          }
      bool ok = nb.size() < cert->set.size() && nb == cert->neighbours;
      for (const auto& p : cert->set) ok = ok && req.contains(p);
      if (!ok) ++r.violations;
    }
  }
  r.detail = "random instances with <= 12 edges";
  return finish(r, t);
}

SuiteResult suite_extendability(uint64_t seed, int64_t cases) {
  Timer t;
  SuiteResult r;
  r.name = "extendability";
  Rng rng(seed, "extendability");
  const Rect w(IVec{0, 0}, IVec{9, 9});
  const IVec x{4, 4};
  while (r.cases < cases) {
    const int64_t j = rng.range(1, 2);
    const bool x_is_a = rng.bernoulli(0.5);
    CellSet a = random_cells(w, 0.05 + 0.25 * rng.uniform(), rng), b = random_cells(w, 0.05 + 0.25 * rng.uniform(), rng);
    (x_is_a ? a : b).set(x);
    const Rect ball(x - IVec::filled(2, j + 1), IVec::filled(2, 2 * j + 3));
    int64_t in_ball = 0;
    for_each_point(ball, [&](const IVec& p) { in_ball += a.contains(p) + b.contains(p); });
    if (in_ball > 14) continue;
    TranslationGraph g(a, b, 1);
    Matching m = random_matching(g, w, 0.5 * rng.uniform(), rng);
    if ((x_is_a ? m.partner_of_a(w.index(x)) : m.partner_of_b(w.index(x))) != kNone) continue;
    std::vector<IVec> ys;
    for (const auto& o : g.offsets()) {
      IVec y = x + o;
      if (x_is_a ? b.contains(y) : a.contains(y)) ys.push_back(y);
    }
    if (ys.empty()) continue;
    const IVec y = ys[static_cast<size_t>(rng.range(0, int64_t(ys.size()) - 1))];
    ++r.cases;
    const bool want = exhaustive_extendable(g, m, x, y, j, x_is_a);
    ExtendabilityContext ctx(g, m, x, j, x_is_a);
    if (extendable_oracle(g, m, x, y, j, x_is_a) != want || ctx.test(y) != want) ++r.violations;
    else if (want && !extendable_oracle(g, m, x, y, j - 1, x_is_a)) ++r.violations;  // monotone in j
  }
  r.detail = "9x9 windows, M = 1, j in {1,2}, <= 14 cells per ball";
  return finish(r, t);
}

SuiteResult suite_equivariance(uint64_t seed) {
  Timer t;
  SuiteResult r;
  r.name = "equivariance";
  const FreeVectorSystem sys = sample_free_system(seed, 2, 2, 4);
  const double rad = std::sqrt(0.15 / M_PI), side = std::sqrt(0.15);
  const Shape a = make_disk({0.5, 0.5}, rad), b = make_square({0.5 - side / 2, 0.5 - side / 2}, side);
  auto runner = [&](bool mutant) {
    return [&, mutant](const TorusPoint& u, const Rect& win) {
      LebesgueConfig cfg;
      cfg.ladder = {4, 16, 64};
      cfg.levels = 1;
      cfg.mutant_window_tiebreak = mutant;
      return labelled(run_pipeline(extract_window(a, b, sys, u, win), cfg));
    };
  };
  const TorusPoint u({0.3, 0.6});
  const Rect win = Rect::centered(2, 256);
  std::string detail;
  for (const IVec& s : {IVec{3, -2}, IVec{-7, 5}}) {
    auto res = equivariance_check(runner(false), sys, u, s, win);
    ++r.cases;
    if (!res.equal) ++r.violations;
    detail += to_string(s) + ": " + std::to_string(res.mismatches) + "/" + std::to_string(res.compared) + " mismatches; ";
  }
  auto mut = equivariance_check(runner(true), sys, u, IVec{3, -2}, win);
  ++r.cases;
  if (mut.equal) ++r.violations;
  detail += "mutant: " + std::to_string(mut.mismatches) + " mismatches";
  r.detail = detail;
  return finish(r, t);
}

std::vector<std::string> suite_names() {
  return {"isoperimetry", "internal_perimeter", "short_aug", "hall", "extendability", "equivariance"};
}

SuiteResult run_suite(const std::string& name, uint64_t seed) {
  if (name == "isoperimetry") return suite_isoperimetry(seed);
  if (name == "internal_perimeter") return suite_internal_perimeter(seed);
  if (name == "short_aug") return suite_short_aug(seed);
  if (name == "hall") return suite_hall(seed);
  if (name == "extendability") return suite_extendability(seed);
  if (name == "equivariance") return suite_equivariance(seed);
  throw ArgumentError("unknown suite '" + name + "'");
}

nlohmann::json suite_json(const SuiteResult& r) {
  return {{"suite", r.name}, {"pass", r.pass},       {"cases", r.cases},
          {"violations", r.violations}, {"detail", r.detail}, {"seconds", r.seconds}};
}

}  // namespace eqd::checks
