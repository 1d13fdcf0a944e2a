#include "eqd/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqd/parallel.hpp"
#include "eqd/rng.hpp"
#include "eqd/torus.hpp"

namespace eqd {

SummedAreaTable::SummedAreaTable(const CellSet& x, const Rect& window) : window_(window) {
  const int d = window.dim();
  IVec ps = window.sides;
  for (int j = 0; j < d; ++j) ps.c[j] += 1;
  Rect padded(IVec(d), ps);
  pst_ = padded.strides();
  s_.assign(static_cast<size_t>(padded.volume()), 0);
  for_each_point(window, [&](const IVec& p) {
    if (!x.contains(p)) return;
    int64_t idx = 0;
    for (int j = 0; j < d; ++j) idx += (p.c[j] - window.low.c[j] + 1) * pst_[j];
    s_[idx] = 1;
  });
  // Prefix sums along each axis in turn.
  for (int a = 0; a < d; ++a) {
    for (int64_t i = 0; i < static_cast<int64_t>(s_.size()); ++i) {
      int64_t coord = (i / pst_[a]) % ps.c[a];
      if (coord > 0) s_[i] += s_[i - pst_[a]];
    }
  }
}

int64_t SummedAreaTable::box_sum(const Rect& box) const {
  const int d = window_.dim();
  int64_t total = 0;
  for (int mask = 0; mask < (1 << d); ++mask) {
    int64_t idx = 0;
    int ones = 0;
    for (int j = 0; j < d; ++j) {
      int64_t c = box.low.c[j] - window_.low.c[j];
      if (mask >> j & 1) {
        c += box.sides.c[j];
        ++ones;
      }
      idx += c * pst_[j];
    }
    total += ((d - ones) % 2 ? -1 : 1) * s_[idx];
  }
  return total;
}

double SummedAreaTable::max_cube_deviation(int64_t side, double delta) const {
  const int d = window_.dim();
  IVec npos(d);
  for (int j = 0; j < d; ++j) {
    npos.c[j] = window_.sides.c[j] - side + 1;
    if (npos.c[j] < 1) throw ArgumentError("cube side exceeds window");
  }
  std::vector<int64_t> corner_off;
  std::vector<int> corner_sign;
  for (int mask = 0; mask < (1 << d); ++mask) {
    int64_t off = 0;
    int ones = 0;
    for (int j = 0; j < d; ++j)
      if (mask >> j & 1) {
        off += side * pst_[j];
        ++ones;
      }
    corner_off.push_back(off);
    corner_sign.push_back((d - ones) % 2 ? -1 : 1);
  }
  const double expect = delta * std::pow(static_cast<double>(side), d);
  Rect positions(IVec(d), npos);
  const int64_t n = positions.volume();
  std::vector<double> best(static_cast<size_t>(thread_count()), 0.0);
  parallel_chunks(n, [&](int64_t b, int64_t e, int w) {
    double m = 0;
    for (int64_t t = b; t < e; ++t) {
      IVec p = positions.point(t);
      int64_t base = 0;
      for (int j = 0; j < d; ++j) base += p.c[j] * pst_[j];
      int64_t sum = 0;
      for (size_t c = 0; c < corner_off.size(); ++c) sum += corner_sign[c] * s_[base + corner_off[c]];
      m = std::max(m, std::abs(static_cast<double>(sum) - expect));
    }
    best[w] = std::max(best[w], m);
  });
  return *std::max_element(best.begin(), best.end());
}

double cube_discrepancy(const CellSet& x, double delta, int i, const Rect& window) {
  if (i < 0 || (int64_t(1) << i) > window.min_side()) throw ArgumentError("cube scale exceeds window");
  SummedAreaTable sat(x, window);
  return sat.max_cube_deviation(int64_t(1) << i, delta);
}

int64_t rect_discrepancy_pair(const CellSet& a, const CellSet& b, const CellSet& y) {
  int64_t na = 0, nb = 0;
  for (int64_t i = 0; i < y.rect().volume(); ++i) {
    if (!y.at(i)) continue;
    IVec p = y.rect().point(i);
    na += a.contains(p);
    nb += b.contains(p);
  }
  return na > nb ? na - nb : nb - na;
}

double density_discrepancy(const CellSet& x, double delta, const Rect& r) {
  int64_t n = 0;
  for_each_point(r, [&](const IVec& p) { n += x.contains(p); });
  return std::abs(static_cast<double>(n) - delta * static_cast<double>(r.volume()));
}

CellSet random_test_set(const Rect& within, uint64_t draw, uint64_t seed) {
  Rng rng(splitmix64(substream_seed(seed, "samplers") ^ draw));
  const int d = within.dim();
  CellSet y(within);
  if (rng.bernoulli(0.5)) {
    int pieces = static_cast<int>(rng.range(1, 3));
    for (int q = 0; q < pieces; ++q) {
      IVec lo(d), s(d);
      for (int j = 0; j < d; ++j) {
        s.c[j] = rng.range(1, std::min<int64_t>(within.sides.c[j], 32));
        lo.c[j] = within.low.c[j] + rng.range(0, within.sides.c[j] - s.c[j]);
      }
      for_each_point(Rect(lo, s), [&](const IVec& p) { y.set(p); });
    }
  } else {
    IVec p(d);
    for (int j = 0; j < d; ++j) p.c[j] = within.low.c[j] + rng.range(0, within.sides.c[j] - 1);
    int64_t steps = rng.range(1, 400);
    y.set(p);
    for (int64_t s = 0; s < steps; ++s) {
      IVec q = p;
      q.c[rng.range(0, d - 1)] += rng.bernoulli(0.5) ? 1 : -1;
      if (!within.contains(q)) continue;
      p = q;
      y.set(p);
    }
  }
  return y;
}

LaczkovichAudit laczkovich_bound_audit(const CellSet& x, double delta, int64_t samples, uint64_t seed) {
  if (samples < 1) throw ArgumentError("audit needs at least one sample");
  LaczkovichAudit out;
  for (int64_t s = 0; s < samples; ++s) {
    CellSet y = random_test_set(x.rect(), static_cast<uint64_t>(s), seed);
    int64_t inter = 0, size = 0;
    for (int64_t i = 0; i < y.rect().volume(); ++i)
      if (y.at(i)) {
        ++size;
        inter += x.at(i);
      }
    double ratio = std::abs(double(inter) - delta * double(size)) / double(perimeter(y));
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_sample = s;
    }
  }
  return out;
}

DiscrepancyProfile profile(const CellSet& x, double delta, const Rect& window, int i_max) {
  if (i_max < 0 || (int64_t(1) << i_max) > window.min_side()) throw ArgumentError("window too small for i_max");
  SummedAreaTable sat(x, window);
  DiscrepancyProfile p;
  for (int i = 0; i <= i_max; ++i) {
    p.scales.push_back(int64_t(1) << i);
    p.max_dev.push_back(sat.max_cube_deviation(int64_t(1) << i, delta));
  }
  p.fit_lo = 2;
  p.fit_hi = i_max;
  if (i_max >= 3) {
    std::vector<double> xs, ys;
    for (int i = p.fit_lo; i <= p.fit_hi; ++i) {
      xs.push_back(i);
      // Zero deviations are clamped before taking logs.
      ys.push_back(std::log2(std::max(p.max_dev[i], 1e-9)));
    }
    p.fitted_exponent = least_squares(xs, ys).slope;
  } else {
    p.fitted_exponent = std::nan("");
  }
  return p;
}

std::string profile_csv(const DiscrepancyProfile& p) {
  std::ostringstream os;
  os.precision(17);
  os << "scale,max_dev\n";
  for (size_t i = 0; i < p.scales.size(); ++i) os << p.scales[i] << ',' << p.max_dev[i] << '\n';
  return os.str();
}

nlohmann::json profile_json(const DiscrepancyProfile& p) {
  return {{"scales", p.scales},
          {"max_dev", p.max_dev},
          {"fitted_exponent", p.fitted_exponent},
          {"fit_range", {p.fit_lo, p.fit_hi}}};
}

UniformityBudget UniformityBudget::from_psi(double delta, std::vector<double> psi) {
  UniformityBudget b;
  b.delta = delta;
  b.psi = std::move(psi);
  for (size_t i = 0; i < b.psi.size(); ++i) b.phi.push_back(std::ldexp(b.psi[i], static_cast<int>(i)));
  return b;
}

UniformityBudget UniformityBudget::from_profile(double delta, const DiscrepancyProfile& p) {
  std::vector<double> psi;
  for (size_t i = 0; i < p.max_dev.size(); ++i) psi.push_back(std::ldexp(p.max_dev[i], -static_cast<int>(i)));
  return from_psi(delta, std::move(psi));
}

SummabilityReport summability_report(const UniformityBudget& b, int d, int horizon) {
  if (horizon < 0 || horizon >= static_cast<int>(b.psi.size())) throw ArgumentError("horizon beyond tabulated range");
  SummabilityReport r;
  double sp = 0, sf = 0;
  std::vector<double> ip, iff;
  for (int i = 0; i <= horizon; ++i) {
    double a = std::ldexp(b.psi[i], -(d - 2) * i);
    double c = std::ldexp(b.phi[i], -(d - 1) * i);
    sp += a;
    sf += c;
    ip.push_back(a);
    iff.push_back(c);
    r.psi_partial.push_back(sp);
    r.phi_partial.push_back(sf);
  }
  auto tail = [](const std::vector<double>& inc) {
    if (inc.size() < 3) return false;
    size_t n = inc.size();
    return inc[n - 1] < inc[n - 2] && inc[n - 2] < inc[n - 3];
  };
  r.monotone_tail = tail(ip);
  r.phi_monotone_tail = tail(iff);
  return r;
}

nlohmann::json summability_json(const SummabilityReport& r) {
  return {{"psi_partial_sums", r.psi_partial},
          {"phi_partial_sums", r.phi_partial},
          {"psi_monotone_tail", r.monotone_tail},
          {"phi_monotone_tail", r.phi_monotone_tail}};
}

}  // namespace eqd
