#include "eqd/core.hpp"

#include <algorithm>
#include <sstream>

namespace eqd {

int64_t linf_norm(const IVec& v) {
  int64_t m = 0;
  for (int i = 0; i < v.dim; ++i) m = std::max(m, v.c[i] < 0 ? -v.c[i] : v.c[i]);
  return m;
}

std::string to_string(const IVec& v) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < v.dim; ++i) os << (i ? "," : "") << v.c[i];
  os << ')';
  return os.str();
}

Rect::Rect(IVec lo, IVec s) : low(lo), sides(s) {
  if (lo.dim != s.dim || lo.dim < 1) throw ArgumentError("rect dimension mismatch");
  for (int i = 0; i < s.dim; ++i)
    if (s.c[i] < 1) throw ArgumentError("rect sides must be positive");
}

Rect Rect::cube(const IVec& low, int64_t side) { return Rect(low, IVec::filled(low.dim, side)); }

Rect Rect::centered(int d, int64_t side) { return Rect(IVec::filled(d, -(side / 2)), IVec::filled(d, side)); }

int64_t Rect::volume() const {
  if (low.dim == 0) return 0;
  int64_t v = 1;
  for (int i = 0; i < low.dim; ++i) v *= sides.c[i];
  return v;
}

int64_t Rect::max_side() const {
  int64_t m = 0;
  for (int i = 0; i < low.dim; ++i) m = std::max(m, sides.c[i]);
  return m;
}

int64_t Rect::min_side() const {
  int64_t m = sides.c[0];
  for (int i = 1; i < low.dim; ++i) m = std::min(m, sides.c[i]);
  return m;
}

bool Rect::contains(const Rect& r) const {
  for (int i = 0; i < low.dim; ++i) {
    if (r.low.c[i] < low.c[i]) return false;
    if (r.low.c[i] + r.sides.c[i] > low.c[i] + sides.c[i]) return false;
  }
  return true;
}

bool Rect::intersects(const Rect& r) const {
  for (int i = 0; i < low.dim; ++i) {
    if (r.low.c[i] >= low.c[i] + sides.c[i]) return false;
    if (low.c[i] >= r.low.c[i] + r.sides.c[i]) return false;
  }
  return true;
}

Rect Rect::intersect(const Rect& r) const {
  IVec lo(low.dim), s(low.dim);
  for (int i = 0; i < low.dim; ++i) {
    lo.c[i] = std::max(low.c[i], r.low.c[i]);
    int64_t hi = std::min(low.c[i] + sides.c[i], r.low.c[i] + r.sides.c[i]);
    s.c[i] = hi - lo.c[i];
  }
  return Rect(lo, s);
}

Rect Rect::grown(int64_t m) const {
  IVec lo = low, s = sides;
  for (int i = 0; i < low.dim; ++i) {
    lo.c[i] -= m;
    s.c[i] += 2 * m;
  }
  return Rect(lo, s);
}

Rect Rect::shrunk(int64_t m) const {
  for (int i = 0; i < low.dim; ++i)
    if (sides.c[i] <= 2 * m) throw ArgumentError("rect too small to shrink by " + std::to_string(m));
  return grown(-m);
}

std::array<int64_t, kMaxDim> Rect::strides() const {
  std::array<int64_t, kMaxDim> st{};
  int64_t s = 1;
  for (int i = low.dim - 1; i >= 0; --i) {
    st[i] = s;
    s *= sides.c[i];
  }
  return st;
}

std::string to_string(const Rect& r) { return to_string(r.low) + "+" + to_string(r.sides); }

std::vector<IVec> offsets_in_ball(int d, int64_t m) {
  std::vector<IVec> out;
  Rect box(IVec::filled(d, -m), IVec::filled(d, 2 * m + 1));
  out.reserve(static_cast<size_t>(box.volume()));
  for_each_point(box, [&](const IVec& p) { out.push_back(p); });
  return out;
}

bool is_power_of_two(int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

int ilog2(int64_t x) {
  int r = 0;
  while (x > 1) {
    x >>= 1;
    ++r;
  }
  return r;
}

}  // namespace eqd
