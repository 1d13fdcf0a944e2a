#pragma once
// Integer vectors, rectangles and error types shared by every module.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqd {

inline constexpr int kMaxDim = 4;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a pipeline invariant does not hold.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct IVec {
  std::array<int64_t, kMaxDim> c{};
  int dim = 0;

  IVec() = default;
  explicit IVec(int d) : dim(d) {
    if (d < 1 || d > kMaxDim) throw ArgumentError("dimension out of range");
  }
  IVec(std::initializer_list<int64_t> v) : dim(static_cast<int>(v.size())) {
    if (dim < 1 || dim > kMaxDim) throw ArgumentError("dimension out of range");
    int i = 0;
    for (auto x : v) c[i++] = x;
  }
  static IVec from(const std::vector<int64_t>& v) {
    IVec r(static_cast<int>(v.size()));
    for (int i = 0; i < r.dim; ++i) r.c[i] = v[i];
    return r;
  }
  static IVec filled(int d, int64_t x) {
    IVec r(d);
    for (int i = 0; i < d; ++i) r.c[i] = x;
    return r;
  }

  int size() const { return dim; }
  int64_t& operator[](int i) { return c[i]; }
  int64_t operator[](int i) const { return c[i]; }

  std::vector<int64_t> to_vector() const { return {c.begin(), c.begin() + dim}; }

  friend bool operator==(const IVec& a, const IVec& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
  friend bool operator!=(const IVec& a, const IVec& b) { return !(a == b); }
  // Row-major (lexicographic) order.
  friend bool operator<(const IVec& a, const IVec& b) {
    for (int i = 0; i < a.dim; ++i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  }
  friend IVec operator+(IVec a, const IVec& b) {
    for (int i = 0; i < a.dim; ++i) a.c[i] += b.c[i];
    return a;
  }
  friend IVec operator-(IVec a, const IVec& b) {
    for (int i = 0; i < a.dim; ++i) a.c[i] -= b.c[i];
    return a;
  }
  IVec operator-() const {
    IVec r = *this;
    for (int i = 0; i < dim; ++i) r.c[i] = -r.c[i];
    return r;
  }
};

int64_t linf_norm(const IVec& v);
inline int64_t linf_dist(const IVec& a, const IVec& b) { return linf_norm(a - b); }
std::string to_string(const IVec& v);

// Axis-aligned box low + [0, sides) per axis. Linear indices are row-major
// with the last axis fastest.
struct Rect {
  IVec low;
  IVec sides;

  Rect() = default;
  Rect(IVec lo, IVec s);
  static Rect cube(const IVec& low, int64_t side);
  // [-L/2, L/2)^d
  static Rect centered(int d, int64_t side);

  int dim() const { return low.dim; }
  int64_t volume() const;
  int64_t max_side() const;
  int64_t min_side() const;
  double balance() const { return double(max_side()) / double(min_side()); }
  IVec high() const { return low + sides; }  // exclusive

  bool contains(const IVec& p) const {
    for (int i = 0; i < low.dim; ++i) {
      int64_t q = p.c[i] - low.c[i];
      if (q < 0 || q >= sides.c[i]) return false;
    }
    return true;
  }
  bool contains(const Rect& r) const;
  bool intersects(const Rect& r) const;
  Rect intersect(const Rect& r) const;  // caller checks intersects()
  Rect grown(int64_t m) const;
  Rect shrunk(int64_t m) const;  // throws if empty
  Rect translated(const IVec& v) const { return Rect(low + v, sides); }

  int64_t index(const IVec& p) const {
    int64_t idx = 0;
    for (int i = 0; i < low.dim; ++i) idx = idx * sides.c[i] + (p.c[i] - low.c[i]);
    return idx;
  }
  IVec point(int64_t idx) const {
    IVec p(low.dim);
    for (int i = low.dim - 1; i >= 0; --i) {
      p.c[i] = low.c[i] + idx % sides.c[i];
      idx /= sides.c[i];
    }
    return p;
  }
  // Strides for linear index arithmetic.
  std::array<int64_t, kMaxDim> strides() const;

  friend bool operator==(const Rect& a, const Rect& b) { return a.low == b.low && a.sides == b.sides; }
  friend bool operator!=(const Rect& a, const Rect& b) { return !(a == b); }
};

std::string to_string(const Rect& r);

// Calls f(IVec) for every point of r in row-major order.
template <class F>
void for_each_point(const Rect& r, F&& f) {
  const int d = r.dim();
  if (r.volume() == 0) return;
  IVec p = r.low;
  while (true) {
    f(static_cast<const IVec&>(p));
    int i = d - 1;
    while (i >= 0) {
      if (++p.c[i] < r.low.c[i] + r.sides.c[i]) break;
      p.c[i] = r.low.c[i];
      --i;
    }
    if (i < 0) return;
  }
}

// All offsets in [-m, m]^d in row-major order.
std::vector<IVec> offsets_in_ball(int d, int64_t m);

bool is_power_of_two(int64_t x);
int ilog2(int64_t x);

}  // namespace eqd
