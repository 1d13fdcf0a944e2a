#include "eqd/torus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "eqd/rng.hpp"

namespace eqd {

TorusPoint::TorusPoint(std::vector<double> coords) : x(std::move(coords)) {
  for (auto& v : x) v = wrap01(v);
}

double torus_dist_linf(const TorusPoint& a, const TorusPoint& b) {
  double m = 0;
  for (int i = 0; i < a.k(); ++i) m = std::max(m, std::abs(wrap_signed(a.x[i] - b.x[i])));
  return m;
}

double torus_norm_linf(const double* v, int k) {
  double m = 0;
  for (int i = 0; i < k; ++i) m = std::max(m, std::abs(wrap_signed(v[i])));
  return m;
}

void FreeVectorSystem::validate() const {
  if (k < 1) throw ArgumentError("torus dimension k must be >= 1");
  if (d < 2 || d > kMaxDim) throw ArgumentError("number of generators d must be in [2, 4]");
  if (m_cap < 1) throw ArgumentError("translation radius M must be >= 1");
  if (static_cast<int>(vectors.size()) != d) throw ArgumentError("expected d vectors");
  for (const auto& v : vectors)
    if (v.k() != k) throw ArgumentError("vector dimension mismatch");
}

FreeVectorSystem make_system(std::vector<TorusPoint> vectors, int m_cap, uint64_t seed) {
  FreeVectorSystem s;
  s.d = static_cast<int>(vectors.size());
  s.k = vectors.empty() ? 0 : vectors[0].k();
  s.vectors = std::move(vectors);
  s.m_cap = m_cap;
  s.rng_seed = seed;
  s.validate();
  return s;
}

FreeVectorSystem sample_free_system(uint64_t seed, int k, int d, int m_cap) {
  if (k < 1 || d < 2 || m_cap < 1) throw ArgumentError("sample_free_system: need k>=1, d>=2, M>=1");
  Rng rng(seed, "vectors");
  std::vector<TorusPoint> vs;
  for (int j = 0; j < d; ++j) {
    std::vector<double> c(k);
    for (auto& x : c) x = rng.uniform();
    vs.emplace_back(std::move(c));
  }
  return make_system(std::move(vs), m_cap, seed);
}

void coset_point_into(const TorusPoint& u, const IVec& n, const FreeVectorSystem& sys, double* out) {
  for (int c = 0; c < sys.k; ++c) {
    double acc = u.x[c];
    for (int j = 0; j < sys.d; ++j) acc += static_cast<double>(n.c[j]) * sys.vectors[j].x[c];
    out[c] = wrap01(acc);
  }
}

TorusPoint coset_point(const TorusPoint& u, const IVec& n, const FreeVectorSystem& sys) {
  if (n.dim != sys.d) throw ArgumentError("coset_point: offset length must equal d");
  if (u.k() != sys.k) throw ArgumentError("coset_point: base point dimension must equal k");
  TorusPoint r;
  r.x.resize(sys.k);
  coset_point_into(u, n, sys, r.x.data());
  return r;
}

std::vector<TranslationEntry> translation_set(const FreeVectorSystem& sys) {
  std::vector<TranslationEntry> out;
  TorusPoint zero(std::vector<double>(sys.k, 0.0));
  for (const IVec& o : offsets_in_ball(sys.d, sys.m_cap)) out.push_back({o, coset_point(zero, o, sys)});
  return out;
}

RelationDiagnostic integer_relation_diagnostic(const FreeVectorSystem& sys, int64_t bound, double tol) {
  RelationDiagnostic r;
  int64_t b = bound;
  while (b > 1 && std::pow(2.0 * b + 1.0, sys.d) > 1e7) --b;
  r.coefficient_bound = b;
  r.coefficients = IVec(sys.d);
  // Only half of the box is needed since n and -n give the same residual.
  Rect box(IVec::filled(sys.d, -b), IVec::filled(sys.d, 2 * b + 1));
  std::vector<double> acc(sys.k);
  for_each_point(box, [&](const IVec& n) {
    bool positive = false;
    for (int j = 0; j < sys.d; ++j)
      if (n.c[j] != 0) {
        positive = n.c[j] > 0;
        break;
      }
    if (!positive) return;
    for (int c = 0; c < sys.k; ++c) {
      double s = 0;
      for (int j = 0; j < sys.d; ++j) s += static_cast<double>(n.c[j]) * sys.vectors[j].x[c];
      acc[c] = s;
    }
    double res = torus_norm_linf(acc.data(), sys.k);
    if (res < r.residual) {
      r.residual = res;
      r.coefficients = n;
    }
  });
  r.relation_found = r.residual < tol;
  return r;
}

// ---------------------------------------------------------------- shapes

namespace {

int shape_dim(const Shape::Variant& v) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) return s.center.k();
        if constexpr (std::is_same_v<T, AxisSquare>) return s.corner.k();
        if constexpr (std::is_same_v<T, Polygon>) return 2;
        if constexpr (std::is_same_v<T, Bitmap>) return s.k;
      },
      v);
}

double seg_dist(double px, double py, double ax, double ay, double bx, double by) {
  double vx = bx - ax, vy = by - ay;
  double wx = px - ax, wy = py - ay;
  double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
  double dx = wx - t * vx, dy = wy - t * vy;
  return std::sqrt(dx * dx + dy * dy);
}

int64_t bitmap_index(const Bitmap& b, const std::vector<int64_t>& cell) {
  int64_t idx = 0;
  for (int c = 0; c < b.k; ++c) idx = idx * b.resolution + cell[c];
  return idx;
}

}  // namespace

Shape::Shape(Variant v) : v_(std::move(v)) {
  k_ = shape_dim(v_);
  if (k_ < 1) throw ArgumentError("shape dimension must be >= 1");
  if (auto* d = std::get_if<Disk>(&v_)) {
    if (!(d->radius >= 0) || d->radius >= 0.5) throw ArgumentError("disk radius must lie in [0, 1/2)");
  } else if (auto* s = std::get_if<AxisSquare>(&v_)) {
    if (!(s->side >= 0) || s->side >= 1.0) throw ArgumentError("square side must lie in [0, 1)");
  } else if (auto* p = std::get_if<Polygon>(&v_)) {
    if (p->vertices.size() < 3) throw ArgumentError("polygon needs at least 3 vertices");
    const auto& v0 = p->vertices[0];
    double lo[2] = {0, 0}, hi[2] = {0, 0};
    for (const auto& v : p->vertices) {
      if (v.k() != 2) throw ArgumentError("polygon vertices must be 2-dimensional");
      std::vector<double> q(2);
      for (int c = 0; c < 2; ++c) {
        q[c] = v0.x[c] + wrap_signed(v.x[c] - v0.x[c]);
        lo[c] = std::min(lo[c], q[c] - v0.x[c]);
        hi[c] = std::max(hi[c], q[c] - v0.x[c]);
      }
      unwrapped_.push_back(TorusPoint{});
      unwrapped_.back().x = q;
    }
    if (hi[0] - lo[0] > 0.5 || hi[1] - lo[1] > 0.5) throw ArgumentError("polygon diameter must be at most 1/2");
  } else if (auto* b = std::get_if<Bitmap>(&v_)) {
    if (b->resolution < 1) throw ArgumentError("bitmap resolution must be >= 1");
    double cells = std::pow(static_cast<double>(b->resolution), b->k);
    if (cells > 1e9 || static_cast<int64_t>(cells) != static_cast<int64_t>(b->bits.size()))
      throw ArgumentError("bitmap bit count must equal resolution^k");
  }
}

std::string Shape::kind() const {
  switch (v_.index()) {
    case 0: return "disk";
    case 1: return "square";
    case 2: return "polygon";
    default: return "bitmap";
  }
}

bool Shape::contains(const double* p) const {
  switch (v_.index()) {
    case 0: {
      const auto& d = std::get<Disk>(v_);
      double r2 = 0;
      int first_sign = 0;
      for (int c = 0; c < k_; ++c) {
        double t = wrap_signed(p[c] - d.center.x[c]);
        r2 += t * t;
        if (first_sign == 0 && t != 0) first_sign = t < 0 ? -1 : 1;
      }
      double R2 = d.radius * d.radius;
      if (r2 < R2) return true;
      return r2 == R2 && first_sign < 0;  // half-open tie rule
    }
    case 1: {
      const auto& s = std::get<AxisSquare>(v_);
      for (int c = 0; c < k_; ++c)
        if (!(wrap01(p[c] - s.corner.x[c]) < s.side)) return false;
      return true;
    }
    case 2: {
      const auto& v0 = unwrapped_[0].x;
      double px = v0[0] + wrap_signed(p[0] - v0[0]);
      double py = v0[1] + wrap_signed(p[1] - v0[1]);
      bool in = false;
      size_t n = unwrapped_.size();
      for (size_t i = 0, j = n - 1; i < n; j = i++) {
        double xi = unwrapped_[i].x[0], yi = unwrapped_[i].x[1];
        double xj = unwrapped_[j].x[0], yj = unwrapped_[j].x[1];
        if ((yi > py) != (yj > py)) {
          double xc = (xj - xi) * (py - yi) / (yj - yi) + xi;
          if (px < xc) in = !in;
        }
      }
      return in;
    }
    default: {
      const auto& b = std::get<Bitmap>(v_);
      int64_t idx = 0;
      for (int c = 0; c < b.k; ++c) {
        auto cell = static_cast<int64_t>(p[c] * static_cast<double>(b.resolution));
        cell = std::clamp<int64_t>(cell, 0, b.resolution - 1);
        idx = idx * b.resolution + cell;
      }
      return b.bits[idx] != 0;
    }
  }
}

bool Shape::boundary_empty() const {
  switch (v_.index()) {
    case 0: return std::get<Disk>(v_).radius <= 0;
    case 1: return std::get<AxisSquare>(v_).side <= 0;
    case 2: return false;
    default: {
      const auto& b = std::get<Bitmap>(v_);
      return std::all_of(b.bits.begin(), b.bits.end(), [&](uint8_t x) { return (x != 0) == (b.bits[0] != 0); });
    }
  }
}

bool Shape::near_boundary(const double* p, double eps) const {
  switch (v_.index()) {
    case 0: {
      const auto& d = std::get<Disk>(v_);
      double r2 = 0;
      for (int c = 0; c < k_; ++c) {
        double t = wrap_signed(p[c] - d.center.x[c]);
        r2 += t * t;
      }
      return std::abs(std::sqrt(r2) - d.radius) <= eps;
    }
    case 1: {
      const auto& s = std::get<AxisSquare>(v_);
      bool inside = true;
      double inner = 1e300, outer2 = 0;
      for (int c = 0; c < k_; ++c) {
        double w = wrap01(p[c] - s.corner.x[c]);
        if (w < s.side) {
          inner = std::min({inner, w, s.side - w});
        } else {
          inside = false;
          double g = std::min(w - s.side, 1.0 - w);
          outer2 += g * g;
        }
      }
      return inside ? inner <= eps : std::sqrt(outer2) <= eps;
    }
    case 2: {
      const auto& v0 = unwrapped_[0].x;
      double px = v0[0] + wrap_signed(p[0] - v0[0]);
      double py = v0[1] + wrap_signed(p[1] - v0[1]);
      size_t n = unwrapped_.size();
      for (size_t i = 0, j = n - 1; i < n; j = i++)
        if (seg_dist(px, py, unwrapped_[j].x[0], unwrapped_[j].x[1], unwrapped_[i].x[0], unwrapped_[i].x[1]) <= eps)
          return true;
      return false;
    }
    default: {
      // The closed L-inf eps-box around p meets pixels of both values.
      const auto& b = std::get<Bitmap>(v_);
      const double R = static_cast<double>(b.resolution);
      std::vector<int64_t> lo(b.k), cnt(b.k), cell(b.k);
      for (int c = 0; c < b.k; ++c) {
        auto a = static_cast<int64_t>(std::floor((p[c] - eps) * R));
        auto z = static_cast<int64_t>(std::floor((p[c] + eps) * R));
        lo[c] = a;
        cnt[c] = std::min<int64_t>(z - a + 1, b.resolution);
      }
      int first = -1;
      std::vector<int64_t> it(b.k, 0);
      while (true) {
        for (int c = 0; c < b.k; ++c) cell[c] = ((lo[c] + it[c]) % b.resolution + b.resolution) % b.resolution;
        int v = b.bits[bitmap_index(b, cell)] != 0;
        if (first < 0) first = v;
        else if (v != first) return true;
        int c = b.k - 1;
        while (c >= 0 && ++it[c] >= cnt[c]) it[c--] = 0;
        if (c < 0) return false;
      }
    }
  }
}

Shape make_disk(std::vector<double> center, double radius) {
  return Shape(Disk{TorusPoint(std::move(center)), radius});
}
Shape make_square(std::vector<double> corner, double side) {
  return Shape(AxisSquare{TorusPoint(std::move(corner)), side});
}
Shape make_polygon(const std::vector<std::vector<double>>& vertices) {
  Polygon p;
  for (const auto& v : vertices) p.vertices.emplace_back(v);
  return Shape(std::move(p));
}
Shape make_bitmap(int k, int64_t resolution, std::vector<uint8_t> bits) {
  return Shape(Bitmap{k, resolution, std::move(bits)});
}
Shape make_full(int k) { return make_bitmap(k, 1, {1}); }
Shape make_empty(int k) { return make_bitmap(k, 1, {0}); }

double shape_measure(const Shape& s) {
  const int k = s.k();
  switch (s.variant().index()) {
    case 0: {
      const double r = std::get<Disk>(s.variant()).radius;
      return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1) * std::pow(r, k);
    }
    case 1:
      return std::pow(std::get<AxisSquare>(s.variant()).side, k);
    case 2: {
      const auto& v = std::get<Polygon>(s.variant()).vertices;
      // Shoelace on vertices unwrapped next to the first one.
      std::vector<std::array<double, 2>> q;
      for (const auto& p : v)
        q.push_back({v[0][0] + wrap_signed(p[0] - v[0][0]), v[0][1] + wrap_signed(p[1] - v[0][1])});
      double a = 0;
      for (size_t i = 0; i < q.size(); ++i) {
        const auto& p0 = q[i];
        const auto& p1 = q[(i + 1) % q.size()];
        a += p0[0] * p1[1] - p1[0] * p0[1];
      }
      return std::abs(a) / 2;
    }
    default: {
      const auto& b = std::get<Bitmap>(s.variant());
      int64_t on = 0;
      for (auto x : b.bits) on += x != 0;
      return double(on) / double(b.bits.size());
    }
  }
}

Bitmap load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open PGM file: " + path);
  auto token = [&]() {
    std::string t;
    char ch;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(ch);
    }
    return t;
  };
  if (token() != "P5") throw ArgumentError("not a binary PGM (P5) file: " + path);
  int64_t w = 0, h = 0, maxv = 0;
  try {
    w = std::stoll(token());
    h = std::stoll(token());
    maxv = std::stoll(token());
  } catch (const std::exception&) {
    throw ArgumentError("malformed PGM header: " + path);
  }
  if (w != h || w < 1) throw ArgumentError("PGM bitmap must be square");
  if (maxv < 1 || maxv > 65535) throw ArgumentError("PGM maxval out of range");
  const int bpp = maxv > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<size_t>(w * h * bpp));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw ArgumentError("truncated PGM data");
  Bitmap b{2, w, std::vector<uint8_t>(static_cast<size_t>(w * h))};
  for (int64_t i = 0; i < w * h; ++i) {
    int64_t v = bpp == 1 ? raw[i] : (raw[2 * i] << 8 | raw[2 * i + 1]);
    b.bits[i] = 2 * v > maxv ? 1 : 0;
  }
  return b;
}

namespace {
std::vector<double> vec_of(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw ArgumentError(std::string("shape field missing: ") + key);
  std::vector<double> v;
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw ArgumentError(std::string("shape field not numeric: ") + key);
    v.push_back(x.get<double>());
  }
  return v;
}
double num_of(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw ArgumentError(std::string("shape field missing: ") + key);
  return j[key].get<double>();
}
}  // namespace

Shape shape_from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ArgumentError("shape must be an object with a string \"type\"");
  const std::string t = j["type"].get<std::string>();
  if (t == "disk") return make_disk(vec_of(j, "center"), num_of(j, "radius"));
  if (t == "square") return make_square(vec_of(j, "corner"), num_of(j, "side"));
  if (t == "polygon") {
    if (!j.contains("vertices") || !j["vertices"].is_array()) throw ArgumentError("polygon needs vertices");
    std::vector<std::vector<double>> vs;
    for (const auto& v : j["vertices"]) vs.push_back(v.get<std::vector<double>>());
    return make_polygon(vs);
  }
  int k = j.value("k", 2);
  if (t == "full") return make_full(k);
  if (t == "empty") return make_empty(k);
  if (t == "bitmap") {
    if (j.contains("pgm")) {
      std::string p = j["pgm"].get<std::string>();
      if (!base_dir.empty() && !p.empty() && p[0] != '/') p = base_dir + "/" + p;
      return Shape(load_pgm(p));
    }
    auto res = static_cast<int64_t>(num_of(j, "resolution"));
    if (!j.contains("bits") || !j["bits"].is_string()) throw ArgumentError("bitmap needs \"bits\" or \"pgm\"");
    std::vector<uint8_t> bits;
    for (char ch : j["bits"].get<std::string>()) {
      if (ch != '0' && ch != '1') throw ArgumentError("bitmap bits must be '0'/'1'");
      bits.push_back(ch == '1');
    }
    return make_bitmap(k, res, std::move(bits));
  }
  throw ArgumentError("unknown shape type: " + t);
}

nlohmann::json shape_to_json(const Shape& s) {
  nlohmann::json j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Disk>) {
          j = {{"type", "disk"}, {"center", v.center.x}, {"radius", v.radius}};
        } else if constexpr (std::is_same_v<T, AxisSquare>) {
          j = {{"type", "square"}, {"corner", v.corner.x}, {"side", v.side}};
        } else if constexpr (std::is_same_v<T, Polygon>) {
          j = {{"type", "polygon"}, {"vertices", nlohmann::json::array()}};
          for (const auto& p : v.vertices) j["vertices"].push_back(p.x);
        } else {
          std::string bits;
          bits.reserve(v.bits.size());
          for (auto b : v.bits) bits.push_back(b ? '1' : '0');
          j = {{"type", "bitmap"}, {"k", v.k}, {"resolution", v.resolution}, {"bits", bits}};
        }
      },
      s.variant());
  return j;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw ArgumentError("least squares needs at least two points");
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw ArgumentError("least squares needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ssr = 0;
    for (size_t i = 0; i < n; ++i) {
      double r = y[i] - (f.intercept + f.slope * x[i]);
      ssr += r * r;
    }
    f.slope_se = std::sqrt(ssr / double(n - 2) / sxx);
  }
  return f;
}

BoxDimensionEstimate boundary_dimension_estimate(const Shape& shape, const std::vector<double>& eps_ladder,
                                                 int64_t samples, uint64_t seed) {
  if (eps_ladder.size() < 2) throw ArgumentError("eps ladder needs at least two values");
  for (size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0 && eps_ladder[i] < 0.25)) throw ArgumentError("eps values must lie in (0, 0.25)");
    if (i && !(eps_ladder[i] < eps_ladder[i - 1])) throw ArgumentError("eps ladder must be strictly decreasing");
  }
  if (samples < 10000) throw ArgumentError("at least 1e4 samples required");
  BoxDimensionEstimate est;
  est.eps_ladder = eps_ladder;
  est.neighborhood_measures.assign(eps_ladder.size(), 0.0);
  if (shape.boundary_empty()) {
    est.error = true;
    est.error_message = "shape boundary is empty";
    return est;
  }
  Rng rng(seed, "samplers");
  const int k = shape.k();
  std::vector<double> p(k);
  std::vector<int64_t> hits(eps_ladder.size(), 0);
  for (int64_t s = 0; s < samples; ++s) {
    for (auto& x : p) x = rng.uniform();
    // Nested neighborhoods: stop at the first eps that misses.
    for (size_t e = 0; e < eps_ladder.size(); ++e) {
      if (!shape.near_boundary(p.data(), eps_ladder[e])) break;
      ++hits[e];
    }
  }
  std::vector<double> lx, ly;
  for (size_t e = 0; e < eps_ladder.size(); ++e) {
    est.neighborhood_measures[e] = double(hits[e]) / double(samples);
    if (hits[e] == 0) {
      est.error = true;
      est.error_message = "no samples near the boundary at eps=" + std::to_string(eps_ladder[e]);
      return est;
    }
    lx.push_back(std::log(eps_ladder[e]));
    ly.push_back(std::log(est.neighborhood_measures[e]));
  }
  LinearFit f = least_squares(lx, ly);
  est.fitted_dimension = k - f.slope;
  est.std_error = f.slope_se;
  return est;
}

}  // namespace eqd
