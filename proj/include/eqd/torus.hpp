#pragma once
// Torus points, free vector systems, shapes and boundary-dimension estimates.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eqd/core.hpp"
#include "json.hpp"

namespace eqd {

inline double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}
// Representative of x mod 1 in [-1/2, 1/2).
inline double wrap_signed(double x) { return wrap01(x + 0.5) - 0.5; }

struct TorusPoint {
  std::vector<double> x;

  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> coords);
  int k() const { return static_cast<int>(x.size()); }
  double operator[](int i) const { return x[i]; }
  friend bool operator==(const TorusPoint& a, const TorusPoint& b) { return a.x == b.x; }
};

double torus_dist_linf(const TorusPoint& a, const TorusPoint& b);
double torus_norm_linf(const double* v, int k);

struct FreeVectorSystem {
  int k = 0;
  int d = 0;
  std::vector<TorusPoint> vectors;
  int m_cap = 1;
  uint64_t rng_seed = 0;

  void validate() const;
};

FreeVectorSystem make_system(std::vector<TorusPoint> vectors, int m_cap, uint64_t seed = 0);
FreeVectorSystem sample_free_system(uint64_t seed, int k, int d, int m_cap);

TorusPoint coset_point(const TorusPoint& u, const IVec& n, const FreeVectorSystem& sys);
// Allocation-free variant; out must hold sys.k doubles.
void coset_point_into(const TorusPoint& u, const IVec& n, const FreeVectorSystem& sys, double* out);

struct TranslationEntry {
  IVec offset;
  TorusPoint vec;
};
std::vector<TranslationEntry> translation_set(const FreeVectorSystem& sys);

struct RelationDiagnostic {
  bool relation_found = false;
  IVec coefficients;
  double residual = 1.0;     // smallest |sum n_j x_j| found (L-inf, mod 1)
  int64_t coefficient_bound = 0;  // bound actually searched
};
// Searches for n != 0 with |n|_inf <= bound and |sum n_j x_j mod 1| < tol.
// The bound is reduced for large d so that at most ~1e7 combinations are tried.
RelationDiagnostic integer_relation_diagnostic(const FreeVectorSystem& sys, int64_t bound = 1000,
                                               double tol = 1e-9);

struct Disk {
  TorusPoint center;
  double radius = 0;
};
struct AxisSquare {
  TorusPoint corner;
  double side = 0;
};
struct Polygon {
  std::vector<TorusPoint> vertices;  // k = 2 only
};
struct Bitmap {
  int k = 2;
  int64_t resolution = 1;
  std::vector<uint8_t> bits;  // resolution^k entries, row-major, first axis slowest
};

class Shape {
 public:
  using Variant = std::variant<Disk, AxisSquare, Polygon, Bitmap>;

  Shape() = default;
  explicit Shape(Variant v);

  int k() const { return k_; }
  const Variant& variant() const { return v_; }
  std::string kind() const;

  bool contains(const double* p) const;
  bool contains(const TorusPoint& p) const { return contains(p.x.data()); }
  // True iff p lies within distance eps of the boundary. Euclidean distance
  // for geometric shapes, L-inf for bitmaps.
  bool near_boundary(const double* p, double eps) const;
  // Empty or full shapes have no boundary.
  bool boundary_empty() const;

 private:
  Variant v_;
  int k_ = 0;
  std::vector<TorusPoint> unwrapped_;  // polygon vertices relative to vertex 0
};

Shape make_disk(std::vector<double> center, double radius);
Shape make_square(std::vector<double> corner, double side);
Shape make_polygon(const std::vector<std::vector<double>>& vertices);
Shape make_bitmap(int k, int64_t resolution, std::vector<uint8_t> bits);
Shape make_full(int k);
// Lebesgue measure of the shape in T^k.
double shape_measure(const Shape& s);
Shape make_empty(int k);

// {"type":"disk","center":[..],"radius":r} | {"type":"square","corner":[..],"side":s}
// | {"type":"polygon","vertices":[[..],..]} | {"type":"bitmap","pgm":path}
// | {"type":"bitmap","k":k,"resolution":n,"bits":"0101.."} | {"type":"full"|"empty","k":k}
Shape shape_from_json(const nlohmann::json& j, const std::string& base_dir = "");
nlohmann::json shape_to_json(const Shape& s);
Bitmap load_pgm(const std::string& path);

struct BoxDimensionEstimate {
  std::vector<double> eps_ladder;
  std::vector<double> neighborhood_measures;
  double fitted_dimension = 0;
  double std_error = 0;
  bool error = false;
  std::string error_message;
};

BoxDimensionEstimate boundary_dimension_estimate(const Shape& shape, const std::vector<double>& eps_ladder,
                                                 int64_t samples, uint64_t seed);

struct LinearFit {
  double slope = 0, intercept = 0, slope_se = 0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace eqd
