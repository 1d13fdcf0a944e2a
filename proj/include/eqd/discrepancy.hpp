#pragma once
// Cube and rectangle discrepancy audits.

#include <cstdint>
#include <string>
#include <vector>

#include "eqd/lattice.hpp"
#include "json.hpp"

namespace eqd {

// d-dimensional summed-area table of X restricted to a window.
class SummedAreaTable {
 public:
  SummedAreaTable(const CellSet& x, const Rect& window);
  const Rect& window() const { return window_; }
  // |X ∩ box| for a box inside the window.
  int64_t box_sum(const Rect& box) const;
  // Max over all stride-1 cubes of side s in the window of | |X∩Q| - delta s^d |.
  double max_cube_deviation(int64_t side, double delta) const;

 private:
  Rect window_;
  std::array<int64_t, kMaxDim> pst_{};  // strides of the padded table
  std::vector<int64_t> s_;
};

double cube_discrepancy(const CellSet& x, double delta, int i, const Rect& window);
int64_t rect_discrepancy_pair(const CellSet& a, const CellSet& b, const CellSet& y);
double density_discrepancy(const CellSet& x, double delta, const Rect& r);

// Random finite sets used by the audit: unions of rectangles or random-walk blobs.
CellSet random_test_set(const Rect& within, uint64_t draw, uint64_t seed);

struct LaczkovichAudit {
  double max_ratio = 0;
  int64_t argmax_sample = -1;
};
LaczkovichAudit laczkovich_bound_audit(const CellSet& x, double delta, int64_t samples, uint64_t seed);

struct DiscrepancyProfile {
  std::vector<int64_t> scales;
  std::vector<double> max_dev;
  double fitted_exponent = 0;
  int fit_lo = 2, fit_hi = 0;
};
DiscrepancyProfile profile(const CellSet& x, double delta, const Rect& window, int i_max);
std::string profile_csv(const DiscrepancyProfile& p);
nlohmann::json profile_json(const DiscrepancyProfile& p);

struct UniformityBudget {
  double delta = 0;
  std::vector<double> psi;  // psi[i] = Psi(2^i)
  std::vector<double> phi;  // phi[i] = 2^i psi[i]
  static UniformityBudget from_psi(double delta, std::vector<double> psi);
  // Phi taken as the measured cube discrepancy of a profile.
  static UniformityBudget from_profile(double delta, const DiscrepancyProfile& p);
};

struct SummabilityReport {
  std::vector<double> psi_partial;  // sum_{i<=n} Psi(2^i) / 2^{(d-2)i}
  std::vector<double> phi_partial;  // sum_{i<=n} Phi(2^i) / 2^{(d-1)i}
  bool monotone_tail = false;       // last 3 increments of the Psi sum strictly decreasing
  bool phi_monotone_tail = false;
};
SummabilityReport summability_report(const UniformityBudget& b, int d, int horizon);
nlohmann::json summability_json(const SummabilityReport& r);

}  // namespace eqd
