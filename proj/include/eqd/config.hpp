#pragma once
// Run configuration shared by the command-line tool and the test drivers.

#include <cstdint>
#include <string>
#include <vector>

#include "eqd/coset_window.hpp"
#include "json.hpp"

namespace eqd {

struct RunConfig {
  nlohmann::json shape_a = {{"type", "disk"}, {"center", {0.5, 0.5}}, {"radius", 0.2185096861184158}};
  nlohmann::json shape_b = {{"type", "square"}, {"corner", {0.30635083268962915, 0.30635083268962915}},
                            {"side", 0.3872983346207417}};
  int k = 2, d = 2, m_cap = 8;
  uint64_t seed = 7;
  int64_t window = 1024;
  std::vector<double> base;                  // empty: drawn from the "base" sub-stream
  std::vector<std::vector<double>> vectors;  // empty: drawn from the "vectors" sub-stream
  std::vector<int64_t> ladder{8, 32, 128};
  int levels = 2;
  std::vector<int64_t> radii{32, 96, 288};
  int64_t horizon = 0;  // 0: twice the level radius
  int i_max = -1;       // -1: log2(window) - 2
  int64_t samples = 100000;
  std::string base_dir;  // for relative shape paths

  // Unknown keys and ill-typed values raise ArgumentError.
  static RunConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
  static RunConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;

  Shape a() const;
  Shape b() const;
  FreeVectorSystem system() const;
  TorusPoint base_point() const;
  Rect window_rect() const { return Rect::centered(d, window); }
  CosetWindow extract() const;
};

}  // namespace eqd
