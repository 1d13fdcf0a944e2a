#include "eqd/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "eqd/rng.hpp"

namespace eqd {

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  static const std::set<std::string> known{"shape_a", "shape_b", "k",      "d",       "m_cap", "seed",
                                           "window",  "base",    "vectors", "ladder", "levels", "radii",
                                           "horizon", "i_max",   "samples"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ArgumentError("unknown config key '" + key + "'");
  RunConfig c;
  c.base_dir = base_dir;
  try {
    if (j.contains("shape_a")) c.shape_a = j["shape_a"];
    if (j.contains("shape_b")) c.shape_b = j["shape_b"];
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("d")) c.d = j["d"].get<int>();
    if (j.contains("m_cap")) c.m_cap = j["m_cap"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("window")) c.window = j["window"].get<int64_t>();
    if (j.contains("base")) c.base = j["base"].get<std::vector<double>>();
    if (j.contains("vectors")) c.vectors = j["vectors"].get<std::vector<std::vector<double>>>();
    if (j.contains("ladder")) c.ladder = j["ladder"].get<std::vector<int64_t>>();
    if (j.contains("levels")) c.levels = j["levels"].get<int>();
    if (j.contains("radii")) c.radii = j["radii"].get<std::vector<int64_t>>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<int64_t>();
    if (j.contains("i_max")) c.i_max = j["i_max"].get<int>();
    if (j.contains("samples")) c.samples = j["samples"].get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("malformed config JSON in " + path + ": " + e.what());
  }
  return from_json(j, std::filesystem::path(path).parent_path().string());
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {{"shape_a", shape_a}, {"shape_b", shape_b}, {"k", k},           {"d", d},
                      {"m_cap", m_cap},     {"seed", seed},       {"window", window}, {"ladder", ladder},
                      {"levels", levels},   {"radii", radii},     {"horizon", horizon}, {"i_max", i_max},
                      {"samples", samples}};
  if (!base.empty()) j["base"] = base;
  if (!vectors.empty()) j["vectors"] = vectors;
  return j;
}

void RunConfig::validate() const {
  if (d < 1 || d > kMaxDim) throw ArgumentError("d must lie in [1, 4]");
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (m_cap < 1) throw ArgumentError("m_cap must be >= 1");
  if (window < 1) throw ArgumentError("window must be >= 1");
  if (!base.empty() && static_cast<int>(base.size()) != k) throw ArgumentError("base must have k coordinates");
  if (!vectors.empty()) {
    if (static_cast<int>(vectors.size()) != d) throw ArgumentError("vectors must list d torus vectors");
    for (const auto& v : vectors)
      if (static_cast<int>(v.size()) != k) throw ArgumentError("each vector needs k coordinates");
  }
  if (samples < 1) throw ArgumentError("samples must be positive");
  if (a().k() != k || b().k() != k) throw ArgumentError("shapes must live in T^k");
}

Shape RunConfig::a() const { return shape_from_json(shape_a, base_dir); }
Shape RunConfig::b() const { return shape_from_json(shape_b, base_dir); }

FreeVectorSystem RunConfig::system() const {
  if (vectors.empty()) return sample_free_system(seed, k, d, m_cap);
  std::vector<TorusPoint> vs;
  for (const auto& v : vectors) vs.emplace_back(v);
  return make_system(std::move(vs), m_cap, seed);
}

TorusPoint RunConfig::base_point() const {
  if (!base.empty()) return TorusPoint(base);
  Rng rng(seed, "base");
  std::vector<double> u(k);
  for (auto& x : u) x = rng.uniform();
  return TorusPoint(u);
}

CosetWindow RunConfig::extract() const { return extract_window(a(), b(), system(), base_point(), window_rect()); }

}  // namespace eqd
