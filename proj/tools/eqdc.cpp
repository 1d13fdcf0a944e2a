// eqdc: discrepancy audits, matching pipelines, stored-run checks and renders.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "eqd/baire.hpp"
#include "eqd/checks/suites.hpp"
#include "eqd/config.hpp"
#include "eqd/discrepancy.hpp"
#include "eqd/io.hpp"
#include "eqd/lebesgue.hpp"
#include "eqd/parallel.hpp"
#include "eqd/rng.hpp"

namespace fs = std::filesystem;
using namespace eqd;

namespace {

enum Exit { kOk = 0, kAssert = 1, kUsage = 2, kResource = 3 };

struct AssertionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string out = ".";
  int64_t seed = -1;
  int64_t window = 0;
  int mcap = 0;
};

RunConfig load_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : RunConfig::from_file(c.config);
  if (c.seed >= 0) cfg.seed = static_cast<uint64_t>(c.seed);
  if (c.window > 0) cfg.window = c.window;
  if (c.mcap > 0) cfg.m_cap = c.mcap;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Common& c) {
  fs::path p(c.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ResourceError("cannot create output directory " + c.out);
  return p;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw ResourceError("cannot write " + p.string());
  f << s;
}

int cmd_audit(const Common& c) {
  const RunConfig cfg = load_config(c);
  const CosetWindow win = cfg.extract();
  const int i_max = cfg.i_max >= 0 ? cfg.i_max : std::max(0, ilog2(cfg.window) - 2);
  const fs::path dir = out_dir(c);
  nlohmann::json report = {{"config", cfg.to_json()}};
  for (const auto& [name, bits, shape] :
       {std::tuple{"a", &win.a_bits, cfg.a()}, std::tuple{"b", &win.b_bits, cfg.b()}}) {
    const double delta = shape_measure(shape);
    const auto prof = profile(*bits, delta, win.window, i_max);
    write_text(dir / (std::string("profile_") + name + ".csv"), profile_csv(prof));
    const auto budget = UniformityBudget::from_profile(delta, prof);
    const auto dim = boundary_dimension_estimate(shape, {0.08, 0.04, 0.02, 0.01, 0.005}, cfg.samples,
                                                 substream_seed(cfg.seed, name));
    nlohmann::json bd;
    bd["fitted"] = dim.fitted_dimension;
    bd["std_error"] = dim.std_error;
    bd["error"] = dim.error;
    bd["message"] = dim.error_message;
    bd["eps"] = dim.eps_ladder;
    bd["measures"] = dim.neighborhood_measures;
    nlohmann::json side;
    side["delta"] = delta;
    side["profile"] = profile_json(prof);
    side["summability"] = summability_json(summability_report(budget, cfg.d, i_max));
    side["boundary_dimension"] = bd;
    report[name] = side;
    std::cout << name << ": delta " << delta << ", fitted exponent " << prof.fitted_exponent
              << ", boundary dimension " << (dim.error ? std::nan("") : dim.fitted_dimension) << "\n";
  }
  const auto rel = integer_relation_diagnostic(win.sys);
  report["integer_relation"] = {{"found", rel.relation_found}, {"residual", rel.residual},
                                {"bound", rel.coefficient_bound}};
  write_text(dir / "audit.json", report.dump(2) + "\n");
  return kOk;
}

int cmd_square(const Common& c, const std::string& ladder, int levels) {
  RunConfig cfg = load_config(c);
  if (!ladder.empty()) {
    cfg.ladder.clear();
    std::stringstream ss(ladder);
    for (std::string t; std::getline(ss, t, ',');) cfg.ladder.push_back(std::stoll(t));
  }
  if (levels >= 0) cfg.levels = levels;
  const CosetWindow win = cfg.extract();
  LebesgueConfig lc;
  lc.ladder = cfg.ladder;
  lc.levels = cfg.levels;
  const PipelineResult res = run_pipeline(win, lc);
  nlohmann::json reports = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : res.reports) {
    reports.push_back(report_json(r));
    std::cout << "level " << r.level << " (N=" << r.n_cube << "): unmatched " << r.unmatched_fraction
              << ", changed prune/rematch/refine " << r.prune_fraction << "/" << r.rematch_fraction << "/"
              << r.refine_fraction << "\n";
    ok = ok && r.edges_outside_cubes == 0 && r.cubes_with_short_path == 0 && r.cubes_two_sided_unmatched == 0 &&
         r.cubes_unmatched_above_discrepancy == 0;
  }
  nlohmann::json manifest = {{"command", "square"}, {"config", cfg.to_json()}, {"reports", reports},
                             {"margin", res.margin}};
  const fs::path dir = out_dir(c);
  RunFile run = make_run_file(win, res.matching, manifest, kFlagLebesgue);
  save_run((dir / "run.eqdc").string(), run);
  write_text(dir / "reports.json", reports.dump(2) + "\n");
  if (!ok) throw AssertionFailed("pipeline invariant counters are non-zero");
  return kOk;
}

int cmd_baire(const Common& c, const std::string& radii, int64_t horizon) {
  RunConfig cfg = load_config(c);
  if (!radii.empty()) {
    cfg.radii.clear();
    std::stringstream ss(radii);
    for (std::string t; std::getline(ss, t, ',');) cfg.radii.push_back(std::stoll(t));
  }
  if (horizon > 0) cfg.horizon = horizon;
  const CosetWindow win = cfg.extract();
  BaireConfig bc;
  bc.radii = cfg.radii;
  bc.horizon = cfg.horizon;
  const BaireResult res = run_baire(win, bc);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  nlohmann::json reports = nlohmann::json::array(), holes = nlohmann::json::array();
  bool ok = !res.aborted;
  for (const auto& r : res.reports) {
    reports.push_back(baire_report_json(r));
    std::cout << "level " << r.level << " (r=" << r.radius << ", j=" << r.horizon << "): net " << r.net_cells
              << ", added " << r.added << ", failures " << r.failures << ", hall " << (r.hall_ok ? "ok" : "FAIL")
              << "\n";
    ok = ok && r.failures == 0 && r.added_sparse && r.nets_covered && (r.hall_ok || !r.condition_holds);
  }
  for (const auto& h : res.failure_holes) holes.push_back(hole_report_json(h));
  nlohmann::json manifest = {{"command", "baire"}, {"config", cfg.to_json()}, {"reports", reports}};
  const fs::path dir = out_dir(c);
  save_run((dir / "run.eqdc").string(), make_run_file(win, res.matching, manifest, kFlagBaire));
  write_text(dir / "baire.json",
             nlohmann::json{{"reports", reports}, {"warnings", res.warnings}, {"holes", holes}, {"aborted", res.aborted}}
                     .dump(2) +
                 "\n");
  if (!ok) throw AssertionFailed("greedy run failed its checks");
  return kOk;
}

int cmd_verify(const std::string& path) {
  RunFile run;
  try {
    run = load_run(path);
  } catch (const LoadError& e) {
    std::cout << "FAIL " << e.what() << "\n";
    return kAssert;
  }
  const VerifyReport rep = verify_run(run);
  for (const auto& e : rep.errors) std::cout << "FAIL " << e << "\n";
  if (rep.ok) std::cout << "PASS " << rep.matched << " matched cells\n";
  return rep.ok ? kOk : kAssert;
}

int cmd_render(const std::string& path, const std::string& side, int scale, const std::string& out) {
  if (side != "a" && side != "b") throw ArgumentError("--side must be a or b");
  const RunFile run = load_run(path);
  const PieceMap pm{run.window, run.m_cap, run.pieces};
  if (!piece_translation_identity(pm, run.a_bits, run.b_bits))
    throw AssertionFailed("piece-translation identity fails");
  const std::string img = render_pieces(pm, run.a_bits, run.b_bits, side == "a" ? RenderSide::A : RenderSide::B, scale);
  write_text(out, img);
  std::cout << "sha256 " << sha256_hex(img.data(), img.size()) << "\n";
  return kOk;
}

int cmd_lemma_tests(const Common& c, const std::vector<std::string>& suites) {
  const uint64_t seed = c.seed >= 0 ? static_cast<uint64_t>(c.seed) : 1;
  std::vector<std::string> names = suites.empty() ? checks::suite_names() : suites;
  for (const auto& n : names) {
    const auto all = checks::suite_names();
    if (std::find(all.begin(), all.end(), n) == all.end()) throw ArgumentError("unknown suite '" + n + "'");
  }
  nlohmann::json out = nlohmann::json::array();
  bool ok = true;
  for (const auto& n : names) {
    const auto r = checks::run_suite(n, seed);
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.cases << " cases, " << r.violations
              << " violations (" << r.detail << ")\n";
    out.push_back(checks::suite_json(r));
    ok = ok && r.pass;
  }
  if (c.out != ".") write_text(out_dir(c) / "lemma_tests.json", out.dump(2) + "\n");
  return ok ? kOk : kAssert;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equidecomposition pipelines on lattice windows"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: available parallelism)")->check(CLI::NonNegativeNumber);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON run config");
    sub->add_option("--seed", common.seed, "RNG seed (overrides the config)");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--window", common.window, "window side L");
    sub->add_option("--mcap", common.mcap, "translation bound M");
  };

  auto* audit = app.add_subcommand("audit", "discrepancy profiles and boundary dimension");
  add_common(audit);

  std::string ladder;
  int levels = -1;
  auto* square = app.add_subcommand("square", "multi-scale matching pipeline");
  add_common(square);
  square->add_option("--ladder", ladder, "comma-separated cube sides");
  square->add_option("--levels", levels, "last level index");

  std::string radii;
  int64_t horizon = 0;
  auto* baire = app.add_subcommand("baire", "greedy matching over sparse nets");
  add_common(baire);
  baire->add_option("--radii", radii, "comma-separated net radii");
  baire->add_option("--horizon", horizon, "oracle horizon (default: twice the radius)");

  std::string path;
  auto* verify = app.add_subcommand("verify", "check a stored run");
  verify->add_option("path", path, "EQDC file")->required();

  std::string side = "a", image;
  int scale = 1;
  auto* render = app.add_subcommand("render", "render a stored run as PPM");
  render->add_option("path", path, "EQDC file")->required();
  render->add_option("--side", side, "a or b");
  render->add_option("--scale", scale, "pixels per cell")->check(CLI::PositiveNumber);
  render->add_option("--out", image, "output PPM")->required();

  std::vector<std::string> suites;
  auto* lemma = app.add_subcommand("lemma-tests", "property suites");
  lemma->add_option("--suite", suites, "suite name (repeatable)");
  lemma->add_option("--seed", common.seed, "suite seed");
  lemma->add_option("--out", common.out, "output directory for JSON results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  set_thread_count(threads);
  try {
    if (*audit) return cmd_audit(common);
    if (*square) return cmd_square(common, ladder, levels);
    if (*baire) return cmd_baire(common, radii, horizon);
    if (*verify) return cmd_verify(path);
    if (*render) return cmd_render(path, side, scale, image);
    if (*lemma) return cmd_lemma_tests(common, suites);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const AssertionFailed& e) {
    std::cerr << "assertion failed: " << e.what() << "\n";
    return kAssert;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kAssert;
  } catch (const LoadError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kAssert;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResource;
  } catch (const PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << "\n";
    return kResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource error: out of memory\n";
    return kResource;
  }
  return kUsage;
}
