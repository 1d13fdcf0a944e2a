#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kExe = EQDC_PATH;
const std::string kConfigs = EQDC_CONFIGS;

struct Outcome {
  int code = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("eqdc_cli_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome run(const std::string& args) {
  const fs::path log = scratch() / "last.log";
  const std::string cmd = kExe + " " + args + " > " + log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  o.out = slurp(log);
  return o;
}

std::string cfg(const char* name) { return kConfigs + "/" + name; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("render").code == 2);
  CHECK(run("lemma-tests --suite no_such_suite").code == 2);

  const fs::path bad = scratch() / "bad.json";
  std::ofstream(bad) << "{ \"m_cap\": 4, ";
  CHECK(run("square --config " + bad.string()).code == 2);
  const fs::path unknown = scratch() / "unknown.json";
  std::ofstream(unknown) << R"({"m_cap": 4, "colour": "red"})";
  CHECK(run("square --config " + unknown.string()).code == 2);

  auto small = run("square --config " + cfg("disk_square.json") + " --window 64 --out " +
                   (scratch() / "small").string());
  CHECK(small.code == 2);
  CHECK(small.out.find("too small") != std::string::npos);
}

TEST_CASE("audit writes one profile row per scale and is reproducible") {
  const auto a = scratch() / "audit1", b = scratch() / "audit2";
  auto r1 = run("--threads 1 audit --config " + cfg("disk_square.json") + " --window 256 --out " + a.string());
  REQUIRE(r1.code == 0);
  auto r2 = run("--threads 3 audit --config " + cfg("disk_square.json") + " --window 256 --out " + b.string());
  REQUIRE(r2.code == 0);
  for (const char* f : {"profile_a.csv", "profile_b.csv", "audit.json"}) CHECK(slurp(a / f) == slurp(b / f));

  // i_max defaults to log2(L) - 2 = 6: header plus rows i = 0..6.
  std::istringstream csv(slurp(a / "profile_a.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 1 + 7);

  auto j = nlohmann::json::parse(slurp(a / "audit.json"));
  for (const char* side : {"a", "b"}) {
    REQUIRE(j.contains(side));
    CHECK(j[side].contains("summability"));
    CHECK(j[side].contains("boundary_dimension"));
    CHECK(j[side]["profile"]["max_dev"].size() == 7);
  }
}

TEST_CASE("identity shapes are matched completely at level zero") {
  const auto out = scratch() / "identity";
  auto r = run("square --config " + cfg("identity.json") + " --out " + out.string());
  REQUIRE(r.code == 0);
  auto reps = nlohmann::json::parse(slurp(out / "reports.json"));
  REQUIRE(reps.size() == 1);
  CHECK(reps[0]["core_unmatched_a"] == 0);
  CHECK(reps[0]["core_a_cells"].get<int64_t>() > 0);
  CHECK(run("verify " + (out / "run.eqdc").string()).code == 0);
}

TEST_CASE("greedy run with empty nets leaves the matching empty") {
  const auto out = scratch() / "empty";
  auto r = run("baire --config " + cfg("empty.json") + " --out " + out.string());
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(slurp(out / "baire.json"));
  for (const auto& lv : j["reports"]) {
    CHECK(lv["net_cells"] == 0);
    CHECK(lv["added"] == 0);
  }
  auto v = run("verify " + (out / "run.eqdc").string());
  CHECK(v.code == 0);
  CHECK(v.out.find("PASS 0 matched") != std::string::npos);
}

TEST_CASE("verify and render on a fresh and a corrupted file") {
  const auto out = scratch() / "sq";
  auto r = run("square --config " + cfg("disk_square.json") + " --window 256 --ladder 4,16,64 --levels 1 --out " + out.string());
  REQUIRE(r.code == 0);
  const auto file = out / "run.eqdc";
  auto v = run("verify " + file.string());
  CHECK(v.code == 0);
  CHECK(v.out.find("PASS") != std::string::npos);

  const auto img1 = scratch() / "a1.ppm", img2 = scratch() / "a2.ppm";
  CHECK(run("--threads 1 render " + file.string() + " --side a --scale 2 --out " + img1.string()).code == 0);
  CHECK(run("--threads 4 render " + file.string() + " --side a --scale 2 --out " + img2.string()).code == 0);
  CHECK(slurp(img1) == slurp(img2));
  CHECK(slurp(img1).rfind("P6\n512 512\n255\n", 0) == 0);
  CHECK(run("render " + file.string() + " --side c --out " + img1.string()).code == 2);

  std::string bytes = slurp(file);
  bytes[200] = static_cast<char>(bytes[200] ^ 0x10);
  const auto bad = scratch() / "flipped.eqdc";
  std::ofstream(bad, std::ios::binary) << bytes;
  auto f = run("verify " + bad.string());
  CHECK(f.code == 1);
  CHECK(f.out.find("hash") != std::string::npos);
  CHECK(run("verify " + (scratch() / "missing.eqdc").string()).code != 0);
}

TEST_CASE("single suite selection") {
  const auto out = scratch() / "suites";
  auto r = run("lemma-tests --suite hall --seed 5 --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("hall") != std::string::npos);
  CHECK(r.out.find("equivariance") == std::string::npos);
}
