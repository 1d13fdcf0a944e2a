#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "eqd/io.hpp"
#include "eqd/rng.hpp"

using namespace eqd;

namespace {

const FreeVectorSystem& sys4() {
  static const FreeVectorSystem s = sample_free_system(7, 2, 2, 4);
  return s;
}

Shape disk() { return make_disk({0.5, 0.5}, std::sqrt(0.15 / M_PI)); }
Shape square() {
  const double side = std::sqrt(0.15);
  return make_square({0.5 - side / 2, 0.5 - side / 2}, side);
}

nlohmann::json shapes_manifest() {
  const double side = std::sqrt(0.15);
  return {{"config",
           {{"shape_a", {{"type", "disk"}, {"center", {0.5, 0.5}}, {"radius", std::sqrt(0.15 / M_PI)}}},
            {"shape_b", {{"type", "square"}, {"corner", {0.5 - side / 2, 0.5 - side / 2}}, {"side", side}}}}}};
}

struct Demo {
  CosetWindow win;
  Matching m;
  RunFile run;
};

Demo demo(int64_t side = 48) {
  Rect w = Rect::centered(2, side);
  auto win = extract_window(disk(), square(), sys4(), TorusPoint({0.3, 0.6}), w);
  TranslationGraph g(win.a_bits, win.b_bits, 4);
  Matching m = canonical_max_matching(g, w);
  RunFile run = make_run_file(win, m, shapes_manifest(), kFlagLebesgue);
  return {win, m, run};
}

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / (std::string("eqd_io_") + name)).string();
}

}  // namespace

TEST_CASE("sha256 of known inputs") {
  CHECK(sha256_hex("", 0) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc", 3) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("piece map bounds") {
  Matching m127(Rect::centered(2, 4), 127);
  CHECK_NOTHROW(piece_map(m127));
  Matching m128(Rect::centered(2, 4), 128);
  CHECK_THROWS_AS(piece_map(m128), ArgumentError);
  Matching m19(Rect::centered(3, 4), 19);
  CHECK_NOTHROW(piece_map(m19));
  Matching m20(Rect::centered(3, 4), 20);
  CHECK_THROWS_AS(piece_map(m20), ArgumentError);
}

TEST_CASE("piece indices follow the offset order") {
  auto d = demo();
  auto pm = piece_map(d.m);
  const Rect& w = d.win.window;
  int64_t matched = 0;
  for (int64_t a = 0; a < w.volume(); ++a) {
    const int32_t b = d.m.partner_of_a(a);
    if (b == kNone) {
      CHECK(pm.pieces[a] == kNoPiece);
      continue;
    }
    ++matched;
    IVec o = w.point(b) - w.point(a);
    CHECK(pm.pieces[a] == (o[0] + 4) * 9 + (o[1] + 4));
  }
  CHECK(matched == d.m.size());
  CHECK(piece_translation_identity(pm, d.win.a_bits, d.win.b_bits));
  auto bs = b_side_pieces(pm);
  for (int64_t b = 0; b < w.volume(); ++b) {
    const int32_t a = d.m.partner_of_b(b);
    CHECK(bs[b] == (a == kNone ? kNoPiece : pm.pieces[a]));
  }
}

TEST_CASE("run files round trip bit for bit") {
  auto d = demo();
  auto bytes = encode_run(d.run);
  auto back = decode_run(bytes);
  CHECK(back.d == 2);
  CHECK(back.k == 2);
  CHECK(back.m_cap == 4);
  CHECK(back.flags == kFlagLebesgue);
  CHECK(back.window == d.run.window);
  CHECK(back.a_bits.data() == d.run.a_bits.data());
  CHECK(back.b_bits.data() == d.run.b_bits.data());
  CHECK(back.pieces == d.run.pieces);
  CHECK(back.manifest == d.run.manifest);
  CHECK(encode_run(back) == bytes);

  // Full-precision vectors survive the JSON manifest.
  auto win = window_of(back);
  REQUIRE(win.sys.vectors.size() == sys4().vectors.size());
  for (size_t i = 0; i < win.sys.vectors.size(); ++i) CHECK(win.sys.vectors[i].x == sys4().vectors[i].x);
  CHECK(win.base.x == d.win.base.x);
  CHECK(matching_of(back) == d.m);

  const auto path = tmp_path("roundtrip.eqdc");
  save_run(path, d.run);
  CHECK(read_bytes(path) == bytes);
  CHECK(load_run(path).pieces == d.run.pieces);
  std::remove(path.c_str());

  auto rep = verify_run(back);
  CHECK(rep.ok);
  CHECK(rep.matched == d.m.size());
}

TEST_CASE("corrupted files raise distinct errors") {
  auto d = demo();
  const auto good = encode_run(d.run);

  auto magic = good;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_run(magic), MagicError);

  auto version = good;
  version[7] ^= 1;
  CHECK_THROWS_AS(decode_run(version), VersionError);

  for (size_t cut : {size_t(2), size_t(20), size_t(200), good.size() / 2}) {
    std::vector<uint8_t> t(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    CHECK_THROWS_AS(decode_run(t), TruncatedError);
  }

  // Header is 8 bytes of magic/version, then (3 + 2d + 1) int64 fields; piece grid follows two bit grids.
  const size_t header = 8 + 8 * (3 + 2 * 2 + 1);
  const size_t gb = (static_cast<size_t>(d.run.window.volume()) + 7) / 8;
  auto piece = good;
  piece[header + 2 * gb + 10] ^= 0x01;
  CHECK_THROWS_AS(decode_run(piece), HashError);

  auto abit = good;
  abit[header + 3] ^= 0x80;
  CHECK_THROWS_AS(decode_run(abit), HashError);

  // A digit inside the manifest: still valid JSON, wrong hash.
  auto manifest = good;
  const std::string tail(good.begin() + static_cast<std::ptrdiff_t>(header + 2 * gb + 2 * d.run.window.volume()),
                         good.end());
  const size_t at = tail.find("\"rng_seed\":");
  REQUIRE(at != std::string::npos);
  const size_t pos = header + 2 * gb + 2 * d.run.window.volume() + at + 11;
  manifest[pos] = manifest[pos] == '9' ? '8' : '9';
  CHECK_THROWS_AS(decode_run(manifest), HashError);

  auto broken = good;
  broken.back() = '#';
  CHECK_THROWS_AS(decode_run(broken), FormatError);

  CHECK_THROWS_AS(decode_run(std::vector<uint8_t>{}), TruncatedError);
}

TEST_CASE("doubly matched fixture is rejected") {
  auto d = demo(16);
  RunFile run = d.run;
  const Rect& w = run.window;
  // Two horizontally adjacent A-cells pointing at the same B-cell.
  int64_t a0 = -1;
  for (int64_t i = 0; i + 1 < w.volume() && a0 < 0; ++i) {
    IVec p = w.point(i), q = p;
    q.c[1] += 1;
    IVec target = q;
    if (w.contains(q) && run.a_bits.at(i) && run.a_bits.contains(q) && run.b_bits.contains(target)) a0 = i;
  }
  REQUIRE(a0 >= 0);
  std::fill(run.pieces.begin(), run.pieces.end(), kNoPiece);
  run.pieces[a0] = static_cast<uint16_t>((0 + 4) * 9 + (1 + 4));  // offset (0, 1)
  run.pieces[a0 + 1] = static_cast<uint16_t>((0 + 4) * 9 + (0 + 4));  // offset (0, 0)
  auto rep = verify_run(run);
  CHECK_FALSE(rep.ok);
  bool injectivity = false;
  for (const auto& e : rep.errors) injectivity |= e.find("injectivity") != std::string::npos;
  CHECK(injectivity);
  CHECK_THROWS_AS(matching_of(run), InvariantError);
}

TEST_CASE("verify catches grids that do not match the recorded shapes") {
  auto d = demo(16);
  RunFile run = d.run;
  run.pieces.assign(run.pieces.size(), kNoPiece);
  CHECK(verify_run(run).ok);
  for (int64_t i = 0; i < run.window.volume(); ++i)
    if (!run.a_bits.at(i)) {
      run.a_bits.set_index(i, true);
      break;
    }
  auto rep = verify_run(run);
  CHECK_FALSE(rep.ok);
}

TEST_CASE("render silhouettes") {
  auto d = demo(32);
  const Rect& w = d.win.window;
  const std::string head = "P6\n64 64\n255\n";

  Matching empty(w, 4);
  auto pm0 = piece_map(empty);
  auto img = render_pieces(pm0, d.win.a_bits, d.win.b_bits, RenderSide::A, 2);
  REQUIRE(img.size() == head.size() + 64 * 64 * 3);
  CHECK(img.substr(0, head.size()) == head);
  std::set<std::array<uint8_t, 3>> colours;
  for (int64_t r = 0; r < 64; ++r)
    for (int64_t c = 0; c < 64; ++c) {
      const char* q = img.data() + head.size() + (r * 64 + c) * 3;
      std::array<uint8_t, 3> px{uint8_t(q[0]), uint8_t(q[1]), uint8_t(q[2])};
      colours.insert(px);
      const bool in_a = d.win.a_bits.at(w.index(w.low + IVec{r / 2, c / 2}));
      CHECK(px == (in_a ? std::array<uint8_t, 3>{64, 64, 64} : std::array<uint8_t, 3>{255, 255, 255}));
    }
  CHECK(colours.size() == 2);

  // Identity instance: every A-cell sits on piece 0 offset and both sides look the same.
  Matching id(w, 4);
  for (int64_t i = 0; i < w.volume(); ++i)
    if (d.win.a_bits.at(i)) id.add(i, i);
  auto pmi = piece_map(id);
  CHECK(piece_translation_identity(pmi, d.win.a_bits, d.win.a_bits));
  auto ia = render_pieces(pmi, d.win.a_bits, d.win.a_bits, RenderSide::A, 1);
  auto ib = render_pieces(pmi, d.win.a_bits, d.win.a_bits, RenderSide::B, 1);
  CHECK(ia == ib);

  CHECK_THROWS_AS(render_pieces(pm0, d.win.a_bits, d.win.b_bits, RenderSide::A, 0), ArgumentError);
  Matching m3(Rect::centered(3, 4), 2);
  CHECK_THROWS_AS(render_pieces(piece_map(m3), CellSet(Rect::centered(3, 4)), CellSet(Rect::centered(3, 4)),
                                RenderSide::A, 1),
                  ArgumentError);
}

TEST_CASE("piece colours are deterministic and distinct from the fixed tones") {
  std::set<std::array<uint8_t, 3>> seen;
  for (uint16_t v = 0; v < 81; ++v) {
    auto c = piece_color(v);
    CHECK(c == piece_color(v));
    for (uint8_t x : c) {
      CHECK(x >= 32);
      CHECK(x <= 223);
    }
    seen.insert(c);
  }
  CHECK(seen.size() == 81);
}

TEST_CASE("golden render of the demo run") {
  auto d = demo(48);
  auto pm = piece_map(d.m);
  auto a = render_pieces(pm, d.win.a_bits, d.win.b_bits, RenderSide::A, 2);
  auto b = render_pieces(pm, d.win.a_bits, d.win.b_bits, RenderSide::B, 2);
  CHECK(sha256_hex(a.data(), a.size()) == "4d3730b48b00fa429f94ff3226f87c17eae7f8388beee2990dae51a01c7fa8e0");
  CHECK(sha256_hex(b.data(), b.size()) == "6842831e74bf4cf36fd35533bbd4f4acb615856ace17c92b7efb53f65554434e");
}
