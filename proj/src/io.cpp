#include "eqd/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "eqd/parallel.hpp"
#include "eqd/rng.hpp"
#include "eqd/torus.hpp"

namespace eqd {

namespace {

constexpr char kMagic[4] = {'E', 'Q', 'D', 'C'};
constexpr char kVersion[4] = {'0', '0', '0', '1'};

int64_t piece_count(int d, int m_cap) {
  int64_t n = 1;
  for (int j = 0; j < d; ++j) n *= 2 * int64_t(m_cap) + 1;
  return n;
}

void check_piece_bound(int d, int m_cap) {
  if (piece_count(d, m_cap) >= kNoPiece)
    throw ArgumentError("(2M+1)^d = " + std::to_string(piece_count(d, m_cap)) +
                        " does not fit 16-bit piece indices (limit 65534)");
}

void put_i64(std::vector<uint8_t>& out, int64_t v) {
  auto u = static_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(u >> (8 * i)));
}

class Reader {
 public:
  Reader(const std::vector<uint8_t>& b) : b_(b) {}
  void need(size_t n, const char* what) const {
    if (pos_ + n > b_.size()) throw TruncatedError(std::string("file truncated in ") + what);
  }
  int64_t i64(const char* what) {
    need(8, what);
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= uint64_t(b_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return static_cast<int64_t>(u);
  }
  const uint8_t* take(size_t n, const char* what) {
    need(n, what);
    const uint8_t* p = b_.data() + pos_;
    pos_ += n;
    return p;
  }
  size_t pos() const { return pos_; }
  size_t remaining() const { return b_.size() - pos_; }

 private:
  const std::vector<uint8_t>& b_;
  size_t pos_ = 0;
};

size_t bit_grid_bytes(const Rect& w) {
  const int64_t row = w.sides.c[w.dim() - 1];
  return static_cast<size_t>((w.volume() / row) * ((row + 7) / 8));
}

void put_bits(std::vector<uint8_t>& out, const CellSet& s) {
  const Rect& w = s.rect();
  const int64_t row = w.sides.c[w.dim() - 1], rows = w.volume() / row, rb = (row + 7) / 8;
  const size_t at = out.size();
  out.resize(at + static_cast<size_t>(rows * rb), 0);
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < row; ++c)
      if (s.at(r * row + c)) out[at + r * rb + c / 8] |= static_cast<uint8_t>(1u << (c % 8));
}

CellSet get_bits(const uint8_t* p, const Rect& w) {
  CellSet s(w);
  const int64_t row = w.sides.c[w.dim() - 1], rows = w.volume() / row, rb = (row + 7) / 8;
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < row; ++c) s.set_index(r * row + c, (p[r * rb + c / 8] >> (c % 8)) & 1u);
  return s;
}

}  // namespace

std::string sha256_hex(const void* data, size_t n) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, n, md, &len, EVP_sha256(), nullptr) != 1) throw ResourceError("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s.push_back(hex[md[i] >> 4]);
    s.push_back(hex[md[i] & 15]);
  }
  return s;
}

PieceMap piece_map(const Matching& m) {
  const Rect& w = m.window();
  check_piece_bound(w.dim(), m.m_cap());
  PieceMap pm{w, m.m_cap(), std::vector<uint16_t>(static_cast<size_t>(w.volume()), kNoPiece)};
  for (int64_t a = 0; a < w.volume(); ++a) {
    int32_t b = m.partner_of_a(a);
    if (b != kNone) pm.pieces[a] = static_cast<uint16_t>(offset_index(w.point(b) - w.point(a), m.m_cap()));
  }
  return pm;
}

std::vector<uint16_t> b_side_pieces(const PieceMap& pm) {
  const Rect& w = pm.window;
  std::vector<uint16_t> out(pm.pieces.size(), kNoPiece);
  for (int64_t a = 0; a < w.volume(); ++a) {
    if (pm.pieces[a] == kNoPiece) continue;
    IVec b = w.point(a) + offset_from_index(pm.pieces[a], w.dim(), pm.m_cap);
    if (w.contains(b)) out[w.index(b)] = pm.pieces[a];
  }
  return out;
}

bool piece_translation_identity(const PieceMap& pm, const CellSet& a_bits, const CellSet& b_bits) {
  const Rect& w = pm.window;
  const int64_t np = piece_count(w.dim(), pm.m_cap);
  const auto bside = b_side_pieces(pm);
  std::vector<int64_t> count_a(static_cast<size_t>(np), 0), count_b(static_cast<size_t>(np), 0);
  for (int64_t i = 0; i < w.volume(); ++i) {
    if (pm.pieces[i] != kNoPiece) {
      if (pm.pieces[i] >= np || !a_bits.at(i)) return false;
      IVec b = w.point(i) + offset_from_index(pm.pieces[i], w.dim(), pm.m_cap);
      if (!w.contains(b) || !b_bits.at(w.index(b)) || bside[w.index(b)] != pm.pieces[i]) return false;
      ++count_a[pm.pieces[i]];
    }
    if (bside[i] != kNoPiece) ++count_b[bside[i]];
  }
  return count_a == count_b;
}

RunFile make_run_file(const CosetWindow& win, const Matching& m, nlohmann::json manifest, int64_t flags) {
  RunFile run;
  run.d = win.sys.d;
  run.k = win.sys.k;
  run.m_cap = win.sys.m_cap;
  run.window = win.window;
  run.flags = flags;
  run.a_bits = win.a_bits;
  run.b_bits = win.b_bits;
  run.pieces = piece_map(m).pieces;
  nlohmann::json vecs = nlohmann::json::array();
  for (const auto& v : win.sys.vectors) vecs.push_back(v.x);
  manifest["system"] = {{"vectors", vecs}, {"m_cap", win.sys.m_cap}, {"rng_seed", win.sys.rng_seed}};
  manifest["base"] = win.base.x;
  manifest["window"] = {{"low", win.window.low.to_vector()}, {"sides", win.window.sides.to_vector()}};
  run.manifest = std::move(manifest);
  return run;
}

std::vector<uint8_t> encode_run(const RunFile& run) {
  const Rect& w = run.window;
  if (run.d != w.dim() || run.d < 1 || run.d > kMaxDim) throw ArgumentError("dimension mismatch");
  check_piece_bound(run.d, run.m_cap);
  if (!(run.a_bits.rect() == w) || !(run.b_bits.rect() == w) ||
      run.pieces.size() != static_cast<size_t>(w.volume()))
    throw ArgumentError("grids must cover the window");
  std::vector<uint8_t> out(kMagic, kMagic + 4);
  out.insert(out.end(), kVersion, kVersion + 4);
  const size_t h0 = out.size();
  put_i64(out, run.d);
  put_i64(out, run.k);
  put_i64(out, run.m_cap);
  for (int j = 0; j < run.d; ++j) put_i64(out, w.low.c[j]);
  for (int j = 0; j < run.d; ++j) put_i64(out, w.sides.c[j]);
  put_i64(out, run.flags);
  const size_t a0 = out.size();
  put_bits(out, run.a_bits);
  const size_t b0 = out.size();
  put_bits(out, run.b_bits);
  const size_t p0 = out.size();
  for (uint16_t v : run.pieces) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>(v >> 8));
  }
  const size_t e0 = out.size();
  const std::string body = run.manifest.dump();
  nlohmann::json top = {{"format_version", 1},
                        {"hashes",
                         {{"header", sha256_hex(out.data() + h0, a0 - h0)},
                          {"a_bits", sha256_hex(out.data() + a0, b0 - a0)},
                          {"b_bits", sha256_hex(out.data() + b0, p0 - b0)},
                          {"pieces", sha256_hex(out.data() + p0, e0 - p0)},
                          {"manifest", sha256_hex(body.data(), body.size())}}},
                        {"manifest", run.manifest}};
  const std::string js = top.dump();
  out.insert(out.end(), js.begin(), js.end());
  return out;
}

RunFile decode_run(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0) throw MagicError("not an EQDC file");
    throw TruncatedError("file truncated in magic");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw MagicError("not an EQDC file");
  if (std::memcmp(bytes.data() + 4, kVersion, 4) != 0)
    throw VersionError("unsupported EQDC version " + std::string(bytes.begin() + 4, bytes.begin() + 8));
  Reader rd(bytes);
  rd.take(8, "magic");
  const size_t h0 = rd.pos();
  RunFile run;
  const int64_t d = rd.i64("header"), k = rd.i64("header"), m = rd.i64("header");
  if (d < 1 || d > kMaxDim || k < 1 || m < 1 || m > 1 << 15) throw FormatError("header values out of range");
  run.d = static_cast<int>(d);
  run.k = static_cast<int>(k);
  run.m_cap = static_cast<int>(m);
  IVec low(run.d), sides(run.d);
  for (int j = 0; j < run.d; ++j) low.c[j] = rd.i64("header");
  for (int j = 0; j < run.d; ++j) sides.c[j] = rd.i64("header");
  run.flags = rd.i64("header");
  int64_t vol = 1;
  for (int j = 0; j < run.d; ++j) {
    if (sides.c[j] < 1 || sides.c[j] > (int64_t(1) << 31)) throw FormatError("window sides out of range");
    vol *= sides.c[j];
    if (vol > (int64_t(1) << 34)) throw FormatError("window volume out of range");
  }
  run.window = Rect(low, sides);
  const size_t a0 = rd.pos();
  const size_t gb = bit_grid_bytes(run.window);
  const uint8_t* pa = rd.take(gb, "A grid");
  const size_t b0 = rd.pos();
  const uint8_t* pb = rd.take(gb, "B grid");
  const size_t p0 = rd.pos();
  const uint8_t* pp = rd.take(static_cast<size_t>(vol) * 2, "piece grid");
  const size_t e0 = rd.pos();
  if (rd.remaining() == 0) throw TruncatedError("file truncated before the manifest");
  nlohmann::json top;
  try {
    top = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(e0), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!top.is_object() || !top.contains("hashes") || !top.contains("manifest") || !top["hashes"].is_object())
    throw FormatError("manifest lacks hashes");
  const auto& hs = top["hashes"];
  auto check = [&](const char* name, const uint8_t* p, size_t n) {
    if (!hs.contains(name) || !hs[name].is_string()) throw FormatError(std::string("missing hash for ") + name);
    if (hs[name].get<std::string>() != sha256_hex(p, n)) throw HashError(std::string("hash mismatch in ") + name);
  };
  check("header", bytes.data() + h0, a0 - h0);
  check("a_bits", pa, b0 - a0);
  check("b_bits", pb, p0 - b0);
  check("pieces", pp, e0 - p0);
  const std::string body = top["manifest"].dump();
  check("manifest", reinterpret_cast<const uint8_t*>(body.data()), body.size());
  run.a_bits = get_bits(pa, run.window);
  run.b_bits = get_bits(pb, run.window);
  run.pieces.resize(static_cast<size_t>(vol));
  for (int64_t i = 0; i < vol; ++i) run.pieces[i] = static_cast<uint16_t>(pp[2 * i] | (pp[2 * i + 1] << 8));
  run.manifest = top["manifest"];
  return run;
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ResourceError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ResourceError("write failed: " + path);
}

std::vector<uint8_t> read_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(f), {});
}

void save_run(const std::string& path, const RunFile& run) { write_bytes(path, encode_run(run)); }
RunFile load_run(const std::string& path) { return decode_run(read_bytes(path)); }

CosetWindow window_of(const RunFile& run) {
  try {
    const auto& sj = run.manifest.at("system");
    std::vector<TorusPoint> vecs;
    for (const auto& v : sj.at("vectors")) vecs.emplace_back(v.get<std::vector<double>>());
    FreeVectorSystem sys = make_system(std::move(vecs), sj.at("m_cap").get<int>(), sj.at("rng_seed").get<uint64_t>());
    CosetWindow w{TorusPoint(run.manifest.at("base").get<std::vector<double>>()), sys, run.window, run.a_bits,
                  run.b_bits, 0};
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest lacks the vector system: ") + e.what());
  }
}

Matching matching_of(const RunFile& run) {
  const Rect& w = run.window;
  Matching m(w, run.m_cap);
  const int64_t np = piece_count(run.d, run.m_cap);
  for (int64_t a = 0; a < w.volume(); ++a) {
    uint16_t v = run.pieces[a];
    if (v == kNoPiece) continue;
    if (v >= np) throw InvariantError("piece index out of range at " + to_string(w.point(a)));
    IVec b = w.point(a) + offset_from_index(v, run.d, run.m_cap);
    if (!w.contains(b)) throw InvariantError("partner outside the window at " + to_string(w.point(a)));
    if (m.partner_of_b(w.index(b)) != kNone)
      throw InvariantError("injectivity: B-cell " + to_string(b) + " matched twice");
    m.add(a, w.index(b));
  }
  return m;
}

VerifyReport verify_run(const RunFile& run) {
  VerifyReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    if (rep.errors.size() < 20) rep.errors.push_back(std::move(msg));
  };
  const Rect& w = run.window;
  const int64_t np = piece_count(run.d, run.m_cap);
  std::vector<uint8_t> hit(static_cast<size_t>(w.volume()), 0);
  for (int64_t a = 0; a < w.volume(); ++a) {
    uint16_t v = run.pieces[a];
    if (v == kNoPiece) continue;
    ++rep.matched;
    const IVec pa = w.point(a);
    if (!run.a_bits.at(a)) fail("piece on a non-A cell " + to_string(pa));
    if (v >= np) {
      fail("piece index " + std::to_string(v) + " out of range at " + to_string(pa));
      continue;
    }
    const IVec o = offset_from_index(v, run.d, run.m_cap);
    if (linf_norm(o) > run.m_cap) fail("offset bound exceeded at " + to_string(pa));
    const IVec b = pa + o;
    if (!w.contains(b)) {
      fail("partner of " + to_string(pa) + " outside the window");
      continue;
    }
    const int64_t bi = w.index(b);
    if (!run.b_bits.at(bi)) fail("partner of " + to_string(pa) + " is not a B-cell");
    if (hit[bi]++) fail("injectivity: B-cell " + to_string(b) + " matched twice");
  }
  if (rep.ok) {
    PieceMap pm{w, run.m_cap, run.pieces};
    if (!piece_translation_identity(pm, run.a_bits, run.b_bits)) fail("piece-translation identity fails");
  }
  // Stored grids must be re-derivable from the recorded shapes, system and base.
  const auto& cfg = run.manifest.contains("config") ? run.manifest["config"] : nlohmann::json();
  // Shapes loaded from external image files are skipped: the path is relative to the config.
  if (cfg.is_object() && cfg.contains("shape_a") && cfg.contains("shape_b") && !cfg["shape_a"].contains("pgm") &&
      !cfg["shape_b"].contains("pgm")) {
    try {
      const CosetWindow src = window_of(run);
      const CosetWindow again = extract_window(shape_from_json(cfg["shape_a"]), shape_from_json(cfg["shape_b"]),
                                               src.sys, src.base, w,
                                               std::max<int64_t>(kDefaultVolumeCap, w.volume()));
      if (again.a_bits.data() != run.a_bits.data()) fail("A grid differs from re-extraction");
      if (again.b_bits.data() != run.b_bits.data()) fail("B grid differs from re-extraction");
    } catch (const std::exception& e) {
      fail(std::string("cannot re-extract the window: ") + e.what());
    }
  }
  if (run.manifest.contains("reports") && run.manifest["reports"].is_array()) {
    for (const auto& r : run.manifest["reports"]) {
      for (const char* key : {"edges_outside_cubes", "cubes_with_short_path", "cubes_two_sided_unmatched",
                              "cubes_unmatched_above_discrepancy", "failures"})
        if (r.contains(key) && r[key].is_number() && r[key].get<int64_t>() != 0)
          fail(std::string("stored report: ") + key + " = " + r[key].dump());
      for (const char* key : {"added_sparse", "hall_ok", "nets_covered"})
        if (r.contains(key) && r[key].is_boolean() && !r[key].get<bool>())
          fail(std::string("stored report: ") + key + " is false");
    }
  }
  return rep;
}

std::array<uint8_t, 3> piece_color(uint16_t piece) {
  uint64_t h = splitmix64(0x9E3779B97F4A7C15ull ^ piece);
  std::array<uint8_t, 3> c{};
  for (int i = 0; i < 3; ++i) c[i] = static_cast<uint8_t>(32 + (h >> (16 * i)) % 192);
  return c;
}

std::string render_pieces(const PieceMap& pm, const CellSet& a_bits, const CellSet& b_bits, RenderSide side,
                          int scale) {
  const Rect& w = pm.window;
  if (w.dim() != 2) throw ArgumentError("rendering needs d = 2");
  if (scale < 1) throw ArgumentError("scale must be >= 1");
  const int64_t rows = w.sides.c[0], cols = w.sides.c[1];
  const int64_t width = cols * scale, height = rows * scale;
  if (width * height > (int64_t(1) << 30)) throw ResourceError("image too large");
  const std::vector<uint16_t> colour_of = side == RenderSide::A ? pm.pieces : b_side_pieces(pm);
  const CellSet& shape = side == RenderSide::A ? a_bits : b_bits;
  const std::string head = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::string img(head.size() + static_cast<size_t>(width * height * 3), '\0');
  std::memcpy(img.data(), head.data(), head.size());
  char* px = img.data() + head.size();
  parallel_chunks(rows, [&](int64_t lo, int64_t hi, int) {
    for (int64_t r = lo; r < hi; ++r)
      for (int64_t c = 0; c < cols; ++c) {
        const int64_t i = r * cols + c;
        std::array<uint8_t, 3> col{255, 255, 255};
        if (shape.at(i)) col = colour_of[i] == kNoPiece ? std::array<uint8_t, 3>{64, 64, 64} : piece_color(colour_of[i]);
        for (int dy = 0; dy < scale; ++dy)
          for (int dx = 0; dx < scale; ++dx) {
            char* q = px + ((r * scale + dy) * width + c * scale + dx) * 3;
            q[0] = static_cast<char>(col[0]);
            q[1] = static_cast<char>(col[1]);
            q[2] = static_cast<char>(col[2]);
          }
      }
  });
  return img;
}

}  // namespace eqd
