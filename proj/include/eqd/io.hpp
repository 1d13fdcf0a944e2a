#pragma once
// EQDC run container, piece maps and PPM rendering.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqd/coset_window.hpp"
#include "eqd/matching.hpp"
#include "json.hpp"

namespace eqd {

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class MagicError : public LoadError {
 public:
  using LoadError::LoadError;
};
class VersionError : public LoadError {
 public:
  using LoadError::LoadError;
};
class HashError : public LoadError {
 public:
  using LoadError::LoadError;
};
class TruncatedError : public LoadError {
 public:
  using LoadError::LoadError;
};
class FormatError : public LoadError {
 public:
  using LoadError::LoadError;
};

inline constexpr uint16_t kNoPiece = 0xFFFF;
inline constexpr int64_t kFlagLebesgue = 1;
inline constexpr int64_t kFlagBaire = 2;

std::string sha256_hex(const void* data, size_t n);

// Per-cell piece index: row-major index of the match offset in [-M, M]^d.
struct PieceMap {
  Rect window;
  int m_cap = 0;
  std::vector<uint16_t> pieces;  // kNoPiece for unmatched or non-A cells
};

// Throws ArgumentError when (2M+1)^d does not fit below the sentinel.
PieceMap piece_map(const Matching& m);
// Color of each B-cell: the piece of its preimage (kNoPiece if none).
std::vector<uint16_t> b_side_pieces(const PieceMap& pm);
// B-cells of piece v are exactly A-cells of piece v shifted by offset(v).
bool piece_translation_identity(const PieceMap& pm, const CellSet& a_bits, const CellSet& b_bits);

struct RunFile {
  int d = 0, k = 0, m_cap = 0;
  Rect window;
  int64_t flags = 0;
  CellSet a_bits, b_bits;
  std::vector<uint16_t> pieces;
  nlohmann::json manifest;  // run-config echo, system, reports
};

// Manifest gets "base", "system" (full-precision vectors) and "window" added.
RunFile make_run_file(const CosetWindow& win, const Matching& m, nlohmann::json manifest, int64_t flags);
std::vector<uint8_t> encode_run(const RunFile& run);
RunFile decode_run(const std::vector<uint8_t>& bytes);
void save_run(const std::string& path, const RunFile& run);
RunFile load_run(const std::string& path);
void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes);
std::vector<uint8_t> read_bytes(const std::string& path);

// Rebuilds the window from the manifest's base point and vector system.
CosetWindow window_of(const RunFile& run);
// Throws InvariantError if the stored pieces are not a valid matching.
Matching matching_of(const RunFile& run);

struct VerifyReport {
  bool ok = true;
  int64_t matched = 0;
  std::vector<std::string> errors;
};
VerifyReport verify_run(const RunFile& run);

enum class RenderSide { A, B };
// Binary PPM (P6); d = 2 only, axis 0 runs down the rows.
std::string render_pieces(const PieceMap& pm, const CellSet& a_bits, const CellSet& b_bits, RenderSide side,
                          int scale);
std::array<uint8_t, 3> piece_color(uint16_t piece);

}  // namespace eqd
