#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "artinv/articulatory.hpp"
#include "artinv/error.hpp"
#include "artinv/hash.hpp"
#include "artinv/numfmt.hpp"

namespace artinv {

/* Articulatory model tables, loaded from the .mdf data file and immutable
   afterwards. The file is a line-oriented text container:

     ARTINV-MODEL 1
     grid <G>
     l0_cm <neutral tract length>
     mean_width <G sagittal half-widths, cm, glottis to lips>
     mean_length <G section lengths, cm; sums to l0_cm>
     alpha <G power-law gains>
     beta <G power-law exponents>
     basis <name>          (7 blocks, in ArticulatoryVector component order)
     width <G deltas, cm per SD>
     length <G deltas, cm per SD>
     ...
     checksum <16 hex digits>

   The checksum is FNV-1a 64 over every byte of the file up to and including
   the newline before the checksum line. Numbers use shortest round-trip
   decimal form, so save/load is bit-exact. */

struct BasisField {
  std::string name;
  std::vector<double> width_delta;   // cm per SD, per station
  std::vector<double> length_delta;  // cm per SD, per station

  friend bool operator==(const BasisField&, const BasisField&) = default;
};

struct ModelData {
  int format_version = 1;
  std::size_t grid_size = 0;
  double l0_cm = 0.0;                 // neutral tract length, = sum of mean_length
  std::vector<double> mean_width;     // cm
  std::vector<double> mean_length;    // cm
  std::vector<double> alpha;          // sagittal-to-area law A = alpha * w^beta
  std::vector<double> beta;
  std::array<BasisField, ArticulatoryVector::kSize> basis;
  std::uint64_t checksum = 0;         // set on load; not part of equality

  bool operator==(const ModelData& o) const {
    return format_version == o.format_version && grid_size == o.grid_size &&
           l0_cm == o.l0_cm && mean_width == o.mean_width &&
           mean_length == o.mean_length && alpha == o.alpha && beta == o.beta &&
           basis == o.basis;
  }
};

namespace detail {

inline void emit_vector(std::ostream& os, std::string_view key, const std::vector<double>& v) {
  os << key;
  for (double x : v) os << ' ' << fmt_double(x);
  os << '\n';
}

inline std::vector<double> parse_vector(std::string_view line, std::string_view key,
                                        std::size_t expected) {
  std::vector<double> out;
  out.reserve(expected);
  std::size_t pos = key.size();
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ') ++end;
    if (end > pos) out.push_back(parse_double(line.substr(pos, end - pos), key));
    pos = end;
  }
  if (out.size() != expected)
    fail(Errc::kMalformedFile, std::string(key) + ": expected " + std::to_string(expected) +
                                   " values, found " + std::to_string(out.size()));
  return out;
}

inline void validate_model(const ModelData& m) {
  if (m.grid_size == 0) fail(Errc::kMalformedFile, "grid size must be positive");
  if (!(m.l0_cm > 0.0)) fail(Errc::kMalformedFile, "l0_cm must be positive");
  const std::size_t g = m.grid_size;
  if (m.mean_width.size() != g || m.mean_length.size() != g || m.alpha.size() != g ||
      m.beta.size() != g)
    fail(Errc::kMalformedFile, "table length does not match grid size");
  double total = 0.0;
  for (double l : m.mean_length) {
    if (!(l > 0.0)) fail(Errc::kMalformedFile, "mean section lengths must be positive");
    total += l;
  }
  if (std::abs(total - m.l0_cm) > 1e-9 * std::max(1.0, m.l0_cm))
    fail(Errc::kMalformedFile, "l0_cm does not equal the sum of mean section lengths");
  for (double a : m.alpha)
    if (!(a > 0.0)) fail(Errc::kMalformedFile, "alpha entries must be positive");
  for (double b : m.beta)
    if (!(b > 0.0)) fail(Errc::kMalformedFile, "beta entries must be positive");
  for (std::size_t i = 0; i < m.basis.size(); ++i) {
    const BasisField& f = m.basis[i];
    if (f.name != ArticulatoryVector::kNames[i])
      fail(Errc::kMalformedFile, "basis block '" + f.name + "' out of order, expected '" +
                                     std::string(ArticulatoryVector::kNames[i]) + "'");
    if (f.width_delta.size() != g || f.length_delta.size() != g)
      fail(Errc::kMalformedFile, "basis '" + f.name + "' does not match grid size");
  }
}

}  // namespace detail

inline void save_model_data(const ModelData& m, std::ostream& os) {
  std::ostringstream body;
  body << "ARTINV-MODEL " << m.format_version << '\n';
  body << "grid " << m.grid_size << '\n';
  body << "l0_cm " << fmt_double(m.l0_cm) << '\n';
  detail::emit_vector(body, "mean_width", m.mean_width);
  detail::emit_vector(body, "mean_length", m.mean_length);
  detail::emit_vector(body, "alpha", m.alpha);
  detail::emit_vector(body, "beta", m.beta);
  for (const BasisField& f : m.basis) {
    body << "basis " << f.name << '\n';
    detail::emit_vector(body, "width", f.width_delta);
    detail::emit_vector(body, "length", f.length_delta);
  }
  const std::string text = body.str();
  std::uint64_t sum = fnv1a64(text);
  os << text << "checksum ";
  char hex[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    hex[i] = digits[sum & 0xf];
    sum >>= 4;
  }
  hex[16] = '\0';
  os << hex << '\n';
}

inline ModelData load_model_data(std::istream& is) {
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();

  // Locate the trailing checksum line and verify it over the preceding bytes.
  const std::string key = "checksum ";
  std::size_t pos = text.rfind(key);
  if (pos == std::string::npos || (pos != 0 && text[pos - 1] != '\n'))
    fail(Errc::kMalformedFile, "missing checksum line");
  std::size_t hex_begin = pos + key.size();
  std::size_t hex_end = text.find('\n', hex_begin);
  if (hex_end == std::string::npos) hex_end = text.size();
  std::string_view hex(text.data() + hex_begin, hex_end - hex_begin);
  if (hex.size() != 16) fail(Errc::kMalformedFile, "checksum must be 16 hex digits");
  std::uint64_t stated = 0;
  for (char c : hex) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else fail(Errc::kMalformedFile, "checksum must be 16 hex digits");
    stated = (stated << 4) | static_cast<std::uint64_t>(d);
  }
  std::string_view payload(text.data(), pos);
  if (fnv1a64(payload) != stated)
    fail(Errc::kChecksumMismatch, "model data checksum mismatch");

  // Parse the payload line by line.
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < payload.size()) {
    std::size_t nl = payload.find('\n', start);
    if (nl == std::string_view::npos) nl = payload.size();
    if (nl > start) lines.push_back(payload.substr(start, nl - start));
    start = nl + 1;
  }
  std::size_t li = 0;
  auto next_line = [&]() -> std::string_view {
    if (li >= lines.size()) fail(Errc::kMalformedFile, "unexpected end of file");
    return lines[li++];
  };
  auto expect_prefix = [&](std::string_view line, std::string_view prefix) -> std::string_view {
    if (line.substr(0, prefix.size()) != prefix)
      fail(Errc::kMalformedFile, "expected '" + std::string(prefix) + "' line");
    return line.substr(prefix.size());
  };

  ModelData m;
  {
    std::string_view v = expect_prefix(next_line(), "ARTINV-MODEL ");
    std::int64_t ver = 0;
    if (!try_parse_i64(v, ver) || ver != 1)
      fail(Errc::kMalformedFile, "unsupported model data format version");
    m.format_version = static_cast<int>(ver);
  }
  {
    std::string_view v = expect_prefix(next_line(), "grid ");
    std::uint64_t g = 0;
    if (!try_parse_u64(v, g) || g == 0 || g > 4096)
      fail(Errc::kMalformedFile, "bad grid size");
    m.grid_size = static_cast<std::size_t>(g);
  }
  m.l0_cm = parse_double(expect_prefix(next_line(), "l0_cm "), "l0_cm");
  m.mean_width = detail::parse_vector(next_line(), "mean_width", m.grid_size);
  m.mean_length = detail::parse_vector(next_line(), "mean_length", m.grid_size);
  m.alpha = detail::parse_vector(next_line(), "alpha", m.grid_size);
  m.beta = detail::parse_vector(next_line(), "beta", m.grid_size);

  std::vector<BasisField> blocks;
  while (li < lines.size()) {
    BasisField f;
    f.name = std::string(expect_prefix(next_line(), "basis "));
    f.width_delta = detail::parse_vector(next_line(), "width", m.grid_size);
    f.length_delta = detail::parse_vector(next_line(), "length", m.grid_size);
    blocks.push_back(std::move(f));
  }
  if (blocks.size() != ArticulatoryVector::kSize)
    fail(Errc::kWrongBasisCount, "wrong basis count: expected " +
                                     std::to_string(ArticulatoryVector::kSize) + ", found " +
                                     std::to_string(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) m.basis[i] = std::move(blocks[i]);

  detail::validate_model(m);
  m.checksum = stated;
  return m;
}

inline ModelData load_model_data(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Errc::kIoFailure, "cannot open model data file: " + path.string());
  return load_model_data(is);
}

inline void save_model_data(const ModelData& m, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(Errc::kIoFailure, "cannot write model data file: " + path.string());
  save_model_data(m, os);
}

}  // namespace artinv
