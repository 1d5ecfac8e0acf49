#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "artinv/error.hpp"
#include "artinv/numfmt.hpp"

namespace artinv {

/* Minimal CSV with RFC-4180 quoting and '#'-prefixed metadata/comment lines.
   Every pipeline output starts with a metadata block (tool version, config
   hash, seed) so a run can be reproduced from its artifacts alone. */

inline constexpr std::string_view kToolVersion = "1.0.0";

struct MetadataHeader {
  std::string tool_version{kToolVersion};
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

inline void write_metadata(std::ostream& os, const MetadataHeader& m) {
  char hex[17];
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = m.config_hash;
  for (int i = 15; i >= 0; --i) {
    hex[i] = digits[h & 0xf];
    h >>= 4;
  }
  hex[16] = '\0';
  os << "# tool_version=" << m.tool_version << '\n';
  os << "# config_hash=" << hex << '\n';
  os << "# seed=" << m.seed << '\n';
}

inline std::string csv_field(std::string_view s) {
  bool need_quote = false;
  for (char c : s)
    if (c == ',' || c == '"' || c == '\n' || c == '\r') need_quote = true;
  if (!need_quote) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

// Reads data lines, skipping blank and '#' lines; returns them unsplit.
inline std::vector<std::string> read_csv_lines(std::istream& is) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace artinv
