#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artinv/csv.hpp"
#include "artinv/error.hpp"
#include "artinv/formant.hpp"
#include "artinv/numfmt.hpp"

namespace artinv {

inline constexpr std::array<std::string_view, 4> kPeriods = {"1955-56", "1975-76", "1995-96",
                                                             "2015-16"};

// The 12 French oral vowels, canonical ASCII labels (X-SAMPA style).
inline constexpr std::array<std::string_view, 12> kVowelLabels = {
    "i", "e", "E", "a", "A", "O", "o", "u", "y", "2", "9", "@"};

// Accepts the canonical labels plus the common IPA spellings.
inline std::optional<std::string> canonical_vowel(std::string_view label) {
  for (std::string_view v : kVowelLabels)
    if (label == v) return std::string(v);
  struct Alias {
    std::string_view ipa, canonical;
  };
  static constexpr Alias kAliases[] = {{"ɛ", "E"}, {"ɑ", "A"}, {"ɔ", "O"},
                                       {"ø", "2"}, {"œ", "9"}, {"ə", "@"}};
  for (const Alias& a : kAliases)
    if (label == a.ipa) return std::string(a.canonical);
  return std::nullopt;
}

inline std::string_view age_band(int age) {
  if (age <= 35) return "20-35";
  if (age <= 50) return "36-50";
  if (age <= 65) return "51-65";
  return ">65";
}

// One vowel realization: speaker metadata plus the measured formants.
struct VowelFrameRecord {
  std::string speaker_id;
  char gender = '?';  // 'F' or 'M'
  int age = 0;
  std::string period;
  std::string vowel;
  FormantVector formants;
  double duration_ms = 0.0;
  std::string source;
};

struct SpeakerProfile {
  std::string speaker_id;
  char gender = '?';
  int age = 0;
  std::string period;
  double vtl_cm = 0.0;
  std::size_t record_count = 0;
  bool vtl_plausible = true;  // [10, 22] cm; implausible speakers are flagged, not dropped
};

inline constexpr double kMaxDurationMs = 200.0;
inline constexpr double kVtlPlausibleLo = 10.0;
inline constexpr double kVtlPlausibleHi = 22.0;

struct RejectedRow {
  std::size_t line_no;  // 1-based line number in the input stream
  std::string reason;
  std::string detail;
};

struct IngestReport {
  std::size_t rows_in = 0;
  std::size_t accepted = 0;
  std::vector<RejectedRow> rejected;
  std::map<std::string, std::size_t> rejected_by_reason;

  void reject(std::size_t line_no, std::string reason, std::string detail) {
    rejected_by_reason[reason]++;
    rejected.push_back({line_no, std::move(reason), std::move(detail)});
  }
};

struct IngestResult {
  std::vector<VowelFrameRecord> records;
  IngestReport report;
};

inline constexpr std::array<std::string_view, 11> kFrameTableColumns = {
    "speaker_id", "gender", "age", "period", "vowel", "f1",
    "f2",         "f3",     "f4",  "duration_ms", "source"};

/* Frame-table ingestion. The header must carry exactly the documented
   columns (any order); unknown or missing columns are a hard error. Data
   rows that fail validation are rejected with a per-row reason, never
   silently dropped: rows_in == accepted + rejected. */
inline IngestResult ingest_frames(std::istream& is) {
  IngestResult out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::array<std::size_t, kFrameTableColumns.size()> col{};

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields = split_csv_line(line);

    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        bool known = false;
        for (std::string_view c : kFrameTableColumns)
          if (fields[i] == c) known = true;
        if (!known)
          fail(Errc::kBadArgument, "unknown column '" + fields[i] + "' in frame table header");
      }
      for (std::size_t ci = 0; ci < kFrameTableColumns.size(); ++ci) {
        bool found = false;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (fields[i] == kFrameTableColumns[ci]) {
            if (found)
              fail(Errc::kBadArgument,
                   "duplicate column '" + fields[i] + "' in frame table header");
            col[ci] = i;
            found = true;
          }
        }
        if (!found)
          fail(Errc::kBadArgument, "missing column '" + std::string(kFrameTableColumns[ci]) +
                                       "' in frame table header");
      }
      have_header = true;
      continue;
    }

    ++out.report.rows_in;
    if (fields.size() != kFrameTableColumns.size()) {
      out.report.reject(line_no, "columns",
                        "expected " + std::to_string(kFrameTableColumns.size()) +
                            " fields, found " + std::to_string(fields.size()));
      continue;
    }

    VowelFrameRecord r;
    r.speaker_id = fields[col[0]];
    if (r.speaker_id.empty()) {
      out.report.reject(line_no, "speaker", "empty speaker id");
      continue;
    }
    const std::string& g = fields[col[1]];
    if (g != "F" && g != "M") {
      out.report.reject(line_no, "gender", "got '" + g + "', expected F or M");
      continue;
    }
    r.gender = g[0];
    std::int64_t age = 0;
    if (!try_parse_i64(fields[col[2]], age) || age < 16 || age > 105) {
      out.report.reject(line_no, "age", "got '" + fields[col[2]] + "'");
      continue;
    }
    r.age = static_cast<int>(age);
    r.period = fields[col[3]];
    bool period_ok = false;
    for (std::string_view p : kPeriods)
      if (r.period == p) period_ok = true;
    if (!period_ok) {
      out.report.reject(line_no, "period", "got '" + r.period + "'");
      continue;
    }
    std::optional<std::string> vowel = canonical_vowel(fields[col[4]]);
    if (!vowel) {
      out.report.reject(line_no, "vowel", "got '" + fields[col[4]] + "'");
      continue;
    }
    r.vowel = *vowel;

    double f[4];
    bool parse_ok = true;
    for (int i = 0; i < 4; ++i) {
      if (!try_parse_double(fields[col[5 + static_cast<std::size_t>(i)]], f[i])) {
        out.report.reject(line_no, "parse",
                          "bad f" + std::to_string(i + 1) + " '" +
                              fields[col[5 + static_cast<std::size_t>(i)]] + "'");
        parse_ok = false;
        break;
      }
    }
    if (!parse_ok) continue;
    r.formants = FormantVector{{f[0], f[1], f[2], f[3]}};
    if (!r.formants.valid()) {
      out.report.reject(line_no, "formant_order", "formants must be 0 < f1 < f2 < f3 < f4");
      continue;
    }
    double dur = 0.0;
    if (!try_parse_double(fields[col[9]], dur)) {
      out.report.reject(line_no, "parse", "bad duration '" + fields[col[9]] + "'");
      continue;
    }
    if (!(dur > 0.0)) {
      out.report.reject(line_no, "duration", "non-positive duration");
      continue;
    }
    if (dur > kMaxDurationMs) {
      out.report.reject(line_no, "duration",
                        fmt_double(dur) + " ms exceeds " + fmt_double(kMaxDurationMs) + " ms");
      continue;
    }
    r.duration_ms = dur;
    r.source = fields[col[10]];

    out.records.push_back(std::move(r));
    ++out.report.accepted;
  }
  if (!have_header) fail(Errc::kBadArgument, "frame table has no header row");
  return out;
}

// Demographic key for speaker counting and aggregation.
struct DemoKey {
  char gender = '?';
  std::string age_band;
  std::string period;

  auto operator<=>(const DemoKey&) const = default;
};

// Distinct speakers per gender x age-band x period cell.
inline std::map<DemoKey, std::size_t> speaker_counts(const std::vector<VowelFrameRecord>& records) {
  std::map<DemoKey, std::map<std::string, bool>> seen;
  for (const VowelFrameRecord& r : records)
    seen[DemoKey{r.gender, std::string(age_band(r.age)), r.period}][r.speaker_id] = true;
  std::map<DemoKey, std::size_t> out;
  for (const auto& [key, speakers] : seen) out[key] = speakers.size();
  return out;
}

}  // namespace artinv
