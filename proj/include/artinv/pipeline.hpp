#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "artinv/csv.hpp"
#include "artinv/error.hpp"
#include "artinv/inversion.hpp"
#include "artinv/records.hpp"
#include "artinv/rng.hpp"
#include "artinv/vtl.hpp"

namespace artinv {

struct RecordResult {
  VowelFrameRecord record;
  ArticulatoryVector x;
  double residual_hz = 0.0;
  bool converged = false;
};

struct SpeakerSummary {
  SpeakerProfile profile;
  double scale = 0.0;
  std::size_t n_records = 0;
  std::size_t n_skipped = 0;
  double mean_larynx_height = 0.0;
  double mean_lip_protrusion = 0.0;
};

struct RunOptions {
  std::uint64_t seed = 1;
  int workers = 0;                   // 0 = hardware concurrency; 1 = strictly serial
  std::filesystem::path output_dir;  // empty = in-memory only
  bool resume = true;
  std::uint64_t config_hash = 0;
};

struct SkipEntry {
  std::string speaker_id;
  long record_index = -1;  // -1 for speaker-level skips
  std::string reason;
};

struct CorpusResult {
  std::vector<RecordResult> rows;        // speaker-sorted, input order within speaker
  std::vector<SpeakerSummary> speakers;  // speaker-sorted
  std::vector<SkipEntry> skips;
  std::size_t n_skipped_records = 0;
};

namespace pipeline_detail {

inline std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char c : id) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
        c == '_') {
      out += c;
    } else {
      static const char* digits = "0123456789abcdef";
      out += '%';
      out += digits[(static_cast<unsigned char>(c) >> 4) & 0xf];
      out += digits[static_cast<unsigned char>(c) & 0xf];
    }
  }
  return out;
}

inline constexpr std::string_view kResultColumns =
    "speaker_id,gender,age,period,vowel,f1,f2,f3,f4,duration_ms,source,"
    "jaw,td_position,td_height,tt_position,lower_lip,lip_protrusion,larynx_height,"
    "residual_hz,converged";

inline void write_result_row(std::ostream& os, const RecordResult& r) {
  const VowelFrameRecord& v = r.record;
  os << csv_field(v.speaker_id) << ',' << v.gender << ',' << v.age << ',' << v.period << ','
     << v.vowel << ',' << fmt_double(v.formants.f1()) << ',' << fmt_double(v.formants.f2()) << ','
     << fmt_double(v.formants.f3()) << ',' << fmt_double(v.formants.f4()) << ','
     << fmt_double(v.duration_ms) << ',' << csv_field(v.source);
  for (double c : r.x.v) os << ',' << fmt_double(c);
  os << ',' << fmt_double(r.residual_hz) << ',' << (r.converged ? 1 : 0) << '\n';
}

struct SpeakerWork {
  std::string speaker_id;
  std::vector<VowelFrameRecord> records;
};

struct SpeakerOutcome {
  bool skipped_speaker = false;
  std::string skip_reason;
  SpeakerSummary summary;
  std::vector<RecordResult> rows;
  std::vector<SkipEntry> record_skips;
};

inline SpeakerOutcome process_speaker(const SpeakerWork& work, const ModelData& model,
                                      const AcousticConfig& acoustics, InversionConfig cfg,
                                      std::uint64_t seed) {
  SpeakerOutcome out;
  const std::vector<VowelFrameRecord>& recs = work.records;

  for (std::size_t i = 1; i < recs.size(); ++i) {
    if (recs[i].gender != recs[0].gender || recs[i].age != recs[0].age ||
        recs[i].period != recs[0].period) {
      out.skipped_speaker = true;
      out.skip_reason = "inconsistent speaker metadata across records";
      return out;
    }
  }

  std::vector<FormantVector> fs;
  for (const VowelFrameRecord& r : recs)
    if (r.formants.valid()) fs.push_back(r.formants);
  if (fs.empty()) {
    out.skipped_speaker = true;
    out.skip_reason = "zero valid records";
    return out;
  }

  SpeakerProfile profile;
  profile.speaker_id = work.speaker_id;
  profile.gender = recs[0].gender;
  profile.age = recs[0].age;
  profile.period = recs[0].period;
  profile.vtl_cm = speaker_vtl(fs, acoustics.speed_of_sound);
  profile.record_count = recs.size();
  profile.vtl_plausible =
      profile.vtl_cm >= kVtlPlausibleLo && profile.vtl_cm <= kVtlPlausibleHi;

  cfg.seed = seed;
  SpeakerInversionResult inv;
  try {
    inv = invert_speaker(profile, recs, model, acoustics, cfg);
  } catch (const Error& e) {
    out.skipped_speaker = true;
    out.skip_reason = e.what();
    return out;
  }

  out.summary.profile = profile;
  out.summary.scale = inv.scale;
  out.summary.n_records = inv.records.size();
  out.summary.n_skipped = inv.skipped.size();
  out.summary.mean_larynx_height = inv.mean_larynx_height;
  out.summary.mean_lip_protrusion = inv.mean_lip_protrusion;
  for (const SpeakerRecordResult& r : inv.records)
    out.rows.push_back({recs[r.record_index], r.solution.x, r.solution.residual_hz,
                        r.solution.converged});
  for (const auto& [idx, reason] : inv.skipped)
    out.record_skips.push_back({work.speaker_id, static_cast<long>(idx), reason});
  return out;
}

// Per-speaker result file: lets an interrupted corpus run resume without
// recomputing finished speakers. The metadata block pins config hash + seed.
inline void write_speaker_part(const std::filesystem::path& path, const SpeakerOutcome& o,
                               const MetadataHeader& meta) {
  std::ostringstream os;
  write_metadata(os, meta);
  os << "# vtl_cm=" << fmt_double(o.summary.profile.vtl_cm) << '\n';
  os << "# vtl_plausible=" << (o.summary.profile.vtl_plausible ? 1 : 0) << '\n';
  os << "# scale=" << fmt_double(o.summary.scale) << '\n';
  os << "# mean_larynx_height=" << fmt_double(o.summary.mean_larynx_height) << '\n';
  os << "# mean_lip_protrusion=" << fmt_double(o.summary.mean_lip_protrusion) << '\n';
  for (const SkipEntry& s : o.record_skips)
    os << "# skip=" << s.record_index << ' ' << s.reason << '\n';
  os << kResultColumns << '\n';
  for (const RecordResult& r : o.rows) write_result_row(os, r);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::kIoFailure, "cannot write " + path.string());
  f << os.str();
}

inline bool parse_result_row(const std::vector<std::string>& f, RecordResult& r) {
  if (f.size() != 20) return false;
  r.record.speaker_id = f[0];
  r.record.gender = f[1].empty() ? '?' : f[1][0];
  std::int64_t age = 0;
  if (!try_parse_i64(f[2], age)) return false;
  r.record.age = static_cast<int>(age);
  r.record.period = f[3];
  r.record.vowel = f[4];
  double ff[4];
  for (int k = 0; k < 4; ++k)
    if (!try_parse_double(f[5 + static_cast<std::size_t>(k)], ff[k])) return false;
  r.record.formants = FormantVector{{ff[0], ff[1], ff[2], ff[3]}};
  if (!try_parse_double(f[9], r.record.duration_ms)) return false;
  r.record.source = f[10];
  for (std::size_t k = 0; k < 7; ++k)
    if (!try_parse_double(f[11 + k], r.x[k])) return false;
  if (!try_parse_double(f[18], r.residual_hz)) return false;
  r.converged = f[19] == "1";
  return true;
}

inline bool try_load_speaker_part(const std::filesystem::path& path, const SpeakerWork& work,
                                  const MetadataHeader& meta, SpeakerOutcome& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::string line;
  std::map<std::string, std::string> kv;
  std::vector<std::string> data_lines;
  std::vector<SkipEntry> skips;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const std::size_t sp = body.find_first_not_of(' ');
      if (sp == std::string::npos) continue;
      body = body.substr(sp);
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "skip") {
        const std::size_t s = value.find(' ');
        if (s == std::string::npos) return false;
        std::int64_t idx = 0;
        if (!try_parse_i64(value.substr(0, s), idx)) return false;
        skips.push_back({work.speaker_id, static_cast<long>(idx), value.substr(s + 1)});
      } else {
        kv[key] = value;
      }
      continue;
    }
    data_lines.push_back(line);
  }
  // stale parts (other config or seed) are recomputed
  {
    std::ostringstream expect;
    write_metadata(expect, meta);
    std::istringstream es(expect.str());
    std::string eline;
    while (std::getline(es, eline)) {
      const std::size_t eq = eline.find('=');
      const std::string key = eline.substr(2, eq - 2);
      const std::string value = eline.substr(eq + 1);
      auto it = kv.find(key);
      if (it == kv.end() || it->second != value) return false;
    }
  }
  if (data_lines.empty() || data_lines[0] != kResultColumns) return false;

  SpeakerOutcome o;
  o.record_skips = std::move(skips);
  for (std::size_t i = 1; i < data_lines.size(); ++i) {
    RecordResult r;
    if (!parse_result_row(split_csv_line(data_lines[i]), r)) return false;
    o.rows.push_back(std::move(r));
  }

  auto need = [&](const char* key, double& dst) {
    auto it = kv.find(key);
    if (it == kv.end() || !try_parse_double(it->second, dst)) return false;
    return true;
  };
  SpeakerProfile& p = o.summary.profile;
  p.speaker_id = work.speaker_id;
  if (!work.records.empty()) {
    p.gender = work.records[0].gender;
    p.age = work.records[0].age;
    p.period = work.records[0].period;
  }
  p.record_count = work.records.size();
  if (!need("vtl_cm", p.vtl_cm) || !need("scale", o.summary.scale) ||
      !need("mean_larynx_height", o.summary.mean_larynx_height) ||
      !need("mean_lip_protrusion", o.summary.mean_lip_protrusion))
    return false;
  auto it = kv.find("vtl_plausible");
  if (it == kv.end()) return false;
  p.vtl_plausible = it->second == "1";
  o.summary.n_records = o.rows.size();
  o.summary.n_skipped = o.record_skips.size();
  out = std::move(o);
  return true;
}

}  // namespace pipeline_detail

/* Corpus-scale orchestration: per-speaker tract-length estimation, scale
   fitting and inversion, parallel across speakers. Results are a pure
   function of (records, model, config, seed): speakers are processed in
   sorted order, each draws its random substreams from its own id, and the
   merge is an ordered reduction. With an output directory set, per-speaker
   files make the run resumable. */
inline CorpusResult run_corpus(std::span<const VowelFrameRecord> records, const ModelData& model,
                               const AcousticConfig& acoustics, const InversionConfig& inv_cfg,
                               const RunOptions& opt) {
  inv_cfg.validate();
  acoustics.validate();

  std::map<std::string, std::vector<VowelFrameRecord>> by_speaker;
  for (const VowelFrameRecord& r : records) by_speaker[r.speaker_id].push_back(r);

  std::vector<pipeline_detail::SpeakerWork> work;
  work.reserve(by_speaker.size());
  for (auto& [id, recs] : by_speaker) work.push_back({id, std::move(recs)});

  const bool persist = !opt.output_dir.empty();
  std::filesystem::path parts_dir;
  if (persist) {
    parts_dir = opt.output_dir / "speaker_parts";
    std::filesystem::create_directories(parts_dir);
  }
  MetadataHeader meta;
  meta.config_hash = opt.config_hash;
  meta.seed = opt.seed;

  std::vector<pipeline_detail::SpeakerOutcome> outcomes(work.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mu;

  auto run_one = [&](std::size_t i) {
    const pipeline_detail::SpeakerWork& w = work[i];
    const std::filesystem::path part =
        persist ? parts_dir / (pipeline_detail::sanitize_id(w.speaker_id) + ".csv")
                : std::filesystem::path{};
    if (persist && opt.resume &&
        pipeline_detail::try_load_speaker_part(part, w, meta, outcomes[i]))
      return;
    outcomes[i] = pipeline_detail::process_speaker(
        w, model, acoustics, inv_cfg,
        substream_seed(opt.seed, fnv1a64(w.speaker_id)));
    if (persist && !outcomes[i].skipped_speaker)
      pipeline_detail::write_speaker_part(part, outcomes[i], meta);
  };

  unsigned n_workers = opt.workers > 0 ? static_cast<unsigned>(opt.workers)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(work.size()));
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < work.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < n_workers; ++t) {
      threads.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= work.size()) return;
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  CorpusResult out;
  for (std::size_t i = 0; i < work.size(); ++i) {
    pipeline_detail::SpeakerOutcome& o = outcomes[i];
    if (o.skipped_speaker) {
      out.skips.push_back({work[i].speaker_id, -1, o.skip_reason});
      continue;
    }
    out.speakers.push_back(o.summary);
    for (RecordResult& r : o.rows) out.rows.push_back(std::move(r));
    for (SkipEntry& s : o.record_skips) {
      out.skips.push_back(s);
      ++out.n_skipped_records;
    }
  }

  if (persist) {
    {
      std::ofstream os(opt.output_dir / "results.csv", std::ios::binary | std::ios::trunc);
      if (!os) fail(Errc::kIoFailure, "cannot write results.csv");
      write_metadata(os, meta);
      os << pipeline_detail::kResultColumns << '\n';
      for (const RecordResult& r : out.rows) pipeline_detail::write_result_row(os, r);
    }
    {
      std::ofstream os(opt.output_dir / "speakers.csv", std::ios::binary | std::ios::trunc);
      if (!os) fail(Errc::kIoFailure, "cannot write speakers.csv");
      write_metadata(os, meta);
      os << "speaker_id,gender,age,period,vtl_cm,vtl_plausible,scale,n_records,n_skipped,"
            "mean_larynx_height,mean_lip_protrusion\n";
      for (const SpeakerSummary& s : out.speakers) {
        os << csv_field(s.profile.speaker_id) << ',' << s.profile.gender << ',' << s.profile.age
           << ',' << s.profile.period << ',' << fmt_double(s.profile.vtl_cm) << ','
           << (s.profile.vtl_plausible ? 1 : 0) << ',' << fmt_double(s.scale) << ','
           << s.n_records << ',' << s.n_skipped << ',' << fmt_double(s.mean_larynx_height) << ','
           << fmt_double(s.mean_lip_protrusion) << '\n';
      }
    }
    {
      std::ofstream os(opt.output_dir / "skips.csv", std::ios::binary | std::ios::trunc);
      if (!os) fail(Errc::kIoFailure, "cannot write skips.csv");
      write_metadata(os, meta);
      os << "speaker_id,record_index,reason\n";
      for (const SkipEntry& s : out.skips)
        os << csv_field(s.speaker_id) << ',' << s.record_index << ',' << csv_field(s.reason)
           << '\n';
    }
  }
  return out;
}

// Reads a results.csv (or a per-speaker part) back into memory.
inline std::vector<RecordResult> read_results_csv(std::istream& is) {
  std::vector<std::string> lines = read_csv_lines(is);
  if (lines.empty() || lines[0] != pipeline_detail::kResultColumns)
    fail(Errc::kMalformedFile, "results table header mismatch");
  std::vector<RecordResult> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    RecordResult r;
    if (!pipeline_detail::parse_result_row(split_csv_line(lines[i]), r))
      fail(Errc::kMalformedFile, "bad results row at data line " + std::to_string(i));
    out.push_back(std::move(r));
  }
  return out;
}

struct BootstrapConfig {
  int resamples = 2000;
  std::uint64_t seed = 1;

  void validate() const {
    if (resamples < 1) fail(Errc::kBadConfig, "bootstrap resamples must be >= 1");
  }
};

enum class Factor { kGender, kAgeBand, kPeriod };

struct GroupKey {
  std::string gender;    // empty when marginalized over
  std::string age_band;
  std::string period;

  auto operator<=>(const GroupKey&) const = default;

  std::string label() const {
    std::string out;
    auto add = [&](const std::string& s) {
      if (s.empty()) return;
      if (!out.empty()) out += '|';
      out += s;
    };
    add(gender);
    add(age_band);
    add(period);
    return out.empty() ? std::string("all") : out;
  }
};

struct ParamStats {
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct GroupStats {
  GroupKey key;
  std::size_t n_speakers = 0;
  std::array<ParamStats, ArticulatoryVector::kSize> params;
};

/* Group aggregation over speakers: speaker-level means first (every speaker
   counts once, however many records it has), then the group mean, the sample
   SD, and a seeded nonparametric bootstrap CI over speakers. */
inline std::vector<GroupStats> aggregate(std::span<const RecordResult> rows,
                                         std::span<const Factor> factors,
                                         const BootstrapConfig& boot) {
  boot.validate();
  if (rows.empty()) fail(Errc::kEmptyInput, "nothing to aggregate");

  struct SpeakerAcc {
    char gender = '?';
    int age = 0;
    std::string period;
    std::array<double, ArticulatoryVector::kSize> sum{};
    std::size_t n = 0;
  };
  std::map<std::string, SpeakerAcc> per_speaker;
  for (const RecordResult& r : rows) {
    SpeakerAcc& acc = per_speaker[r.record.speaker_id];
    acc.gender = r.record.gender;
    acc.age = r.record.age;
    acc.period = r.record.period;
    for (std::size_t i = 0; i < acc.sum.size(); ++i) acc.sum[i] += r.x[i];
    ++acc.n;
  }

  bool by_gender = false, by_age = false, by_period = false;
  for (Factor f : factors) {
    if (f == Factor::kGender) by_gender = true;
    if (f == Factor::kAgeBand) by_age = true;
    if (f == Factor::kPeriod) by_period = true;
  }

  using Means = std::array<double, ArticulatoryVector::kSize>;
  std::map<GroupKey, std::vector<Means>> groups;  // speaker means, id-sorted by map order
  for (const auto& [id, acc] : per_speaker) {
    GroupKey key;
    if (by_gender) key.gender = std::string(1, acc.gender);
    if (by_age) key.age_band = std::string(age_band(acc.age));
    if (by_period) key.period = acc.period;
    Means m{};
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = acc.sum[i] / static_cast<double>(acc.n);
    groups[key].push_back(m);
  }

  std::vector<GroupStats> out;
  for (const auto& [key, means] : groups) {
    GroupStats g;
    g.key = key;
    g.n_speakers = means.size();
    const std::size_t n = means.size();

    for (std::size_t p = 0; p < ArticulatoryVector::kSize; ++p) {
      double m = 0.0;
      for (const Means& s : means) m += s[p];
      m /= static_cast<double>(n);
      double var = 0.0;
      for (const Means& s : means) var += (s[p] - m) * (s[p] - m);
      g.params[p].mean = m;
      g.params[p].sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    }

    Rng rng(substream_seed(boot.seed, fnv1a64(key.label())));
    std::vector<Means> boot_means(static_cast<std::size_t>(boot.resamples));
    for (Means& bm : boot_means) {
      bm.fill(0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const Means& pick = means[rng.index(n)];
        for (std::size_t p = 0; p < bm.size(); ++p) bm[p] += pick[p];
      }
      for (double& v : bm) v /= static_cast<double>(n);
    }
    std::vector<double> col(boot_means.size());
    for (std::size_t p = 0; p < ArticulatoryVector::kSize; ++p) {
      for (std::size_t b = 0; b < boot_means.size(); ++b) col[b] = boot_means[b][p];
      std::sort(col.begin(), col.end());
      auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(col.size() - 1);
        const std::size_t idx = static_cast<std::size_t>(std::llround(pos));
        return col[std::min(idx, col.size() - 1)];
      };
      g.params[p].ci_low = std::min(quantile(0.025), g.params[p].mean);
      g.params[p].ci_high = std::max(quantile(0.975), g.params[p].mean);
    }
    out.push_back(std::move(g));
  }
  return out;
}

inline constexpr std::string_view kAnalysisColumns = "speaker_id,gender,age,period,vowel,LH,LP";

/* Analysis-ready export: one row per vowel realization with the dependent
   variables and the model factors, for mixed-model fitting in external
   statistics tools. */
inline void export_analysis_table(std::span<const RecordResult> rows, std::ostream& os,
                                  const MetadataHeader& meta) {
  write_metadata(os, meta);
  os << kAnalysisColumns << '\n';
  for (const RecordResult& r : rows) {
    os << csv_field(r.record.speaker_id) << ',' << r.record.gender << ',' << r.record.age << ','
       << r.record.period << ',' << r.record.vowel << ','
       << fmt_double(r.x.larynx_height()) << ',' << fmt_double(r.x.lip_protrusion()) << '\n';
  }
}

struct AnalysisRow {
  std::string speaker_id;
  char gender = '?';
  int age = 0;
  std::string period;
  std::string vowel;
  double lh = 0.0;
  double lp = 0.0;
};

inline std::vector<AnalysisRow> read_analysis_table(std::istream& is) {
  std::vector<std::string> lines = read_csv_lines(is);
  if (lines.empty() || lines[0] != kAnalysisColumns)
    fail(Errc::kMalformedFile, "analysis table header mismatch");
  std::vector<AnalysisRow> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != 7) fail(Errc::kMalformedFile, "analysis table row has wrong arity");
    AnalysisRow r;
    r.speaker_id = f[0];
    r.gender = f[1].empty() ? '?' : f[1][0];
    std::int64_t age = 0;
    if (!try_parse_i64(f[2], age)) fail(Errc::kMalformedFile, "bad age in analysis table");
    r.age = static_cast<int>(age);
    r.period = f[3];
    r.vowel = f[4];
    r.lh = parse_double(f[5], "LH");
    r.lp = parse_double(f[6], "LP");
    out.push_back(std::move(r));
  }
  return out;
}

struct PlotEmission {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> missing_groups;  // expected cells absent from the stats
};

namespace pipeline_detail {

inline void write_plot_table(const std::filesystem::path& path,
                             std::span<const GroupStats> stats, std::size_t param,
                             bool group_by_gender, const MetadataHeader& meta,
                             std::vector<std::string>& missing) {
  struct Row {
    std::string x, group;
    const GroupStats* g;
  };
  std::vector<Row> rows;
  if (group_by_gender) {
    const std::array<std::string_view, 4> bands = {"20-35", "36-50", "51-65", ">65"};
    for (std::string_view band : bands) {
      for (char gender : {'F', 'M'}) {
        const GroupStats* found = nullptr;
        for (const GroupStats& g : stats)
          if (g.key.age_band == band && g.key.gender == std::string(1, gender)) found = &g;
        if (!found) {
          missing.push_back(path.filename().string() + ": no data for " +
                            std::string(1, gender) + "/" + std::string(band));
          continue;
        }
        rows.push_back({std::string(band), std::string(1, gender), found});
      }
    }
  } else {
    for (std::string_view period : kPeriods) {
      const GroupStats* found = nullptr;
      for (const GroupStats& g : stats)
        if (g.key.period == period) found = &g;
      if (!found) {
        missing.push_back(path.filename().string() + ": no data for " + std::string(period));
        continue;
      }
      rows.push_back({std::string(period), "all", found});
    }
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(Errc::kIoFailure, "cannot write " + path.string());
  write_metadata(os, meta);
  os << "x,group,mean,ci_low,ci_high\n";
  for (const Row& r : rows) {
    const ParamStats& p = r.g->params[param];
    os << r.x << ',' << r.group << ',' << fmt_double(p.mean) << ',' << fmt_double(p.ci_low)
       << ',' << fmt_double(p.ci_high) << '\n';
  }
}

}  // namespace pipeline_detail

/* Per-figure plot tables: larynx height against age band by gender, larynx
   height against period, lip protrusion against age band by gender. Expected
   cells without data are omitted from the tables and listed in a sidecar
   report. */
inline PlotEmission emit_plot_data(std::span<const GroupStats> by_age_gender,
                                   std::span<const GroupStats> by_period,
                                   const std::filesystem::path& dir, const MetadataHeader& meta) {
  std::filesystem::create_directories(dir);
  constexpr std::size_t kLh = 6, kLp = 5;
  PlotEmission out;

  const std::filesystem::path lh_age = dir / "lh_by_age_gender.csv";
  pipeline_detail::write_plot_table(lh_age, by_age_gender, kLh, true, meta, out.missing_groups);
  out.files.push_back(lh_age);

  const std::filesystem::path lh_period = dir / "lh_by_period.csv";
  pipeline_detail::write_plot_table(lh_period, by_period, kLh, false, meta, out.missing_groups);
  out.files.push_back(lh_period);

  const std::filesystem::path lp_age = dir / "lp_by_age_gender.csv";
  pipeline_detail::write_plot_table(lp_age, by_age_gender, kLp, true, meta, out.missing_groups);
  out.files.push_back(lp_age);

  std::ofstream report(dir / "plots_report.txt", std::ios::binary | std::ios::trunc);
  if (!report) fail(Errc::kIoFailure, "cannot write plots_report.txt");
  if (out.missing_groups.empty()) {
    report << "all expected groups present\n";
  } else {
    for (const std::string& m : out.missing_groups) report << "omitted: " << m << '\n';
  }
  return out;
}

}  // namespace artinv
