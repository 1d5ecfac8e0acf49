/*
  artinv — acoustic-to-articulatory inversion toolkit, command line front end.

  Subcommands:
    synth             articulatory scores -> first four formants
    vtl               formants -> vocal tract length (cm)
    extract-formants  wav frame table -> formant table (ceiling-optimized)
    invert            frame table -> per-record articulatory results
    aggregate         results -> group statistics and plot data
    export            results -> analysis-ready table
    roundtrip-test    forward-synthesize, invert, report recovery rate

  Exit codes: 0 success, 1 runtime error, 2 usage error.
*/

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "artinv/artinv.hpp"

namespace fs = std::filesystem;
using namespace artinv;

namespace {

// The output directory (and only it) can be overridden by environment.
void apply_env_output_dir(RunConfig& cfg) {
  if (const char* env = std::getenv("ARTINV_OUT_DIR")) {
    if (*env) cfg.output_dir = env;
  }
}

MetadataHeader meta_of(const RunConfig& cfg) {
  MetadataHeader m;
  m.config_hash = cfg.config_hash;
  m.seed = cfg.seed;
  return m;
}

int cmd_synth(const std::string& model_path, const std::vector<double>& params, double scale,
              double target_vtl, bool lossless) {
  ModelData model = load_model_data(fs::path(model_path));
  ArticulatoryVector x{};
  for (std::size_t i = 0; i < ArticulatoryVector::kSize; ++i) x[i] = params[i];
  if (!x.in_bounds()) fail(Errc::kOutOfBounds, "articulatory scores must lie in [-3, 3]");
  InversionContext ctx;
  ctx.model = &model;
  if (target_vtl > 0.0) ctx.scale = fit_scale_factor(target_vtl, model);
  else ctx.scale = scale;
  if (lossless) ctx.acoustics.losses = LossModel::kLossless;
  FormantVector f = generate_formants(x, ctx);
  std::cout << fmt_double(f.f1()) << ' ' << fmt_double(f.f2()) << ' ' << fmt_double(f.f3())
            << ' ' << fmt_double(f.f4()) << '\n';
  return 0;
}

int cmd_vtl(const std::vector<double>& f, double c) {
  std::cout << fmt_double(estimate_vtl(make_formants(f[0], f[1], f[2], f[3]), c)) << '\n';
  return 0;
}

int cmd_extract(const std::string& table_path, const std::string& output_path,
                const CeilingSearchConfig& ceiling_cfg, const MetadataHeader& meta) {
  std::ifstream is(table_path, std::ios::binary);
  if (!is) fail(Errc::kIoFailure, "cannot open frame table: " + table_path);
  std::vector<std::string> lines = read_csv_lines(is);
  if (lines.empty() || split_csv_line(lines[0]) !=
                           std::vector<std::string>{"file", "center_time_s", "speaker_id", "phone"})
    fail(Errc::kBadArgument,
         "frame table header must be: file,center_time_s,speaker_id,phone");

  struct Entry {
    std::string file, speaker, phone;
    double center_s = 0.0;
    AudioFrame frame;
    bool ok = false;
    std::string error;
  };
  std::vector<Entry> entries;
  std::map<std::string, WavData> cache;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != 4) fail(Errc::kBadArgument, "bad frame table row " + std::to_string(i));
    Entry e;
    e.file = f[0];
    e.center_s = parse_double(f[1], "center_time_s");
    e.speaker = f[2];
    e.phone = f[3];
    try {
      auto it = cache.find(e.file);
      if (it == cache.end()) it = cache.emplace(e.file, read_wav(e.file)).first;
      const WavData& wav = it->second;
      const double half = 0.0125;
      const long start = std::lround((e.center_s - half) * wav.sample_rate_hz);
      const long len = std::lround(0.025 * wav.sample_rate_hz);
      if (start < 0 || start + len > static_cast<long>(wav.samples.size()))
        fail(Errc::kBadArgument, "frame window outside the audio file");
      e.frame.samples.assign(wav.samples.begin() + start, wav.samples.begin() + start + len);
      e.frame.sample_rate_hz = wav.sample_rate_hz;
      e.frame.duration_ms = 25.0;
      e.frame.speaker_id = e.speaker;
      e.frame.phone = e.phone;
      e.ok = true;
    } catch (const Error& err) {
      e.error = err.what();
    }
    entries.push_back(std::move(e));
  }

  // ceiling per speaker x phone group, then per-frame estimation
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].ok) groups[{entries[i].speaker, entries[i].phone}].push_back(i);

  std::map<std::pair<std::string, std::string>, double> group_ceiling;
  for (const auto& [key, idx] : groups) {
    std::vector<AudioFrame> frames;
    for (std::size_t i : idx) frames.push_back(entries[i].frame);
    try {
      group_ceiling[key] = optimize_ceiling(frames, ceiling_cfg);
    } catch (const Error& err) {
      for (std::size_t i : idx) {
        entries[i].ok = false;
        entries[i].error = err.what();
      }
    }
  }

  std::ofstream os(output_path, std::ios::binary | std::ios::trunc);
  if (!os) fail(Errc::kIoFailure, "cannot write " + output_path);
  write_metadata(os, meta);
  os << "speaker_id,phone,file,center_time_s,ceiling_hz,f1,f2,f3,f4,duration_ms\n";
  std::size_t n_ok = 0, n_failed = 0;
  for (Entry& e : entries) {
    if (e.ok) {
      try {
        const double ceiling = group_ceiling.at({e.speaker, e.phone});
        FormantVector f = burg_formants(e.frame, ceiling, ceiling_cfg);
        os << csv_field(e.speaker) << ',' << csv_field(e.phone) << ',' << csv_field(e.file)
           << ',' << fmt_double(e.center_s) << ',' << fmt_double(ceiling) << ','
           << fmt_double(f.f1()) << ',' << fmt_double(f.f2()) << ',' << fmt_double(f.f3())
           << ',' << fmt_double(f.f4()) << ",25\n";
        ++n_ok;
        continue;
      } catch (const Error& err) {
        e.error = err.what();
      }
    }
    ++n_failed;
    std::cerr << "skipped " << e.file << " @" << e.center_s << "s: " << e.error << '\n';
  }
  std::cerr << "extract-formants: " << n_ok << " frames written, " << n_failed << " skipped\n";
  return 0;
}

int cmd_invert(const std::string& config_path) {
  RunConfig cfg = load_config(fs::path(config_path));
  apply_env_output_dir(cfg);
  validate_config_paths(cfg);
  fs::create_directories(cfg.output_dir);
  MetadataHeader meta = meta_of(cfg);

  ModelData model = load_model_data(cfg.model_data);
  std::ifstream is(cfg.input_table, std::ios::binary);
  if (!is) fail(Errc::kIoFailure, "cannot open input table: " + cfg.input_table.string());
  IngestResult ingest = ingest_frames(is);

  {
    std::ofstream os(cfg.output_dir / "rejects.csv", std::ios::binary | std::ios::trunc);
    write_metadata(os, meta);
    os << "line,reason,detail\n";
    for (const RejectedRow& r : ingest.report.rejected)
      os << r.line_no << ',' << csv_field(r.reason) << ',' << csv_field(r.detail) << '\n';
  }
  {
    std::ofstream os(cfg.output_dir / "demographics.csv", std::ios::binary | std::ios::trunc);
    write_metadata(os, meta);
    os << "gender,age_band,period,n_speakers\n";
    for (const auto& [key, n] : speaker_counts(ingest.records))
      os << key.gender << ',' << key.age_band << ',' << key.period << ',' << n << '\n';
  }

  RunOptions opt;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  opt.output_dir = cfg.output_dir;
  opt.config_hash = cfg.config_hash;
  CorpusResult result = run_corpus(ingest.records, model, cfg.acoustics, cfg.inversion, opt);

  std::cerr << "invert: " << ingest.report.rows_in << " rows in, " << ingest.report.accepted
            << " accepted, " << ingest.report.rejected.size() << " rejected; "
            << result.speakers.size() << " speakers, " << result.rows.size()
            << " records inverted, " << result.n_skipped_records << " skipped\n";
  return 0;
}

int cmd_aggregate(const std::string& config_path, std::string results_path) {
  RunConfig cfg = load_config(fs::path(config_path));
  apply_env_output_dir(cfg);
  MetadataHeader meta = meta_of(cfg);
  if (results_path.empty()) results_path = (cfg.output_dir / "results.csv").string();
  std::ifstream is(results_path, std::ios::binary);
  if (!is) fail(Errc::kIoFailure, "cannot open results table: " + results_path);
  std::vector<RecordResult> rows = read_results_csv(is);

  const Factor full[] = {Factor::kGender, Factor::kAgeBand, Factor::kPeriod};
  const Factor age_gender[] = {Factor::kGender, Factor::kAgeBand};
  const Factor period_only[] = {Factor::kPeriod};
  std::vector<GroupStats> stats_full = aggregate(rows, full, cfg.bootstrap);
  std::vector<GroupStats> stats_ag = aggregate(rows, age_gender, cfg.bootstrap);
  std::vector<GroupStats> stats_p = aggregate(rows, period_only, cfg.bootstrap);

  fs::create_directories(cfg.output_dir);
  {
    std::ofstream os(cfg.output_dir / "group_stats.csv", std::ios::binary | std::ios::trunc);
    write_metadata(os, meta);
    os << "gender,age_band,period,n_speakers";
    for (std::string_view name : ArticulatoryVector::kNames)
      os << ',' << name << "_mean," << name << "_sd," << name << "_ci_low," << name
         << "_ci_high";
    os << '\n';
    for (const GroupStats& g : stats_full) {
      os << g.key.gender << ',' << g.key.age_band << ',' << g.key.period << ',' << g.n_speakers;
      for (const ParamStats& p : g.params)
        os << ',' << fmt_double(p.mean) << ',' << fmt_double(p.sd) << ','
           << fmt_double(p.ci_low) << ',' << fmt_double(p.ci_high);
      os << '\n';
    }
  }
  PlotEmission plots = emit_plot_data(stats_ag, stats_p, cfg.output_dir / "plots", meta);
  std::cerr << "aggregate: " << stats_full.size() << " groups, " << plots.files.size()
            << " plot tables";
  if (!plots.missing_groups.empty())
    std::cerr << ", " << plots.missing_groups.size() << " expected cells missing";
  std::cerr << '\n';
  return 0;
}

int cmd_export(const std::string& config_path, std::string results_path,
               std::string output_path) {
  RunConfig cfg = load_config(fs::path(config_path));
  apply_env_output_dir(cfg);
  if (results_path.empty()) results_path = (cfg.output_dir / "results.csv").string();
  if (output_path.empty()) output_path = (cfg.output_dir / "analysis.csv").string();
  std::ifstream is(results_path, std::ios::binary);
  if (!is) fail(Errc::kIoFailure, "cannot open results table: " + results_path);
  std::vector<RecordResult> rows = read_results_csv(is);
  std::ofstream os(output_path, std::ios::binary | std::ios::trunc);
  if (!os) fail(Errc::kIoFailure, "cannot write " + output_path);
  export_analysis_table(rows, os, meta_of(cfg));
  std::cerr << "export: " << rows.size() << " rows -> " << output_path << '\n';
  return 0;
}

int cmd_roundtrip(const std::string& model_path, int samples, std::uint64_t seed, int restarts,
                  double box, double tol_pct, double min_pass) {
  ModelData model = load_model_data(fs::path(model_path));
  InversionContext ctx;
  ctx.model = &model;
  InversionConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  Rng rng(substream_seed(seed, 0xabcd));
  int passed = 0;
  for (int t = 0; t < samples; ++t) {
    ArticulatoryVector x{};
    for (double& c : x.v) c = rng.uniform(-box, box);
    FormantVector target = generate_formants(x, ctx);
    VowelInversionResult r = invert_vowel_set(std::vector<FormantVector>{target}, ctx, cfg,
                                              static_cast<std::uint64_t>(t) + 1);
    FormantVector got = generate_formants(r.selected[0].x, ctx);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(got.f[i] - target.f[i]) / target.f[i]);
    const bool ok = worst * 100.0 <= tol_pct;
    passed += ok ? 1 : 0;
    std::cout << "sample " << t << (ok ? " pass " : " FAIL ") << fmt_double(worst * 100.0)
              << "%\n";
  }
  const double rate = static_cast<double>(passed) / samples;
  std::cout << "passed " << passed << "/" << samples << " (" << fmt_double(rate * 100.0)
            << "%)\n";
  return rate >= min_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acoustic-to-articulatory inversion toolkit"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "articulatory scores -> formants");
  std::vector<double> synth_params;
  std::string synth_model = "data/maeda_reference_v1.mdf";
  double synth_scale = 1.0, synth_vtl = 0.0;
  bool synth_lossless = false;
  synth->add_option("params", synth_params, "seven articulatory scores in [-3,3]")
      ->expected(7)
      ->required();
  synth->add_option("--model", synth_model, "model data file");
  synth->add_option("--scale", synth_scale, "size correction factor");
  synth->add_option("--vtl", synth_vtl, "target neutral tract length (cm); overrides --scale");
  synth->add_flag("--lossless", synth_lossless, "ideal lossless acoustics");

  auto* vtl = app.add_subcommand("vtl", "formants -> vocal tract length (cm)");
  std::vector<double> vtl_f;
  double vtl_c = 34000.0;
  vtl->add_option("formants", vtl_f, "f1 f2 f3 f4 in Hz")->expected(4)->required();
  vtl->add_option("--c", vtl_c, "speed of sound (cm/s)");

  auto* extract = app.add_subcommand("extract-formants", "wav frames -> formant table");
  std::string ex_table, ex_output, ex_config;
  extract->add_option("--table", ex_table, "csv: file,center_time_s,speaker_id,phone")
      ->required();
  extract->add_option("--output", ex_output, "output csv path")->required();
  extract->add_option("--config", ex_config, "run configuration (ceiling settings)");

  auto* invert = app.add_subcommand("invert", "frame table -> articulatory results");
  std::string inv_config;
  invert->add_option("--config", inv_config, "run configuration file")->required();

  auto* agg = app.add_subcommand("aggregate", "results -> group stats and plot data");
  std::string agg_config, agg_results;
  agg->add_option("--config", agg_config, "run configuration file")->required();
  agg->add_option("--results", agg_results, "results csv (default: <output_dir>/results.csv)");

  auto* exp = app.add_subcommand("export", "results -> analysis-ready table");
  std::string exp_config, exp_results, exp_output;
  exp->add_option("--config", exp_config, "run configuration file")->required();
  exp->add_option("--results", exp_results, "results csv (default: <output_dir>/results.csv)");
  exp->add_option("--output", exp_output, "output csv (default: <output_dir>/analysis.csv)");

  auto* rt = app.add_subcommand("roundtrip-test", "forward-synthesize, invert, report");
  std::string rt_model = "data/maeda_reference_v1.mdf";
  int rt_samples = 20, rt_restarts = 20;
  std::uint64_t rt_seed = 1;
  double rt_box = 2.0, rt_tol = 1.0, rt_min_pass = 0.95;
  rt->add_option("--model", rt_model, "model data file");
  rt->add_option("--samples", rt_samples, "number of random articulatory targets");
  rt->add_option("--seed", rt_seed, "random seed");
  rt->add_option("--restarts", rt_restarts, "optimizations per target");
  rt->add_option("--box", rt_box, "sampling half-range for the targets");
  rt->add_option("--tol-pct", rt_tol, "per-formant tolerance, percent");
  rt->add_option("--min-pass", rt_min_pass, "required pass fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed())
      return cmd_synth(synth_model, synth_params, synth_scale, synth_vtl, synth_lossless);
    if (vtl->parsed()) return cmd_vtl(vtl_f, vtl_c);
    if (extract->parsed()) {
      CeilingSearchConfig ceiling_cfg;
      MetadataHeader meta;
      if (!ex_config.empty()) {
        RunConfig cfg = load_config(fs::path(ex_config));
        ceiling_cfg = cfg.ceiling;
        meta = meta_of(cfg);
      }
      return cmd_extract(ex_table, ex_output, ceiling_cfg, meta);
    }
    if (invert->parsed()) return cmd_invert(inv_config);
    if (agg->parsed()) return cmd_aggregate(agg_config, agg_results);
    if (exp->parsed()) return cmd_export(exp_config, exp_results, exp_output);
    if (rt->parsed())
      return cmd_roundtrip(rt_model, rt_samples, rt_seed, rt_restarts, rt_box, rt_tol,
                           rt_min_pass);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
