/*
  Acceptance suite: one pass/fail line per criterion, nonzero exit if any
  criterion fails. Heavy criteria parallelize over their independent samples;
  every random draw comes from a fixed, per-sample substream, so the suite is
  deterministic regardless of scheduling.
*/

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "artinv/artinv.hpp"
#include "synth_signals.hpp"
#include "testutil.hpp"

using namespace artinv;

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < std::min<unsigned>(workers, static_cast<unsigned>(n)); ++t)
    threads.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (std::thread& t : threads) t.join();
}

const ModelData& model() {
  static ModelData m = load_model_data(testutil::model_path());
  return m;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- criterion 1: quarter-wave oracle --------------------------------------

bool criterion_quarter_wave(std::string& detail) {
  AcousticConfig cfg;
  cfg.losses = LossModel::kLossless;
  AreaFunction tube;
  tube.sections.assign(20, TubeSection{4.0, 17.5 / 20.0});
  const double t0 = now_s();
  FormantVector f = resonances(tube, cfg);
  const double elapsed = now_s() - t0;
  const double expected[4] = {485.7, 1457.1, 2428.6, 3400.0};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    worst = std::max(worst, std::abs(f.f[i] - expected[i]) / expected[i]);
  std::ostringstream os;
  os << "max deviation " << fmt_double(worst * 100.0) << "% (tol 1%), " << fmt_double(elapsed)
     << " s (limit 1 s)";
  detail = os.str();
  return worst <= 0.01 && elapsed < 1.0;
}

// ---- criterion 2: VTL arithmetic and homogeneity ---------------------------

bool criterion_vtl(std::string& detail) {
  const double v = estimate_vtl(make_formants(500, 1500, 2500, 3500));
  bool ok = std::abs(v - 17.33) <= 0.01;

  Rng rng(2002);
  double worst_rel = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double f1 = rng.uniform(200, 900);
    const double f2 = f1 + rng.uniform(200, 1200);
    const double f3 = f2 + rng.uniform(200, 1200);
    const double f4 = f3 + rng.uniform(200, 1200);
    const double s = rng.uniform(0.25, 4.0);
    const double a = estimate_vtl(make_formants(s * f1, s * f2, s * f3, s * f4)) * s;
    const double b = estimate_vtl(make_formants(f1, f2, f3, f4));
    worst_rel = std::max(worst_rel, std::abs(a - b) / b);
  }
  ok = ok && worst_rel <= 1e-12;
  std::ostringstream os;
  os << "vtl(500,1500,2500,3500) = " << fmt_double(v)
     << " (want 17.33 +/- 0.01); homogeneity worst rel err " << fmt_double(worst_rel)
     << " (tol 1e-12)";
  detail = os.str();
  return ok;
}

// ---- criterion 3: round-trip inversion -------------------------------------

bool criterion_roundtrip(std::string& detail) {
  const int kSamples = 100;
  InversionContext ctx;
  ctx.model = &model();
  InversionConfig cfg;
  cfg.restarts = 20;
  cfg.seed = 33;

  const double t0 = now_s();
  std::vector<int> ok(kSamples, 0);
  parallel_for(kSamples, [&](std::size_t t) {
    Rng rng(substream_seed(303, t));
    ArticulatoryVector x{};
    for (double& c : x.v) c = rng.uniform(-2.0, 2.0);
    const FormantVector target = generate_formants(x, ctx);
    VowelInversionResult r = invert_vowel_set(std::vector<FormantVector>{target}, ctx, cfg,
                                              static_cast<std::uint64_t>(t) + 1);
    const FormantVector got = generate_formants(r.selected[0].x, ctx);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(got.f[i] - target.f[i]) / target.f[i]);
    ok[t] = worst <= 0.01 ? 1 : 0;
  });
  const double elapsed = now_s() - t0;
  int passed = 0;
  for (int v : ok) passed += v;
  std::ostringstream os;
  os << passed << "/" << kSamples << " within 1% per formant (need >= 95), "
     << fmt_double(elapsed) << " s (limit 600 s)";
  detail = os.str();
  return passed >= 95 && elapsed <= 600.0;
}

// ---- criterion 4: dispersion-reduction property ----------------------------

double trace_variance(const std::vector<ArticulatoryVector>& xs) {
  std::array<double, 7> mean{};
  for (const ArticulatoryVector& x : xs)
    for (std::size_t i = 0; i < 7; ++i) mean[i] += x[i];
  for (double& m : mean) m /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (const ArticulatoryVector& x : xs)
    for (std::size_t i = 0; i < 7; ++i) {
      const double d = x[i] - mean[i];
      acc += d * d;
    }
  return acc / static_cast<double>(xs.size());
}

bool criterion_dispersion(std::string& detail) {
  const int kSets = 50;
  const std::size_t kRealizations = 5;
  InversionConfig cfg;
  cfg.restarts = 20;
  cfg.seed = 44;

  std::vector<int> reduced(kSets, 0);
  parallel_for(kSets, [&](std::size_t set) {
    Rng rng(substream_seed(404, set));
    InversionContext ctx;
    ctx.model = &model();
    ctx.scale = rng.uniform(13.0, 19.0) / model().l0_cm;
    ArticulatoryVector base{};
    for (double& c : base.v) c = rng.uniform(-2.0, 2.0);
    const FormantVector clean = generate_formants(base, ctx);

    std::vector<FormantVector> obs;
    while (obs.size() < kRealizations) {
      FormantVector jittered = clean;
      for (double& f : jittered.f) f *= 1.0 + 0.02 * rng.uniform(-1.0, 1.0);
      if (jittered.valid()) obs.push_back(jittered);
    }
    VowelInversionResult r = invert_vowel_set(obs, ctx, cfg, set + 1);

    std::vector<ArticulatoryVector> selected, best_cost;
    for (const InversionSolution& s : r.selected) selected.push_back(s.x);
    for (std::size_t n = 0; n < obs.size(); ++n) {
      std::size_t best = n * r.restarts;
      for (std::size_t k = 1; k < r.restarts; ++k)
        if (r.pool[n * r.restarts + k].residual_hz < r.pool[best].residual_hz)
          best = n * r.restarts + k;
      best_cost.push_back(r.pool[best].x);
    }
    reduced[set] = trace_variance(selected) <= trace_variance(best_cost) ? 1 : 0;
  });
  int wins = 0;
  for (int v : reduced) wins += v;
  std::ostringstream os;
  os << wins << "/" << kSets
     << " sets with variance(closest-to-mean) <= variance(best-cost) (need >= 45)";
  detail = os.str();
  return wins >= 45;
}

// ---- criterion 5: weighted-mean oracle -------------------------------------

bool criterion_weighted_mean(std::string& detail) {
  InversionConfig cfg;
  Rng rng(505);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng.index(40);
    std::vector<InversionSolution> pool(n);
    for (InversionSolution& s : pool) {
      for (double& c : s.x.v) c = rng.uniform(-3, 3);
      s.residual_hz = std::pow(10.0, rng.uniform(-9, 4));
    }
    const ArticulatoryVector m = weighted_mean_solution(pool, cfg);

    double r_max = cfg.residual_floor_hz;
    for (const InversionSolution& s : pool)
      r_max = std::max(r_max, std::max(s.residual_hz, cfg.residual_floor_hz));
    double w_sum = 0.0;
    std::array<double, 7> acc{};
    for (const InversionSolution& s : pool) {
      const double w = std::log(r_max * M_E / std::max(s.residual_hz, cfg.residual_floor_hz));
      if (w <= 0.0) {
        detail = "non-positive weight encountered";
        return false;
      }
      w_sum += w;
      for (std::size_t i = 0; i < 7; ++i) acc[i] += w * s.x[i];
    }
    for (std::size_t i = 0; i < 7; ++i) {
      const double expect = acc[i] / w_sum;
      worst = std::max(worst, std::abs(m[i] - expect) / std::max(1.0, std::abs(expect)));
    }
  }
  std::ostringstream os;
  os << "1000 pools, worst relative deviation " << fmt_double(worst) << " (tol 1e-12)";
  detail = os.str();
  return worst <= 1e-12;
}

// ---- criterion 6: burg estimation accuracy ---------------------------------

bool criterion_burg(std::string& detail) {
  CeilingSearchConfig cfg;
  Rng rng(606);
  std::vector<double> err1, err2, err3, err4;
  int failures = 0;
  for (int t = 0; t < 20; ++t) {
    double f1, f2, f3, f4, bw_scale, f0;
    if (t == 0) {
      f1 = 500;
      f2 = 1500;
      f3 = 2500;
      f4 = 3500;
      bw_scale = 1.0;
      f0 = 93.0;
    } else {
      f1 = rng.uniform(280, 850);
      f2 = f1 + rng.uniform(250, std::max(260.0, 2300 - f1));
      f3 = std::max(f2 + 300, rng.uniform(2300, 3100));
      f4 = std::max(f3 + 300, rng.uniform(3300, 4200));
      bw_scale = rng.uniform(0.8, 1.3);
      f0 = rng.uniform(85, 130);
    }
    std::vector<testutil::PoleSpec> poles{{f1, 60 * bw_scale},
                                          {f2, 90 * bw_scale},
                                          {f3, 120 * bw_scale},
                                          {f4, 150 * bw_scale}};
    AudioFrame frame = testutil::vowel_frame(poles, 16000.0, f0, 1e-4,
                                             static_cast<std::uint64_t>(600 + t));
    try {
      FormantVector est = burg_formants(frame, 5000.0, cfg);
      err1.push_back(std::abs(est.f1() - f1));
      err2.push_back(std::abs(est.f2() - f2));
      err3.push_back(std::abs(est.f3() - f3));
      err4.push_back(std::abs(est.f4() - f4));
    } catch (const Error&) {
      ++failures;
      err1.push_back(1e9);
      err2.push_back(1e9);
      err3.push_back(1e9);
      err4.push_back(1e9);
    }
  }
  const double m1 = median(err1), m2 = median(err2), m3 = median(err3), m4 = median(err4);
  std::ostringstream os;
  os << "median abs err Hz: F1 " << fmt_double(m1) << ", F2 " << fmt_double(m2) << ", F3 "
     << fmt_double(m3) << ", F4 " << fmt_double(m4) << " (tol 30/30/60/60)";
  if (failures) os << ", " << failures << " frames failed";
  detail = os.str();
  return m1 <= 30.0 && m2 <= 30.0 && m3 <= 60.0 && m4 <= 60.0;
}

// ---- criterion 7: ceiling search -------------------------------------------

bool criterion_ceiling(std::string& detail) {
  CeilingSearchConfig cfg;
  std::vector<AudioFrame> base = testutil::ceiling_group(1.0, 6, 701);
  std::vector<AudioFrame> scaled = testutil::ceiling_group(1.2, 6, 702);
  const double c_base = optimize_ceiling(base, cfg);
  const double c_scaled = optimize_ceiling(scaled, cfg);

  // tie-break determinism: repeated runs agree, and an all-tied group (one
  // frame, zero variance at every eligible ceiling) lands on the lowest one
  const bool deterministic =
      optimize_ceiling(base, cfg) == c_base && optimize_ceiling(scaled, cfg) == c_scaled;
  std::vector<AudioFrame> single{base[0]};
  const double c_single = optimize_ceiling(single, cfg);

  std::ostringstream os;
  os << "base " << fmt_double(c_base) << " Hz, scaled " << fmt_double(c_scaled)
     << " Hz (need strictly higher); single-frame tie-break -> " << fmt_double(c_single)
     << " (grid min " << fmt_double(cfg.ceiling_min_hz) << ")";
  detail = os.str();
  return c_scaled > c_base && deterministic && c_single == cfg.ceiling_min_hz;
}

// ---- criterion 8: synthetic-corpus recovery --------------------------------

bool criterion_corpus_recovery(std::string& detail) {
  const double kOffset = 0.4;
  InversionContext synth_ctx;
  synth_ctx.model = &model();
  Rng rng(808);

  std::vector<VowelFrameRecord> records;
  std::vector<ArticulatoryVector> vowel_bases;
  vowel_bases.push_back({{1.6, -0.7, -0.5, 0.2, 0.1, 0.0, 0.0}});
  vowel_bases.push_back({{-0.8, 1.3, 1.1, 0.3, -0.2, -0.3, 0.0}});
  vowel_bases.push_back({{-0.5, -1.1, 0.7, 0.0, 0.3, 1.1, 0.0}});
  const char* vowel_names[3] = {"a", "i", "u"};

  for (int group = 0; group < 2; ++group) {
    const double group_lh = group == 0 ? kOffset : 0.0;
    for (int s = 0; s < 5; ++s) {
      const std::string id = (group == 0 ? "ga_" : "gb_") + std::to_string(s);
      const double vtl = rng.uniform(14.0, 16.0);
      const double scale = fit_scale_factor(vtl, model());
      for (int v = 0; v < 3; ++v) {
        for (int n = 0; n < 4; ++n) {
          ArticulatoryVector x = vowel_bases[static_cast<std::size_t>(v)];
          for (std::size_t i = 0; i < 6; ++i) x[i] += rng.uniform(-0.1, 0.1);
          x[6] = group_lh + rng.uniform(-0.05, 0.05);
          InversionContext ctx = synth_ctx;
          ctx.scale = scale;
          FormantVector f = generate_formants(x, ctx);
          for (double& ff : f.f) ff *= 1.0 + 0.005 * rng.uniform(-1.0, 1.0);
          if (!f.valid()) continue;
          VowelFrameRecord rec;
          rec.speaker_id = id;
          rec.gender = group == 0 ? 'F' : 'M';  // group marker for aggregation
          rec.age = 40;
          rec.period = "1995-96";
          rec.vowel = vowel_names[v];
          rec.formants = f;
          rec.duration_ms = 70.0;
          rec.source = "synthetic";
          records.push_back(std::move(rec));
        }
      }
    }
  }

  InversionConfig inv;
  inv.restarts = 20;
  inv.seed = 99;
  RunOptions opt;
  opt.seed = 99;
  opt.workers = 0;
  CorpusResult result = run_corpus(records, model(), AcousticConfig{}, inv, opt);

  // speaker-level means, then the group difference and a seeded bootstrap CI
  std::map<std::string, std::pair<double, int>> by_speaker;
  for (const RecordResult& r : result.rows) {
    auto& acc = by_speaker[r.record.speaker_id];
    acc.first += r.x.larynx_height();
    acc.second += 1;
  }
  std::vector<double> group_a, group_b;
  for (const auto& [id, acc] : by_speaker) {
    const double mean = acc.first / acc.second;
    (id[1] == 'a' ? group_a : group_b).push_back(mean);
  }
  auto mean_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
  };
  const double diff = mean_of(group_a) - mean_of(group_b);

  Rng boot_rng(substream_seed(99, 0xb001));
  std::vector<double> boot_diffs(2000);
  for (double& d : boot_diffs) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < group_a.size(); ++i)
      ma += group_a[boot_rng.index(group_a.size())];
    for (std::size_t i = 0; i < group_b.size(); ++i)
      mb += group_b[boot_rng.index(group_b.size())];
    d = ma / static_cast<double>(group_a.size()) - mb / static_cast<double>(group_b.size());
  }
  std::sort(boot_diffs.begin(), boot_diffs.end());
  const double ci_lo = boot_diffs[static_cast<std::size_t>(0.025 * (boot_diffs.size() - 1))];
  const double ci_hi =
      boot_diffs[static_cast<std::size_t>(std::llround(0.975 * (boot_diffs.size() - 1)))];

  std::ostringstream os;
  os << "recovered LH difference " << fmt_double(diff) << " (truth 0.4, tol +/- 0.2), "
     << "bootstrap CI [" << fmt_double(ci_lo) << ", " << fmt_double(ci_hi)
     << "] (must exclude 0)";
  detail = os.str();
  return diff > 0.0 && std::abs(diff - kOffset) <= 0.2 && ci_lo > 0.0;
}

// ---- criterion 9: conservation and determinism ------------------------------

bool criterion_pipeline_determinism(std::string& detail) {
  // conservation over randomized mixed ingest fixtures
  Rng rng(909);
  for (int t = 0; t < 5; ++t) {
    std::string table = "speaker_id,gender,age,period,vowel,f1,f2,f3,f4,duration_ms,source\n";
    const std::size_t n = 100;
    for (std::size_t i = 0; i < n; ++i) {
      const double roll = rng.uniform01();
      if (roll < 0.25)
        table += "s,F,30,1995-96,a,700,1200,2400,3400,250,x\n";
      else if (roll < 0.35)
        table += "s,F,30,1995-96,a,1200,700,2400,3400,80,x\n";
      else if (roll < 0.4)
        table += "bad row\n";
      else
        table += "s,F,30,1995-96,a,700,1200,2400,3400,80,x\n";
    }
    std::istringstream is(table);
    IngestResult r = ingest_frames(is);
    if (r.report.rows_in != n || r.report.accepted + r.report.rejected.size() != n) {
      detail = "conservation violated on fixture " + std::to_string(t);
      return false;
    }
  }

  // two seeded runs of the same small corpus: bit-identical artifacts
  InversionContext ctx;
  ctx.model = &model();
  Rng gen(910);
  std::vector<VowelFrameRecord> records;
  for (int s = 0; s < 3; ++s) {
    ctx.scale = gen.uniform(14.0, 17.0) / model().l0_cm;
    for (int v = 0; v < 2; ++v) {
      for (int n = 0; n < 2; ++n) {
        ArticulatoryVector x{};
        for (std::size_t i = 0; i < 7; ++i) x[i] = gen.uniform(-1.5, 1.5);
        VowelFrameRecord rec;
        rec.speaker_id = "d" + std::to_string(s);
        rec.gender = s % 2 ? 'M' : 'F';
        rec.age = 25 + 20 * s;
        rec.period = std::string(kPeriods[static_cast<std::size_t>(s)]);
        rec.vowel = v ? "i" : "a";
        rec.formants = generate_formants(x, ctx);
        rec.duration_ms = 64.0;
        records.push_back(std::move(rec));
      }
    }
  }
  InversionConfig inv;
  inv.restarts = 4;
  inv.seed = 123;

  testutil::TempDir tmp;
  auto run_into = [&](const std::filesystem::path& dir) {
    RunOptions opt;
    opt.seed = 123;
    opt.workers = 2;
    opt.config_hash = 0xc0ffee;
    opt.output_dir = dir;
    run_corpus(records, model(), AcousticConfig{}, inv, opt);
    std::ifstream f(dir / "results.csv", std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string run1 = run_into(tmp.path() / "r1");
  const std::string run2 = run_into(tmp.path() / "r2");
  if (run1 != run2 || run1.empty()) {
    detail = "seeded reruns differ";
    return false;
  }
  detail = "conservation exact on 5 fixtures; two seeded runs bit-identical";
  return true;
}

// ---- criterion 10: demographic fixture --------------------------------------

bool criterion_demographics(std::string& detail) {
  // speaker counts per (age band x period x gender)
  const int counts[4][4][2] = {
      {{18, 41}, {18, 18}, {30, 29}, {31, 31}},  // 20-35
      {{21, 72}, {23, 42}, {33, 45}, {30, 53}},  // 36-50
      {{18, 51}, {27, 37}, {29, 48}, {29, 49}},  // 51-65
      {{19, 15}, {18, 25}, {29, 34}, {31, 31}},  // >65
  };
  const int band_age[4] = {28, 43, 58, 72};
  const char* bands[4] = {"20-35", "36-50", "51-65", ">65"};

  std::string table = "speaker_id,gender,age,period,vowel,f1,f2,f3,f4,duration_ms,source\n";
  int speaker_no = 0, total = 0;
  for (int b = 0; b < 4; ++b) {
    for (int p = 0; p < 4; ++p) {
      for (int g = 0; g < 2; ++g) {
        for (int i = 0; i < counts[b][p][g]; ++i) {
          table += "sp" + std::to_string(speaker_no++) + std::string(",") +
                   (g == 0 ? "F" : "M") + "," + std::to_string(band_age[b]) + "," +
                   std::string(kPeriods[static_cast<std::size_t>(p)]) +
                   ",a,700,1200,2400,3400,80,fixture\n";
          ++total;
        }
      }
    }
  }
  std::istringstream is(table);
  IngestResult r = ingest_frames(is);
  if (!r.report.rejected.empty()) {
    detail = "unexpected rejections in the demographic fixture";
    return false;
  }
  auto got = speaker_counts(r.records);
  for (int b = 0; b < 4; ++b)
    for (int p = 0; p < 4; ++p)
      for (int g = 0; g < 2; ++g) {
        DemoKey key{g == 0 ? 'F' : 'M', bands[b], std::string(kPeriods[static_cast<std::size_t>(p)])};
        if (got[key] != static_cast<std::size_t>(counts[b][p][g])) {
          detail = std::string("count mismatch at ") + key.gender + "/" + key.age_band + "/" +
                   key.period;
          return false;
        }
      }
  std::ostringstream os;
  os << "all 32 demographic cells match (" << total
     << " speakers; F/20-35/1955-56 = " << got[DemoKey{'F', "20-35", "1955-56"}] << ")";
  detail = os.str();
  return total == 1025;
}

struct Criterion {
  int id;
  const char* name;
  bool (*run)(std::string&);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "quarter-wave oracle", criterion_quarter_wave},
      {2, "vtl arithmetic and homogeneity", criterion_vtl},
      {3, "round-trip inversion", criterion_roundtrip},
      {4, "dispersion-reduction property", criterion_dispersion},
      {5, "weighted-mean oracle", criterion_weighted_mean},
      {6, "burg estimation accuracy", criterion_burg},
      {7, "ceiling search", criterion_ceiling},
      {8, "synthetic-corpus recovery", criterion_corpus_recovery},
      {9, "pipeline conservation and determinism", criterion_pipeline_determinism},
      {10, "demographic ingestion fixture", criterion_demographics},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    const double t0 = now_s();
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed = now_s() - t0;
    std::printf("[%s] criterion %2d: %s -- %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail.c_str(), elapsed);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
