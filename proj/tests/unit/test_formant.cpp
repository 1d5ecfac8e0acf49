#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "artinv/formant_estimation.hpp"
#include "artinv/resample.hpp"
#include "artinv/rng.hpp"
#include "artinv/vtl.hpp"
#include "artinv/wav.hpp"
#include "synth_signals.hpp"
#include "testutil.hpp"

using namespace artinv;
using testutil::PoleSpec;

TEST_CASE("vtl estimate matches the hand-computed reference values") {
  // phi = 0.089*500 + 0.102*1500/3 + 0.121*2500/5 + 0.669*3500/7 = 490.5
  FormantVector f = make_formants(500, 1500, 2500, 3500);
  CHECK(estimate_vtl(f) == Catch::Approx(34000.0 / (4.0 * 490.5)).margin(1e-9));
  CHECK(estimate_vtl(f) == Catch::Approx(17.33).margin(0.01));

  // quarter-wave formants of a 17.5 cm tube do NOT give 17.5 back: the
  // weights are regression-derived, not the ideal-tube solution
  FormantVector q = make_formants(485.71, 1457.14, 2428.57, 3400.0);
  CHECK(estimate_vtl(q) == Catch::Approx(17.84).margin(0.01));
}

TEST_CASE("vtl estimate is exactly homogeneous of degree -1") {
  Rng rng(42);
  for (int t = 0; t < 100; ++t) {
    double f1 = rng.uniform(200, 900);
    double f2 = f1 + rng.uniform(200, 1200);
    double f3 = f2 + rng.uniform(200, 1200);
    double f4 = f3 + rng.uniform(200, 1200);
    double s = rng.uniform(0.25, 4.0);
    FormantVector f = make_formants(f1, f2, f3, f4);
    FormantVector fs = make_formants(s * f1, s * f2, s * f3, s * f4);
    CHECK(estimate_vtl(fs) * s == Catch::Approx(estimate_vtl(f)).epsilon(1e-12));
  }
  // doubling is exact in floating point
  FormantVector f = make_formants(500, 1500, 2500, 3500);
  FormantVector d = make_formants(1000, 3000, 5000, 7000);
  CHECK(estimate_vtl(d) == estimate_vtl(f) / 2.0);
}

TEST_CASE("speaker vtl is the mean of per-vowel estimates") {
  FormantVector f = make_formants(500, 1500, 2500, 3500);
  const double v = estimate_vtl(f);

  std::vector<FormantVector> one{f};
  CHECK(speaker_vtl(one) == v);

  // two records scaled to have estimates 15 and 17 exactly -> mean 16
  auto scaled_to = [&](double target) {
    double s = v / target;
    return make_formants(s * 500, s * 1500, s * 2500, s * 3500);
  };
  std::vector<FormantVector> two{scaled_to(15.0), scaled_to(17.0)};
  CHECK(speaker_vtl(two) == Catch::Approx(16.0).margin(1e-9));

  try {
    speaker_vtl({});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEmptyInput);
  }
}

TEST_CASE("speaker vtl does not depend on record order") {
  Rng rng(9);
  std::vector<FormantVector> recs;
  for (int i = 0; i < 9; ++i) {
    double f1 = rng.uniform(300, 800);
    recs.push_back(make_formants(f1, f1 + 900, f1 + 2000, f1 + 2900));
  }
  double a = speaker_vtl(recs);
  std::reverse(recs.begin(), recs.end());
  CHECK(speaker_vtl(recs) == a);
}

TEST_CASE("burg recovers a synthetic all-pole vowel") {
  const std::vector<PoleSpec> poles{{500, 60}, {1500, 90}, {2500, 120}, {3500, 150}};
  AudioFrame frame = testutil::vowel_frame(poles, 10000.0);
  CeilingSearchConfig cfg;
  FormantVector f = burg_formants(frame, 5000.0, cfg);
  CHECK(std::abs(f.f1() - 500.0) <= 30.0);
  CHECK(std::abs(f.f2() - 1500.0) <= 30.0);
  CHECK(std::abs(f.f3() - 2500.0) <= 60.0);
  CHECK(std::abs(f.f4() - 3500.0) <= 60.0);
}

TEST_CASE("burg result is unchanged by the resampling path") {
  const std::vector<PoleSpec> poles{{620, 70}, {1380, 95}, {2400, 130}, {3300, 160}};
  AudioFrame at16k = testutil::vowel_frame(poles, 16000.0);
  CeilingSearchConfig cfg;
  FormantVector f = burg_formants(at16k, 5000.0, cfg);
  CHECK(std::abs(f.f1() - 620.0) <= 30.0);
  CHECK(std::abs(f.f2() - 1380.0) <= 30.0);
  CHECK(std::abs(f.f3() - 2400.0) <= 60.0);
  CHECK(std::abs(f.f4() - 3300.0) <= 60.0);
}

TEST_CASE("burg is deterministic") {
  const std::vector<PoleSpec> poles{{500, 60}, {1500, 90}, {2500, 120}, {3500, 150}};
  AudioFrame frame = testutil::vowel_frame(poles, 16000.0);
  CeilingSearchConfig cfg;
  CHECK(burg_formants(frame, 5500.0, cfg) == burg_formants(frame, 5500.0, cfg));
}

TEST_CASE("a pure sinusoid has insufficient poles") {
  AudioFrame frame;
  frame.sample_rate_hz = 10000.0;
  frame.duration_ms = 25.0;
  for (int i = 0; i < 250; ++i)
    frame.samples.push_back(std::sin(2.0 * M_PI * 800.0 * i / 10000.0));
  CeilingSearchConfig cfg;
  try {
    burg_formants(frame, 5000.0, cfg);
    FAIL("expected insufficient poles");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInsufficientPoles);
  }
}

TEST_CASE("too-short frames are rejected") {
  AudioFrame frame;
  frame.sample_rate_hz = 10000.0;
  frame.duration_ms = 25.0;
  frame.samples.assign(20, 0.1);
  CeilingSearchConfig cfg;
  try {
    burg_formants(frame, 5000.0, cfg);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kBadArgument);
  }
}

TEST_CASE("ceiling search: single frame ties break to the lowest ceiling") {
  const std::vector<PoleSpec> poles{{500, 60}, {1500, 90}, {2500, 120}, {3500, 150}};
  std::vector<AudioFrame> group{testutil::vowel_frame(poles, 16000.0)};
  CeilingSearchConfig cfg;
  CHECK(optimize_ceiling(group, cfg) == cfg.ceiling_min_hz);
}

TEST_CASE("ceiling search gives a scaled-formant group a strictly higher ceiling") {
  CeilingSearchConfig cfg;
  std::vector<AudioFrame> base = testutil::ceiling_group(1.0, 6, 101);
  std::vector<AudioFrame> scaled = testutil::ceiling_group(1.2, 6, 202);
  double c_base = optimize_ceiling(base, cfg);
  double c_scaled = optimize_ceiling(scaled, cfg);
  CHECK(c_scaled > c_base);
  // grid membership and determinism
  CHECK(std::fmod(c_base - cfg.ceiling_min_hz, cfg.ceiling_step_hz) == Catch::Approx(0.0).margin(1e-9));
  CHECK(optimize_ceiling(base, cfg) == c_base);
}

TEST_CASE("ceiling search rejects an empty group") {
  CeilingSearchConfig cfg;
  try {
    optimize_ceiling({}, cfg);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEmptyInput);
  }
}

TEST_CASE("wav pcm16 and float32 round trips") {
  testutil::TempDir tmp;
  std::vector<double> sig;
  Rng rng(33);
  for (int i = 0; i < 400; ++i) sig.push_back(0.8 * std::sin(0.07 * i) + 0.05 * rng.normal());
  for (double& v : sig) v = std::clamp(v, -1.0, 1.0);

  auto p16 = tmp.path() / "a.wav";
  write_wav_pcm16(p16, sig, 16000);
  WavData r16 = read_wav(p16);
  REQUIRE(r16.samples.size() == sig.size());
  CHECK(r16.sample_rate_hz == 16000.0);
  for (std::size_t i = 0; i < sig.size(); ++i)
    CHECK(std::abs(r16.samples[i] - sig[i]) <= 1.0 / 32768.0 + 1e-9);

  auto pf = tmp.path() / "b.wav";
  write_wav_float32(pf, sig, 22050);
  WavData rf = read_wav(pf);
  REQUIRE(rf.samples.size() == sig.size());
  CHECK(rf.sample_rate_hz == 22050.0);
  for (std::size_t i = 0; i < sig.size(); ++i)
    CHECK(std::abs(rf.samples[i] - sig[i]) <= 1e-7);
}

TEST_CASE("truncated wav is malformed") {
  testutil::TempDir tmp;
  std::vector<double> sig(100, 0.1);
  auto p = tmp.path() / "t.wav";
  write_wav_pcm16(p, sig, 16000);
  // cut the file in half
  std::vector<char> bytes;
  {
    std::ifstream is(p, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  }
  {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  try {
    read_wav(p);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kMalformedFile);
  }
}

TEST_CASE("resampling preserves an in-band sinusoid") {
  std::vector<double> x;
  const double sr_in = 16000.0, sr_out = 10000.0, f = 440.0;
  for (int i = 0; i < 800; ++i) x.push_back(std::sin(2.0 * M_PI * f * i / sr_in));
  std::vector<double> y = resample(x, sr_in, sr_out);
  REQUIRE(y.size() == static_cast<std::size_t>(800.0 * sr_out / sr_in));
  // compare the interior against the analytic sine at the new rate
  for (std::size_t i = 60; i + 60 < y.size(); ++i) {
    double expected = std::sin(2.0 * M_PI * f * static_cast<double>(i) / sr_out);
    CHECK(std::abs(y[i] - expected) < 0.02);
  }
}
