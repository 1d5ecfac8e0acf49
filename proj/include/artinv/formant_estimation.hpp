#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "artinv/error.hpp"
#include "artinv/formant.hpp"
#include "artinv/lpc.hpp"
#include "artinv/resample.hpp"

namespace artinv {

// One vowel frame cut around the vowel midpoint, nominally 25 ms.
struct AudioFrame {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
  double duration_ms = 0.0;
  std::string speaker_id;
  std::string phone;

  void validate() const {
    if (samples.empty()) fail(Errc::kEmptyInput, "audio frame has no samples");
    if (!(sample_rate_hz > 0.0)) fail(Errc::kBadArgument, "audio frame sample rate must be positive");
    if (!(duration_ms >= 5.0 && duration_ms <= 100.0))
      fail(Errc::kBadArgument, "audio frame duration outside the supported 5..100 ms window");
  }
};

struct CeilingSearchConfig {
  double ceiling_min_hz = 4500.0;
  double ceiling_max_hz = 6500.0;
  double ceiling_step_hz = 50.0;
  int lpc_order = 10;
  double pre_emphasis = 0.98;
  double min_formant_hz = 50.0;    // candidates below, or above ceiling - this, are discarded
  double max_bandwidth_hz = 700.0; // wider pole pairs are spectral shaping, not formants

  void validate() const {
    if (!(ceiling_step_hz > 0.0) || !(ceiling_min_hz > 0.0) || ceiling_max_hz < ceiling_min_hz)
      fail(Errc::kBadConfig, "ceiling grid must be non-empty and increasing");
    if (lpc_order < 8) fail(Errc::kBadConfig, "LPC order too low to carry four formants");
    if (!(pre_emphasis >= 0.0 && pre_emphasis < 1.0))
      fail(Errc::kBadConfig, "pre-emphasis coefficient must lie in [0, 1)");
  }

  std::vector<double> grid() const {
    validate();
    std::vector<double> g;
    for (double c = ceiling_min_hz; c <= ceiling_max_hz + 1e-9; c += ceiling_step_hz)
      g.push_back(c);
    return g;
  }
};

/* Burg formant estimation for one frame at one analysis ceiling: resample to
   twice the ceiling, pre-emphasize, apply a Gaussian window, fit the Burg
   polynomial, and convert the stable pole pairs to (frequency, bandwidth).
   Returns the four lowest candidates in increasing order. */
inline FormantVector burg_formants(const AudioFrame& frame, double ceiling_hz,
                                   const CeilingSearchConfig& cfg) {
  cfg.validate();
  frame.validate();
  if (!(ceiling_hz > 0.0)) fail(Errc::kBadArgument, "analysis ceiling must be positive");

  const double sr = 2.0 * ceiling_hz;
  std::vector<double> x = resample(frame.samples, frame.sample_rate_hz, sr);
  const int n = static_cast<int>(x.size());
  if (n <= 3 * cfg.lpc_order)
    fail(Errc::kBadArgument, "frame too short for the LPC order at the resampled rate");

  for (int i = n - 1; i > 0; --i) x[i] -= cfg.pre_emphasis * x[i - 1];
  const double mid = 0.5 * (n - 1);
  for (int i = 0; i < n; ++i) {
    const double u = (i - mid) / mid;
    x[i] *= std::exp(-6.0 * u * u);
  }

  std::vector<double> a = burg_lpc(x, cfg.lpc_order);
  std::vector<double> freqs;
  for (const std::complex<double>& z : lpc_roots(a)) {
    if (z.imag() <= 0.0) continue;  // one of each conjugate pair
    const double mag = std::abs(z);
    if (mag >= 1.0) continue;       // unstable
    const double f = std::atan2(z.imag(), z.real()) * sr / (2.0 * M_PI);
    const double bw = -std::log(mag) * sr / M_PI;
    if (f < cfg.min_formant_hz || f > ceiling_hz - cfg.min_formant_hz) continue;
    if (bw > cfg.max_bandwidth_hz) continue;
    freqs.push_back(f);
  }
  if (freqs.size() < 4)
    fail(Errc::kInsufficientPoles, "insufficient poles: " + std::to_string(freqs.size()) +
                                       " stable formant candidates");
  std::sort(freqs.begin(), freqs.end());
  for (int i = 0; i < 3; ++i)
    if (freqs[i + 1] <= freqs[i])
      fail(Errc::kNoStableFormants, "no stable formants: degenerate candidate spacing");
  return FormantVector{{freqs[0], freqs[1], freqs[2], freqs[3]}};
}

/* Ceiling selection for one speaker-phone group: the grid ceiling that
   minimizes the summed within-group variance of log F1 and log F2. A ceiling
   is eligible only if it analyzes every frame of the group, so a candidate
   cannot win by scoring a lucky subset; ties go to the lowest ceiling. */
inline double optimize_ceiling(std::span<const AudioFrame> group,
                               const CeilingSearchConfig& cfg) {
  if (group.empty()) fail(Errc::kEmptyInput, "ceiling search over an empty group");
  double best_ceiling = 0.0;
  double best_score = std::numeric_limits<double>::infinity();
  for (double ceiling : cfg.grid()) {
    std::vector<double> l1, l2;
    bool covered = true;
    for (const AudioFrame& frame : group) {
      try {
        FormantVector f = burg_formants(frame, ceiling, cfg);
        l1.push_back(std::log(f.f1()));
        l2.push_back(std::log(f.f2()));
      } catch (const Error&) {
        covered = false;
        break;
      }
    }
    if (!covered) continue;
    auto pop_var = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double acc = 0.0;
      for (double x : v) acc += (x - mean) * (x - mean);
      return acc / static_cast<double>(v.size());
    };
    const double score = pop_var(l1) + pop_var(l2);
    if (score < best_score) {
      best_score = score;
      best_ceiling = ceiling;
    }
  }
  if (best_ceiling == 0.0)
    fail(Errc::kNoStableFormants, "no grid ceiling produced stable formants for the group");
  return best_ceiling;
}

}  // namespace artinv
