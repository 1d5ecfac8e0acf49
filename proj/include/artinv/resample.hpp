#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "artinv/error.hpp"

namespace artinv {

/* Band-limited rate conversion by direct windowed-sinc interpolation.
   Frames here are tens of milliseconds, so the O(N * taps) cost is nothing
   and there is no filter state to manage. Blackman window, cutoff at 90% of
   the narrower Nyquist. */
inline std::vector<double> resample(std::span<const double> x, double sr_in, double sr_out) {
  if (!(sr_in > 0.0) || !(sr_out > 0.0))
    fail(Errc::kBadArgument, "sample rates must be positive");
  if (x.empty()) return {};
  const double ratio = sr_out / sr_in;
  if (std::abs(ratio - 1.0) < 1e-12) return std::vector<double>(x.begin(), x.end());

  const double fc = 0.45 * std::min(1.0, ratio);  // cycles per input sample
  const int half = static_cast<int>(std::ceil(24.0 / (2.0 * fc)));
  const std::size_t n_out = static_cast<std::size_t>(std::floor(x.size() * ratio));
  const int n_in = static_cast<int>(x.size());

  std::vector<double> out(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double t = static_cast<double>(i) / ratio;
    const int j0 = static_cast<int>(std::floor(t)) - half + 1;
    const int j1 = static_cast<int>(std::floor(t)) + half;
    double acc = 0.0;
    for (int j = std::max(0, j0); j <= std::min(n_in - 1, j1); ++j) {
      const double u = t - j;
      double s;
      if (std::abs(u) < 1e-12) {
        s = 2.0 * fc;
      } else {
        s = std::sin(2.0 * M_PI * fc * u) / (M_PI * u);
      }
      const double w_arg = M_PI * u / half;  // Blackman over [-half, half]
      const double w = 0.42 + 0.5 * std::cos(w_arg) + 0.08 * std::cos(2.0 * w_arg);
      acc += x[static_cast<std::size_t>(j)] * s * w;
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace artinv
