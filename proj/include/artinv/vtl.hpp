#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "artinv/error.hpp"
#include "artinv/formant.hpp"

namespace artinv {

/* Vocal tract length from the first four formants: a weighted combination of
   the formants against the odd quarter-wave mode numbers gives an effective
   resonance phi, and the tract length follows as c / (4 phi). The weights
   are regression-derived, so the estimate is not the geometric length of an
   ideal tube. */
inline double estimate_vtl(const FormantVector& f, double speed_of_sound = 34000.0) {
  f.validate();
  if (!(speed_of_sound > 0.0)) fail(Errc::kBadArgument, "speed of sound must be positive");
  const double phi = 0.089 * f.f1() + 0.102 * f.f2() / 3.0 + 0.121 * f.f3() / 5.0 +
                     0.669 * f.f4() / 7.0;
  return speed_of_sound / (4.0 * phi);
}

// Speaker-level estimate: mean over per-vowel estimates. Values are sorted
// before accumulation so that the result does not depend on record order.
inline double speaker_vtl(std::span<const FormantVector> records,
                          double speed_of_sound = 34000.0) {
  if (records.empty()) fail(Errc::kEmptyInput, "speaker has no formant records");
  std::vector<double> vtls;
  vtls.reserve(records.size());
  for (const FormantVector& f : records) vtls.push_back(estimate_vtl(f, speed_of_sound));
  std::sort(vtls.begin(), vtls.end());
  double acc = 0.0;
  for (double v : vtls) acc += v;
  return acc / static_cast<double>(vtls.size());
}

}  // namespace artinv
