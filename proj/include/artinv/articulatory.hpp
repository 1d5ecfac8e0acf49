#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

#include "artinv/error.hpp"

namespace artinv {

/* The seven articulatory scores, expressed in standard deviations around the
   model mean. Component order is fixed and matches the basis-block order of
   the model data file:

     0 jaw              jaw opening          (+ = lower jaw, more open)
     1 td_position      tongue dorsum front/back (+ = advanced)
     2 td_height        tongue dorsum height (+ = raised)
     3 tt_position      tongue tip height    (+ = raised)
     4 lower_lip        lower lip height     (+ = raised, closing)
     5 lip_protrusion   lip protrusion       (+ = protruded, longer tract)
     6 larynx_height    larynx height        (+ = raised, shorter tract)
*/
struct ArticulatoryVector {
  static constexpr std::size_t kSize = 7;
  static constexpr double kLo = -3.0;
  static constexpr double kHi = 3.0;
  static constexpr std::array<std::string_view, kSize> kNames = {
      "jaw",       "td_position",    "td_height",    "tt_position",
      "lower_lip", "lip_protrusion", "larynx_height"};

  std::array<double, kSize> v{};

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  double jaw() const { return v[0]; }
  double td_position() const { return v[1]; }
  double td_height() const { return v[2]; }
  double tt_position() const { return v[3]; }
  double lower_lip() const { return v[4]; }
  double lip_protrusion() const { return v[5]; }
  double larynx_height() const { return v[6]; }

  bool in_bounds() const {
    for (double c : v)
      if (!(c >= kLo && c <= kHi)) return false;
    return true;
  }

  bool finite() const {
    for (double c : v)
      if (!std::isfinite(c)) return false;
    return true;
  }

  // Clamp into the model box; reports how many components were clamped so
  // callers can keep a warning counter instead of losing excursions silently.
  ArticulatoryVector clamped(std::size_t* n_clamped = nullptr) const {
    ArticulatoryVector out = *this;
    std::size_t n = 0;
    for (double& c : out.v) {
      if (c < kLo) {
        c = kLo;
        ++n;
      } else if (c > kHi) {
        c = kHi;
        ++n;
      }
    }
    if (n_clamped) *n_clamped = n;
    return out;
  }

  friend bool operator==(const ArticulatoryVector&, const ArticulatoryVector&) = default;
};

inline double distance(const ArticulatoryVector& a, const ArticulatoryVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < ArticulatoryVector::kSize; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace artinv
