#pragma once

#include <array>
#include <cmath>
#include <string>

#include "artinv/error.hpp"

namespace artinv {

// First four formant frequencies of a vowel frame, Hz, strictly increasing.
struct FormantVector {
  std::array<double, 4> f{};

  double f1() const { return f[0]; }
  double f2() const { return f[1]; }
  double f3() const { return f[2]; }
  double f4() const { return f[3]; }

  bool valid() const {
    double prev = 0.0;
    for (double x : f) {
      if (!std::isfinite(x) || x <= prev) return false;
      prev = x;
    }
    return true;
  }

  void validate() const {
    if (!valid())
      fail(Errc::kBadArgument,
           "formant vector must be finite and strictly increasing, 0 < f1 < f2 < f3 < f4");
  }

  friend bool operator==(const FormantVector&, const FormantVector&) = default;
};

inline FormantVector make_formants(double f1, double f2, double f3, double f4) {
  FormantVector v{{f1, f2, f3, f4}};
  v.validate();
  return v;
}

}  // namespace artinv
