#pragma once

#include <cstddef>
#include <vector>

namespace artinv {

// One tube section of the vocal tract, glottis-to-lips order.
struct TubeSection {
  double area_cm2 = 0.0;
  double length_cm = 0.0;

  friend bool operator==(const TubeSection&, const TubeSection&) = default;
};

struct AreaFunction {
  std::vector<TubeSection> sections;  // [0] at the glottis, back() at the lips

  bool empty() const { return sections.empty(); }
  std::size_t size() const { return sections.size(); }

  double total_length_cm() const {
    double t = 0.0;
    for (const TubeSection& s : sections) t += s.length_cm;
    return t;
  }

  friend bool operator==(const AreaFunction&, const AreaFunction&) = default;
};

}  // namespace artinv
