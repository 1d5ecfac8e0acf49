#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "artinv/area_function.hpp"
#include "artinv/articulatory.hpp"
#include "artinv/error.hpp"
#include "artinv/model_data.hpp"
#include "artinv/numfmt.hpp"

namespace artinv {

inline constexpr double kDefaultAreaFloorCm2 = 0.05;  // keeps the tract acoustically open
inline constexpr double kWidthFloorCm = 0.01;         // sagittal contact floor, pre power law
inline constexpr double kLengthFloorCm = 0.01;

/* Midsagittal tract outline produced by the linear articulatory model:
   mean shape plus the parameter-weighted deformation fields. Widths are the
   raw linear combination and may reach zero or below at full contact; the
   clamping happens in the sagittal-to-area conversion, not here. */
struct SagittalShape {
  std::vector<double> width;   // cm, glottis to lips
  std::vector<double> length;  // cm
};

inline SagittalShape sagittal_shape(const ArticulatoryVector& x, const ModelData& m) {
  if (!x.finite()) fail(Errc::kBadArgument, "articulatory vector must be finite");
  if (!x.in_bounds())
    fail(Errc::kOutOfBounds, "articulatory vector outside [-3, 3]; clamp before calling");
  const std::size_t g = m.grid_size;
  SagittalShape s;
  s.width = m.mean_width;
  s.length = m.mean_length;
  for (std::size_t p = 0; p < ArticulatoryVector::kSize; ++p) {
    const double c = x[p];
    if (c == 0.0) continue;
    const BasisField& f = m.basis[p];
    for (std::size_t j = 0; j < g; ++j) {
      s.width[j] += c * f.width_delta[j];
      s.length[j] += c * f.length_delta[j];
    }
  }
  return s;
}

/* Sagittal widths to areas via the per-station power law, then all linear
   dimensions scaled by the speaker size factor (lengths by `scale`, areas by
   `scale` squared). Areas are floored at `area_floor_cm2` after scaling. */
inline AreaFunction shape_from_params(const ArticulatoryVector& x, const ModelData& m,
                                      double scale,
                                      double area_floor_cm2 = kDefaultAreaFloorCm2) {
  if (!(scale > 0.0)) fail(Errc::kBadArgument, "scale factor must be positive");
  SagittalShape s = sagittal_shape(x, m);
  AreaFunction a;
  a.sections.resize(m.grid_size);
  const double s2 = scale * scale;
  for (std::size_t j = 0; j < m.grid_size; ++j) {
    const double w = std::max(s.width[j], kWidthFloorCm);
    const double area = s2 * m.alpha[j] * std::pow(w, m.beta[j]);
    a.sections[j].area_cm2 = std::max(area, area_floor_cm2);
    a.sections[j].length_cm = scale * std::max(s.length[j], kLengthFloorCm);
  }
  return a;
}

// Total tract length of the neutral (all-zero) configuration: exactly
// scale * l0_cm, since the mean section lengths sum to l0_cm.
inline double neutral_vtl(const ModelData& m, double scale) {
  if (!(scale > 0.0)) fail(Errc::kBadArgument, "scale factor must be positive");
  return scale * m.l0_cm;
}

// Size-correction factor that puts the neutral configuration at the target
// tract length. Neutral length is linear in the factor, so the solution is
// closed-form; the post-condition is still checked against neutral_vtl.
inline double fit_scale_factor(double target_vtl_cm, const ModelData& m) {
  if (!(target_vtl_cm > 0.0))
    fail(Errc::kBadArgument, "target vocal tract length must be positive, got " +
                                 fmt_double(target_vtl_cm));
  const double scale = target_vtl_cm / m.l0_cm;
  if (std::abs(neutral_vtl(m, scale) - target_vtl_cm) > 1e-6)
    fail(Errc::kBadArgument, "scale fit did not reproduce the target length");
  return scale;
}

}  // namespace artinv
