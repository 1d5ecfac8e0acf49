#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "artinv/area_function.hpp"
#include "artinv/error.hpp"
#include "artinv/formant.hpp"

namespace artinv {

enum class LossModel {
  kLossless,          // ideal open end, no wall/viscous/thermal losses
  kWallAndRadiation,  // yielding walls, viscous/thermal losses, piston radiation load
};

struct AcousticConfig {
  double speed_of_sound = 34000.0;   // cm/s
  double grid_step_hz = 10.0;        // coarse resonance-scan step
  double max_frequency_hz = 8000.0;  // scan ceiling; must cover the first four formants
  LossModel losses = LossModel::kWallAndRadiation;

  void validate() const {
    if (!(speed_of_sound > 0.0)) fail(Errc::kBadConfig, "speed_of_sound must be positive");
    if (!(grid_step_hz > 0.0)) fail(Errc::kBadConfig, "frequency grid step must be positive");
    if (!(max_frequency_hz >= 1000.0))
      fail(Errc::kBadConfig, "max analysis frequency too low for four formants");
    if (!(max_frequency_hz > 40.0 * grid_step_hz))
      fail(Errc::kBadConfig, "frequency grid too coarse for the analysis band");
  }
};

namespace acoustic_detail {

// Air and tissue constants (CGS). The speed of sound comes from the config.
inline constexpr double kAirDensity = 1.14e-3;       // g/cm^3
inline constexpr double kAirViscosity = 1.86e-4;     // dyn s/cm^2
inline constexpr double kThermalConductivity = 5.5e-5;  // cal/(cm s degC)
inline constexpr double kSpecificHeat = 0.24;        // cal/(g degC)
inline constexpr double kHeatRatio = 1.4;
inline constexpr double kWallResistance = 1600.0;    // dyn s/cm^3
inline constexpr double kWallMass = 1.5;             // g/cm^2
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/* Each tube section is a lossless line plus lumped loss elements: shunt
   (wall admittance + thermal conductance) on the lips side, series viscous
   resistance on the glottis side. Loss magnitudes scale with sqrt(omega)
   for the boundary-layer terms and with the wall impedance otherwise. */
struct SectionCoef {
  double zc;        // characteristic impedance rho*c/A
  double inv_zc;
  double theta;     // line phase per Hz: 2*pi*l/c
  double visc;      // series R = visc * sqrt(omega)
  double therm;     // shunt G = therm * sqrt(omega)
  double wall;      // shunt Y = wall / Zw(omega)
};

struct TractCoef {
  std::vector<SectionCoef> sec;
  bool lossy = false;
  double rad_r = 0.0;  // piston radiation: parallel R-L at the lip opening
  double rad_l = 0.0;
};

inline TractCoef precompute(const AreaFunction& a, const AcousticConfig& cfg) {
  if (a.empty()) fail(Errc::kEmptyInput, "area function has no sections");
  const double c = cfg.speed_of_sound;
  const double rho = kAirDensity;
  TractCoef t;
  t.lossy = cfg.losses == LossModel::kWallAndRadiation;
  t.sec.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double area = a.sections[j].area_cm2;
    const double len = a.sections[j].length_cm;
    if (!(area > 0.0) || !(len > 0.0))
      fail(Errc::kBadArgument, "area function sections must have positive area and length");
    SectionCoef& s = t.sec[j];
    s.zc = rho * c / area;
    s.inv_zc = 1.0 / s.zc;
    s.theta = kTwoPi * len / c;
    const double perim = 2.0 * std::sqrt(M_PI * area);
    s.visc = (perim * len / (area * area)) * std::sqrt(rho * kAirViscosity / 2.0);
    s.therm = perim * len * (kHeatRatio - 1.0) / (rho * c * c) *
              std::sqrt(kThermalConductivity / (2.0 * kSpecificHeat * rho));
    s.wall = perim * len;
  }
  if (t.lossy) {
    const double lip_area = a.sections.back().area_cm2;
    const double lip_radius = std::sqrt(lip_area / M_PI);
    t.rad_r = (128.0 / (9.0 * M_PI * M_PI)) * rho * c / lip_area;
    t.rad_l = 8.0 * rho * lip_radius / (3.0 * M_PI * lip_area);
  }
  return t;
}

// Squared magnitude of the glottal volume velocity needed for unit lip
// output; transfer gain is its inverse square root, resonances its minima.
inline double drive_magnitude_sq(const TractCoef& t, double f) {
  const double omega = kTwoPi * f;
  double pr = 0.0, pi = 0.0, ur = 1.0, ui = 0.0;
  double sw = 0.0, ywr = 0.0, ywi = 0.0;
  if (t.lossy) {
    sw = std::sqrt(omega);
    const double e = omega * kWallMass;
    const double d = kWallResistance * kWallResistance + e * e;
    ywr = kWallResistance / d;
    ywi = -e / d;
    const double x = omega * t.rad_l / t.rad_r;
    const double den = 1.0 + x * x;
    pr = t.rad_r * x * x / den;
    pi = t.rad_r * x / den;
  }
  for (std::size_t jj = t.sec.size(); jj-- > 0;) {
    const SectionCoef& s = t.sec[jj];
    if (t.lossy) {
      const double yr = s.wall * ywr + s.therm * sw;
      const double yi = s.wall * ywi;
      ur += yr * pr - yi * pi;
      ui += yr * pi + yi * pr;
    }
    const double kl = s.theta * f;
    const double cs = std::cos(kl);
    const double sn = std::sin(kl);
    const double npr = cs * pr - s.zc * sn * ui;
    const double npi = cs * pi + s.zc * sn * ur;
    const double nur = cs * ur - s.inv_zc * sn * pi;
    const double nui = cs * ui + s.inv_zc * sn * pr;
    pr = npr;
    pi = npi;
    ur = nur;
    ui = nui;
    if (t.lossy) {
      const double r = s.visc * sw;
      pr += r * ur;
      pi += r * ui;
    }
  }
  return ur * ur + ui * ui;
}

inline double golden_min(const TractCoef& t, double lo, double hi, double xtol) {
  constexpr double kInvPhi = 0.61803398874989484820;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = drive_magnitude_sq(t, x1);
  double f2 = drive_magnitude_sq(t, x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = drive_magnitude_sq(t, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = drive_magnitude_sq(t, x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace acoustic_detail

/* Volume-velocity transfer magnitude, glottis to lips, per frequency.
   Computed by cascading the per-section chain matrices against the lip
   termination (radiation load, or ideal open end in the lossless model).
   Exactly at a lossless pole the magnitude is +inf. */
inline std::vector<double> transfer_function(const AreaFunction& a, std::span<const double> freqs,
                                             const AcousticConfig& cfg) {
  cfg.validate();
  if (freqs.empty()) return {};
  double prev = 0.0;
  for (double f : freqs) {
    if (!(f > prev)) fail(Errc::kBadArgument, "frequencies must be positive, strictly increasing");
    prev = f;
  }
  const acoustic_detail::TractCoef t = acoustic_detail::precompute(a, cfg);
  std::vector<double> out;
  out.reserve(freqs.size());
  for (double f : freqs)
    out.push_back(1.0 / std::sqrt(acoustic_detail::drive_magnitude_sq(t, f)));
  return out;
}

/* First four resonances of the tract: coarse scan on the uniform grid, then
   golden-section refinement of each bracketed peak to well under 1 Hz.
   The scan advances the per-section line phase by complex rotation instead of
   re-evaluating trig at every grid point. */
inline FormantVector resonances(const AreaFunction& a, const AcousticConfig& cfg) {
  cfg.validate();
  const acoustic_detail::TractCoef t = acoustic_detail::precompute(a, cfg);
  const double step = cfg.grid_step_hz;
  const std::size_t n_sec = t.sec.size();

  std::vector<double> cs(n_sec), sn(n_sec), cd(n_sec), sd(n_sec);
  for (std::size_t j = 0; j < n_sec; ++j) {
    cd[j] = std::cos(t.sec[j].theta * step);
    sd[j] = std::sin(t.sec[j].theta * step);
    cs[j] = cd[j];
    sn[j] = sd[j];
  }

  const std::size_t n_points =
      static_cast<std::size_t>(std::floor(cfg.max_frequency_hz / step));
  double q2 = 0.0, q1 = 0.0;  // trailing window of drive magnitudes
  std::array<double, 4> peaks{};
  std::size_t n_peaks = 0;

  for (std::size_t i = 0; i < n_points && n_peaks < 4; ++i) {
    const double f = step * static_cast<double>(i + 1);
    const double omega = acoustic_detail::kTwoPi * f;
    double sw = 0.0, ywr = 0.0, ywi = 0.0;
    double pr = 0.0, pi = 0.0, ur = 1.0, ui = 0.0;
    if (t.lossy) {
      sw = std::sqrt(omega);
      const double e = omega * acoustic_detail::kWallMass;
      const double d = acoustic_detail::kWallResistance * acoustic_detail::kWallResistance + e * e;
      ywr = acoustic_detail::kWallResistance / d;
      ywi = -e / d;
      const double x = omega * t.rad_l / t.rad_r;
      const double den = 1.0 + x * x;
      pr = t.rad_r * x * x / den;
      pi = t.rad_r * x / den;
    }
    for (std::size_t jj = n_sec; jj-- > 0;) {
      const acoustic_detail::SectionCoef& s = t.sec[jj];
      if (t.lossy) {
        const double yr = s.wall * ywr + s.therm * sw;
        const double yi = s.wall * ywi;
        ur += yr * pr - yi * pi;
        ui += yr * pi + yi * pr;
      }
      const double c = cs[jj];
      const double snj = sn[jj];
      const double npr = c * pr - s.zc * snj * ui;
      const double npi = c * pi + s.zc * snj * ur;
      const double nur = c * ur - s.inv_zc * snj * pi;
      const double nui = c * ui + s.inv_zc * snj * pr;
      pr = npr;
      pi = npi;
      ur = nur;
      ui = nui;
      if (t.lossy) {
        const double r = s.visc * sw;
        pr += r * ur;
        pi += r * ui;
      }
      const double nc = c * cd[jj] - snj * sd[jj];
      const double ns = snj * cd[jj] + c * sd[jj];
      cs[jj] = nc;
      sn[jj] = ns;
    }
    const double q = ur * ur + ui * ui;
    if (i >= 2 && q1 < q2 && q1 <= q) {
      const double f_mid = f - step;
      peaks[n_peaks++] = acoustic_detail::golden_min(t, f_mid - step, f_mid + step, 0.05);
    }
    q2 = q1;
    q1 = q;
  }

  if (n_peaks < 4)
    fail(Errc::kInsufficientResonances,
         "insufficient resonances: found " + std::to_string(n_peaks) + " below " +
             std::to_string(static_cast<long>(cfg.max_frequency_hz)) + " Hz");
  FormantVector out{{peaks[0], peaks[1], peaks[2], peaks[3]}};
  out.validate();
  return out;
}

}  // namespace artinv
