#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "artinv/acoustics.hpp"
#include "artinv/articulatory.hpp"
#include "artinv/error.hpp"
#include "artinv/formant.hpp"
#include "artinv/hash.hpp"
#include "artinv/maeda_model.hpp"
#include "artinv/nelder_mead.hpp"
#include "artinv/records.hpp"
#include "artinv/rng.hpp"

namespace artinv {

struct InversionConfig {
  int restarts = 20;               // random-start optimizations per realization
  NelderMeadConfig nm{};
  std::uint64_t seed = 1;
  double residual_floor_hz = 1e-6;     // epsilon floor in the pooling weights
  double bound_penalty_weight = 1e6;   // Hz^2 per squared unit of box excess
  double failure_cost = 1e12;          // Hz^2 sentinel when the acoustics degenerate

  void validate() const {
    if (restarts < 1) fail(Errc::kBadConfig, "restarts must be >= 1");
    if (!(residual_floor_hz > 0.0)) fail(Errc::kBadConfig, "residual floor must be positive");
    if (!(bound_penalty_weight >= 0.0)) fail(Errc::kBadConfig, "penalty weight must be >= 0");
    if (!(failure_cost > 0.0)) fail(Errc::kBadConfig, "failure cost must be positive");
    nm.validate();
  }
};

// Everything the cost function needs: the model tables, the acoustic
// settings, and the speaker-fitted size factor.
struct InversionContext {
  const ModelData* model = nullptr;
  AcousticConfig acoustics{};
  double scale = 1.0;
  double area_floor_cm2 = kDefaultAreaFloorCm2;
};

// Forward model: articulatory scores to the first four formants.
inline FormantVector generate_formants(const ArticulatoryVector& x, const InversionContext& ctx) {
  return resonances(shape_from_params(x, *ctx.model, ctx.scale, ctx.area_floor_cm2),
                    ctx.acoustics);
}

/* Squared formant mismatch in Hz^2 plus a quadratic penalty for leaving the
   parameter box. The model itself only accepts in-box vectors, so the
   candidate is clamped before synthesis and the excess is charged to the
   penalty term. A degenerate tract (too few resonances) costs a large finite
   sentinel so the simplex can back out of it. */
inline double formant_cost(const ArticulatoryVector& x, const FormantVector& f_obs,
                           const InversionContext& ctx, const InversionConfig& cfg,
                           bool* acoustic_failed = nullptr) {
  if (acoustic_failed) *acoustic_failed = false;
  double penalty = 0.0;
  for (double c : x.v) {
    const double excess =
        c > ArticulatoryVector::kHi ? c - ArticulatoryVector::kHi
                                    : (c < ArticulatoryVector::kLo ? ArticulatoryVector::kLo - c
                                                                   : 0.0);
    penalty += excess * excess;
  }
  penalty *= cfg.bound_penalty_weight;

  ArticulatoryVector inside = x.clamped();
  try {
    const FormantVector f_gen = generate_formants(inside, ctx);
    double cost = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double d = f_obs.f[i] - f_gen.f[i];
      cost += d * d;
    }
    return cost + penalty;
  } catch (const Error& e) {
    if (e.code() != Errc::kInsufficientResonances) throw;
    if (acoustic_failed) *acoustic_failed = true;
    return cfg.failure_cost + penalty;
  }
}

struct InversionSolution {
  ArticulatoryVector x;     // in-box
  double residual_hz = 0.0; // ||f_obs - f_gen(x)||, without penalty terms
  bool converged = false;
  int iterations = 0;
};

/* Pooled weighted mean of solution vectors. Raw -log weights go negative as
   soon as a residual reaches 1 Hz, so the weights are anchored to the pool
   maximum R: w_i = ln(R * e / max(r_i, eps)) >= 1, which keeps every weight
   strictly positive while preserving the lower-residual-wins ordering. */
inline ArticulatoryVector weighted_mean_solution(std::span<const InversionSolution> pool,
                                                 const InversionConfig& cfg) {
  if (pool.empty()) fail(Errc::kEmptyInput, "weighted mean of an empty solution pool");
  const double eps = cfg.residual_floor_hz;
  double r_max = eps;
  for (const InversionSolution& s : pool) r_max = std::max(r_max, std::max(s.residual_hz, eps));

  double w_sum = 0.0;
  std::array<double, ArticulatoryVector::kSize> acc{};
  for (const InversionSolution& s : pool) {
    const double r = std::max(s.residual_hz, eps);
    const double w = std::log(r_max * M_E / r);
    w_sum += w;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * s.x[i];
  }
  ArticulatoryVector mean{};
  for (std::size_t i = 0; i < acc.size(); ++i) mean[i] = acc[i] / w_sum;
  return mean;
}

struct VowelInversionResult {
  std::vector<InversionSolution> selected;  // one per realization, from its own restart set
  ArticulatoryVector pooled_mean{};         // the weighted mean over all restarts
  double pool_dispersion = 0.0;             // trace of the pool covariance
  std::vector<InversionSolution> pool;      // all solutions, realization-major, restart-minor
  std::size_t restarts = 0;                 // pool stride
};

namespace inversion_detail {

inline InversionSolution solve_one(const FormantVector& f_obs, const InversionContext& ctx,
                                   const InversionConfig& cfg, std::uint64_t stream) {
  Rng rng(stream);
  std::array<double, ArticulatoryVector::kSize> x0{};
  for (double& c : x0)
    c = rng.uniform(ArticulatoryVector::kLo, ArticulatoryVector::kHi);

  auto cost = [&](std::span<const double> p) {
    ArticulatoryVector x{};
    std::copy(p.begin(), p.end(), x.v.begin());
    return formant_cost(x, f_obs, ctx, cfg);
  };
  NelderMeadResult nm = nelder_mead(cost, std::span<const double>(x0), cfg.nm);

  InversionSolution sol;
  std::copy(nm.x.begin(), nm.x.end(), sol.x.v.begin());
  sol.x = sol.x.clamped();
  sol.converged = nm.converged;
  sol.iterations = nm.iterations;
  try {
    const FormantVector f_gen = generate_formants(sol.x, ctx);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double d = f_obs.f[i] - f_gen.f[i];
      acc += d * d;
    }
    sol.residual_hz = std::sqrt(acc);
  } catch (const Error&) {
    sol.residual_hz = std::sqrt(cfg.failure_cost);
    sol.converged = false;
  }
  return sol;
}

}  // namespace inversion_detail

/* Inversion of all realizations of one vowel for one speaker. Each
   realization gets `restarts` random-start optimizations (seeded substream
   per realization and restart index); the pooled weighted mean is computed
   over all of them, and each realization keeps the member of its own restart
   set closest to that mean in articulatory space. */
inline VowelInversionResult invert_vowel_set(std::span<const FormantVector> f_obs_list,
                                             const InversionContext& ctx,
                                             const InversionConfig& cfg,
                                             std::uint64_t vowel_stream = 0) {
  cfg.validate();
  ctx.acoustics.validate();
  if (!ctx.model) fail(Errc::kBadArgument, "inversion context has no model data");
  if (f_obs_list.empty()) fail(Errc::kEmptyInput, "no realizations to invert");

  VowelInversionResult out;
  out.restarts = static_cast<std::size_t>(cfg.restarts);
  out.pool.reserve(f_obs_list.size() * out.restarts);
  for (std::size_t n = 0; n < f_obs_list.size(); ++n) {
    f_obs_list[n].validate();
    for (int k = 0; k < cfg.restarts; ++k) {
      const std::uint64_t stream =
          substream_seed(cfg.seed ^ vowel_stream, n, static_cast<std::uint64_t>(k));
      out.pool.push_back(inversion_detail::solve_one(f_obs_list[n], ctx, cfg, stream));
    }
  }

  out.pooled_mean = weighted_mean_solution(out.pool, cfg);

  std::array<double, ArticulatoryVector::kSize> mean{}, sq{};
  for (const InversionSolution& s : out.pool)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s.x[i];
  for (double& m : mean) m /= static_cast<double>(out.pool.size());
  for (const InversionSolution& s : out.pool)
    for (std::size_t i = 0; i < sq.size(); ++i) {
      const double d = s.x[i] - mean[i];
      sq[i] += d * d;
    }
  for (double v : sq) out.pool_dispersion += v / static_cast<double>(out.pool.size());

  out.selected.reserve(f_obs_list.size());
  for (std::size_t n = 0; n < f_obs_list.size(); ++n) {
    const std::size_t base = n * out.restarts;
    std::size_t best = base;
    double best_d = distance(out.pool[base].x, out.pooled_mean);
    for (std::size_t k = 1; k < out.restarts; ++k) {
      const double d = distance(out.pool[base + k].x, out.pooled_mean);
      if (d < best_d) {
        best_d = d;
        best = base + k;
      }
    }
    out.selected.push_back(out.pool[best]);
  }
  return out;
}

struct SpeakerRecordResult {
  std::size_t record_index = 0;  // index into the speaker's record list
  InversionSolution solution;
};

struct SpeakerInversionResult {
  SpeakerProfile profile;
  double scale = 0.0;
  std::vector<SpeakerRecordResult> records;           // only records that inverted
  std::vector<std::pair<std::size_t, std::string>> skipped;  // (record index, reason)
  double mean_larynx_height = 0.0;
  double mean_lip_protrusion = 0.0;
};

/* Whole-speaker inversion: fit the size factor to the speaker's estimated
   tract length, group records by vowel label, and run the per-vowel multi-
   start inversion. Records with invalid formants are skipped and reported,
   which just shrinks that vowel's pool. */
inline SpeakerInversionResult invert_speaker(const SpeakerProfile& profile,
                                             std::span<const VowelFrameRecord> records,
                                             const ModelData& model,
                                             const AcousticConfig& acoustics,
                                             const InversionConfig& cfg) {
  cfg.validate();
  if (records.empty()) fail(Errc::kEmptyInput, "speaker has no records");
  if (!(profile.vtl_cm > 0.0)) fail(Errc::kBadArgument, "speaker profile has no tract length");

  SpeakerInversionResult out;
  out.profile = profile;
  out.scale = fit_scale_factor(profile.vtl_cm, model);

  InversionContext ctx;
  ctx.model = &model;
  ctx.acoustics = acoustics;
  ctx.scale = out.scale;

  std::map<std::string, std::vector<std::size_t>> by_vowel;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].formants.valid()) {
      out.skipped.push_back({i, "invalid formants"});
      continue;
    }
    by_vowel[records[i].vowel].push_back(i);
  }

  for (const auto& [vowel, idx] : by_vowel) {
    std::vector<FormantVector> f_obs;
    f_obs.reserve(idx.size());
    for (std::size_t i : idx) f_obs.push_back(records[i].formants);
    const std::uint64_t vowel_stream =
        fnv1a64(vowel, fnv1a64(profile.speaker_id));
    VowelInversionResult r = invert_vowel_set(f_obs, ctx, cfg, vowel_stream);
    for (std::size_t j = 0; j < idx.size(); ++j)
      out.records.push_back({idx[j], r.selected[j]});
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const SpeakerRecordResult& a, const SpeakerRecordResult& b) {
              return a.record_index < b.record_index;
            });

  if (!out.records.empty()) {
    double lh = 0.0, lp = 0.0;
    for (const SpeakerRecordResult& r : out.records) {
      lh += r.solution.x.larynx_height();
      lp += r.solution.x.lip_protrusion();
    }
    out.mean_larynx_height = lh / static_cast<double>(out.records.size());
    out.mean_lip_protrusion = lp / static_cast<double>(out.records.size());
  }
  return out;
}

}  // namespace artinv
