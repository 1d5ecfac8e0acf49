#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "artinv/acoustics.hpp"
#include "artinv/error.hpp"
#include "artinv/formant_estimation.hpp"
#include "artinv/hash.hpp"
#include "artinv/inversion.hpp"
#include "artinv/maeda_model.hpp"
#include "artinv/numfmt.hpp"
#include "artinv/pipeline.hpp"

namespace artinv {

/* Run configuration, read from a plain key = value file. '#' starts a
   comment, unknown keys are rejected by name, and defaults fill everything
   except the three paths. The hash of the effective configuration is stamped
   into every output header. */
struct RunConfig {
  std::filesystem::path model_data;
  std::filesystem::path input_table;
  std::filesystem::path output_dir;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  InversionConfig inversion{};
  AcousticConfig acoustics{};
  CeilingSearchConfig ceiling{};
  BootstrapConfig bootstrap{};
  double area_floor_cm2 = kDefaultAreaFloorCm2;
  std::uint64_t config_hash = 0;
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] inline void bad_value(const std::string& key, const std::string& value,
                                   const char* expected) {
  fail(Errc::kBadConfig, "key '" + key + "': cannot parse '" + value + "' as " + expected);
}

inline double as_double(const std::string& key, const std::string& value) {
  double x = 0.0;
  if (!try_parse_double(value, x)) bad_value(key, value, "a number");
  return x;
}

inline std::int64_t as_int(const std::string& key, const std::string& value) {
  std::int64_t x = 0;
  if (!try_parse_i64(value, x)) bad_value(key, value, "an integer");
  return x;
}

inline std::uint64_t as_u64(const std::string& key, const std::string& value) {
  std::uint64_t x = 0;
  if (!try_parse_u64(value, x)) bad_value(key, value, "an unsigned integer");
  return x;
}

}  // namespace config_detail

// Canonical key = value rendering of the effective configuration; its FNV
// hash identifies the run in every output header.
inline std::string canonical_config_text(const RunConfig& c) {
  std::ostringstream os;
  os << "area_floor_cm2=" << fmt_double(c.area_floor_cm2) << '\n';
  os << "bootstrap_resamples=" << c.bootstrap.resamples << '\n';
  os << "bootstrap_seed=" << c.bootstrap.seed << '\n';
  os << "bound_penalty_weight=" << fmt_double(c.inversion.bound_penalty_weight) << '\n';
  os << "ceiling_max_hz=" << fmt_double(c.ceiling.ceiling_max_hz) << '\n';
  os << "ceiling_min_hz=" << fmt_double(c.ceiling.ceiling_min_hz) << '\n';
  os << "ceiling_step_hz=" << fmt_double(c.ceiling.ceiling_step_hz) << '\n';
  os << "frequency_step_hz=" << fmt_double(c.acoustics.grid_step_hz) << '\n';
  os << "input_table=" << c.input_table.string() << '\n';
  os << "losses="
     << (c.acoustics.losses == LossModel::kLossless ? "lossless" : "wall_radiation") << '\n';
  os << "lpc_order=" << c.ceiling.lpc_order << '\n';
  os << "max_frequency_hz=" << fmt_double(c.acoustics.max_frequency_hz) << '\n';
  os << "model_data=" << c.model_data.string() << '\n';
  os << "nm_contraction=" << fmt_double(c.inversion.nm.contraction) << '\n';
  os << "nm_cost_tolerance=" << fmt_double(c.inversion.nm.cost_spread_tol) << '\n';
  os << "nm_expansion=" << fmt_double(c.inversion.nm.expansion) << '\n';
  os << "nm_initial_edge=" << fmt_double(c.inversion.nm.initial_edge) << '\n';
  os << "nm_max_iterations=" << c.inversion.nm.max_iterations << '\n';
  os << "nm_reflection=" << fmt_double(c.inversion.nm.reflection) << '\n';
  os << "nm_shrink=" << fmt_double(c.inversion.nm.shrink) << '\n';
  os << "nm_simplex_tolerance=" << fmt_double(c.inversion.nm.simplex_spread_tol) << '\n';
  os << "output_dir=" << c.output_dir.string() << '\n';
  os << "pre_emphasis=" << fmt_double(c.ceiling.pre_emphasis) << '\n';
  os << "residual_floor_hz=" << fmt_double(c.inversion.residual_floor_hz) << '\n';
  os << "restarts=" << c.inversion.restarts << '\n';
  os << "seed=" << c.seed << '\n';
  os << "speed_of_sound=" << fmt_double(c.acoustics.speed_of_sound) << '\n';
  os << "workers=" << c.workers << '\n';
  return os.str();
}

inline RunConfig load_config(std::istream& is, const std::string& origin = "<config>") {
  RunConfig c;
  bool bootstrap_seed_given = false;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, bool> seen;

  while (std::getline(is, line)) {
    ++line_no;
    const std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.resize(hash_pos);
    const std::string stripped = config_detail::trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      fail(Errc::kBadConfig, origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = config_detail::trim(stripped.substr(0, eq));
    const std::string value = config_detail::trim(stripped.substr(eq + 1));
    if (key.empty()) fail(Errc::kBadConfig, origin + ":" + std::to_string(line_no) + ": empty key");
    if (seen[key])
      fail(Errc::kBadConfig, "duplicate configuration key '" + key + "'");
    seen[key] = true;

    using namespace config_detail;
    if (key == "model_data") c.model_data = value;
    else if (key == "input_table") c.input_table = value;
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "seed") c.seed = as_u64(key, value);
    else if (key == "workers") c.workers = static_cast<int>(as_int(key, value));
    else if (key == "restarts") c.inversion.restarts = static_cast<int>(as_int(key, value));
    else if (key == "nm_max_iterations")
      c.inversion.nm.max_iterations = static_cast<int>(as_int(key, value));
    else if (key == "nm_cost_tolerance") c.inversion.nm.cost_spread_tol = as_double(key, value);
    else if (key == "nm_simplex_tolerance")
      c.inversion.nm.simplex_spread_tol = as_double(key, value);
    else if (key == "nm_initial_edge") c.inversion.nm.initial_edge = as_double(key, value);
    else if (key == "nm_reflection") c.inversion.nm.reflection = as_double(key, value);
    else if (key == "nm_expansion") c.inversion.nm.expansion = as_double(key, value);
    else if (key == "nm_contraction") c.inversion.nm.contraction = as_double(key, value);
    else if (key == "nm_shrink") c.inversion.nm.shrink = as_double(key, value);
    else if (key == "residual_floor_hz") c.inversion.residual_floor_hz = as_double(key, value);
    else if (key == "bound_penalty_weight")
      c.inversion.bound_penalty_weight = as_double(key, value);
    else if (key == "area_floor_cm2") c.area_floor_cm2 = as_double(key, value);
    else if (key == "speed_of_sound") c.acoustics.speed_of_sound = as_double(key, value);
    else if (key == "frequency_step_hz") c.acoustics.grid_step_hz = as_double(key, value);
    else if (key == "max_frequency_hz") c.acoustics.max_frequency_hz = as_double(key, value);
    else if (key == "losses") {
      if (value == "lossless") c.acoustics.losses = LossModel::kLossless;
      else if (value == "wall_radiation") c.acoustics.losses = LossModel::kWallAndRadiation;
      else bad_value(key, value, "'lossless' or 'wall_radiation'");
    } else if (key == "ceiling_min_hz") c.ceiling.ceiling_min_hz = as_double(key, value);
    else if (key == "ceiling_max_hz") c.ceiling.ceiling_max_hz = as_double(key, value);
    else if (key == "ceiling_step_hz") c.ceiling.ceiling_step_hz = as_double(key, value);
    else if (key == "lpc_order") c.ceiling.lpc_order = static_cast<int>(as_int(key, value));
    else if (key == "pre_emphasis") c.ceiling.pre_emphasis = as_double(key, value);
    else if (key == "bootstrap_resamples")
      c.bootstrap.resamples = static_cast<int>(as_int(key, value));
    else if (key == "bootstrap_seed") {
      c.bootstrap.seed = as_u64(key, value);
      bootstrap_seed_given = true;
    } else {
      fail(Errc::kBadConfig, "unknown configuration key '" + key + "'");
    }
  }

  if (c.model_data.empty())
    fail(Errc::kBadConfig, "missing required key 'model_data'");
  if (c.input_table.empty())
    fail(Errc::kBadConfig, "missing required key 'input_table'");
  if (c.output_dir.empty())
    fail(Errc::kBadConfig, "missing required key 'output_dir'");
  if (c.workers < 0) fail(Errc::kBadConfig, "workers must be >= 0");
  if (!(c.area_floor_cm2 > 0.0)) fail(Errc::kBadConfig, "area floor must be positive");
  if (!bootstrap_seed_given) c.bootstrap.seed = c.seed;
  c.inversion.seed = c.seed;
  c.inversion.validate();
  c.acoustics.validate();
  c.ceiling.validate();
  c.bootstrap.validate();

  c.config_hash = fnv1a64(canonical_config_text(c));
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Errc::kIoFailure, "cannot open configuration file: " + path.string());
  return load_config(is, path.string());
}

// Path validation happens when a command is about to run, not at parse time.
inline void validate_config_paths(const RunConfig& c, bool need_input = true) {
  if (!std::filesystem::exists(c.model_data))
    fail(Errc::kBadConfig, "model_data path does not exist: " + c.model_data.string());
  if (need_input && !std::filesystem::exists(c.input_table))
    fail(Errc::kBadConfig, "input_table path does not exist: " + c.input_table.string());
}

}  // namespace artinv
