#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rydsim/model.hpp"

namespace rydsim::scenario {

using Json = nlohmann::json;

inline constexpr std::string_view kConfigSchema = "rydsim-config/1";

enum class ModelKind { kSingleAtom, kTwoAtom };

// Frequency units accepted in configs. Angular values are rad/us; "bare"
// units are cyclic-free rates (1 MHz = 1 /us). "omega1" and "v12" are
// multiples of the resolved omega1 and v12.
//   rad_per_us, per_us, MHz, kHz, MHz_over_2pi, kHz_over_2pi, omega1, v12
std::vector<std::string> unit_names();

struct ResolvedParams {
  AtomParams atom;
  RRIMatrix rri;
  Json audit;  // every parameter in rad/us alongside its source quantity
};

ResolvedParams resolve_params(const Json& params, ModelKind kind);

struct SweepAxis {
  std::vector<std::string> paths;  // dotted config paths set to the same value
  double min = 0.0;
  double max = 0.0;
  int count = 2;
  bool log_scale = false;

  std::vector<double> values() const;
  std::string label() const;
};

struct RampStage {
  double total_time = 0.0;
  double sample_dt = 0.0;
  std::vector<std::string> observables;
};

// Per-n row of the principal-quantum-number study after generators ran.
struct NScaleRow {
  int n = 0;
  double lifetime_us = 0.0;
  double asymmetry = 0.0;
  double gamma_r = 0.0;  // rad/us
  double v00 = 0.0;      // rad/us
  double t_final = 0.0;  // us
};

struct NScaleSpec {
  std::vector<NScaleRow> rows;
  double sample_dt_fraction = 0.02;  // sample_dt = fraction * t_final
};

struct ScenarioConfig {
  std::string scenario;
  ModelKind model = ModelKind::kTwoAtom;
  Json doc;  // merged document the run was resolved from
  ResolvedParams params;
  double t_final = 0.0;
  double sample_dt = 0.0;
  std::string initial_state;
  std::vector<std::string> observables;
  std::vector<SweepAxis> sweep;
  std::optional<RampStage> ramp;
  std::optional<NScaleSpec> nscale;
  std::string output;
  int workers = 0;  // 0 = hardware concurrency
  std::vector<std::string> notes;
  std::vector<std::string> warnings;
};

std::vector<std::string> scenario_names();

// Complete document for a named scenario; ConfigError for unknown names.
Json default_config(std::string_view scenario);

// Reads a JSON file. When it names a scenario, the file is merge-patched
// over that scenario's defaults.
Json load_config_file(const std::filesystem::path& path);
Json merge_with_defaults(const Json& user);

// "a.b.c=value". The value is parsed as JSON when possible, else taken as a
// string. Setting a number on a {value, unit} quantity replaces its value
// and keeps the unit.
void apply_override(Json& doc, std::string_view assignment);
void set_path(Json& doc, std::string_view dotted, const Json& value);

// Validates and resolves every field; ConfigError on invalid input.
ScenarioConfig resolve(const Json& doc);

}  // namespace rydsim::scenario
