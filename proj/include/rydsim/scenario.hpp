#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rydsim/config.hpp"
#include "rydsim/dynamics.hpp"
#include "rydsim/measures.hpp"
#include "rydsim/output.hpp"

namespace rydsim::scenario {

ModelSystem build_model(ModelKind kind, const AtomParams& atom, const RRIMatrix& rri);
ModelSystem build_model(const ScenarioConfig& cfg);

// ground_mixture | ground_entangled | target | level:<label>
// (two-atom level labels are "<atom1>_<atom2>", e.g. level:1_2).
DensityMatrix make_initial_state(const ScenarioConfig& cfg, const ModelSystem& model);

// Two-atom: fidelity, fidelity_psi, fidelity_dd1, fidelity_dd2, purity,
// negativity, log_negativity, pop_ground, pop_rydberg, pop:<a1>_<a2>.
// Single-atom: pop_dark, purity, pop:<label>.
std::vector<Observable> make_observables(const std::vector<std::string>& names, const ScenarioConfig& cfg,
                                         const ModelSystem& model);

struct RunResult {
  TimeSeries series;
  std::optional<TimeSeries> ramp;
  Json run;  // contents of run.json
  double wall_seconds = 0.0;
};

// Writes timeseries.csv, ramp_timeseries.csv (when a ramp stage is
// configured), run.json and timing.json into `out` when given.
RunResult run_scenario(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out = std::nullopt);

struct CellResult {
  std::vector<double> coordinates;  // one value per axis, in config units
  std::optional<MeasureReport> report;
  RunDiagnostics diagnostics;
  std::string error;  // empty on success
};

struct SweepGrid {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axis_values;
  std::vector<CellResult> cells;  // row-major over the axes, first axis slowest
  output::Table table;
  Json run;
  double wall_seconds = 0.0;

  std::size_t failed() const;
};

// Cell evolutions run on `cfg.workers` threads (0 = hardware concurrency) and
// land in grid order. Writes grid.csv, run.json and timing.json.
SweepGrid run_sweep(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out = std::nullopt);

// One row per principal quantum number, evaluated at the row's t_final.
SweepGrid run_nscaling(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out = std::nullopt);

// Evolves one resolved configuration to t_final and measures the final
// state against |DD>, with fidelity_psi recorded as a population entry.
CellResult evaluate_cell(const ScenarioConfig& cfg);

std::string code_version();

}  // namespace rydsim::scenario
