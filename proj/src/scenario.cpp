#include "rydsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "rydsim/errors.hpp"

#ifndef RYDSIM_VERSION
#define RYDSIM_VERSION "0.0.0"
#endif

namespace rydsim::scenario {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_two_atom(const ScenarioConfig& cfg) { return cfg.model == ModelKind::kTwoAtom; }

// "a_b" -> joint index of levels a (atom 1) and b (atom 2).
int two_atom_level(const ModelSystem& model, const std::string& label) {
  const auto cut = label.find('_');
  if (cut == std::string::npos) throw ConfigError("two-atom level '" + label + "' must have the form <atom1>_<atom2>");
  const int a = model.level_index(0, label.substr(0, cut));
  const int b = model.level_index(1, label.substr(cut + 1));
  return two_atom::joint(a, b);
}

int level_of(const ScenarioConfig& cfg, const ModelSystem& model, const std::string& label) {
  return is_two_atom(cfg) ? two_atom_level(model, label) : model.level_index(0, label);
}

double diagonal_sum(const DensityMatrix& rho, const std::vector<int>& indices) {
  double s = 0.0;
  for (int i : indices) s += rho.matrix()(i, i).real();
  return s;
}

std::vector<int> ground_indices() {
  std::vector<int> out;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) out.push_back(two_atom::joint(a, b));
  }
  return out;
}

std::vector<int> rydberg_indices() {
  std::vector<int> out;
  for (int a = 0; a < two_atom::kLocalDim; ++a) {
    for (int b = 0; b < two_atom::kLocalDim; ++b) {
      const bool r1 = a == two_atom::kRydberg0 || a == two_atom::kRydbergX;
      const bool r2 = b == two_atom::kRydberg0 || b == two_atom::kRydbergX;
      if (r1 || r2) out.push_back(two_atom::joint(a, b));
    }
  }
  return out;
}

StateVector main_target(const ScenarioConfig& cfg) {
  const auto& a = cfg.params.atom;
  return is_two_atom(cfg) ? target_state(a.omega1, a.omega2) : single_atom_dark_state(a.omega1, a.omega2);
}

Json diagnostics_json(const RunDiagnostics& d) {
  return Json{{"max_trace_drift", d.max_trace_drift},
              {"max_hermiticity_defect", d.max_hermiticity_defect},
              {"hermitization_corrections", d.hermitization_corrections},
              {"min_eigenvalue", std::isfinite(d.min_eigenvalue) ? Json(d.min_eigenvalue) : Json(nullptr)},
              {"max_purity", d.max_purity},
              {"propagation_steps", d.propagation_steps},
              {"subintervals_per_sample", d.subintervals_per_sample},
              {"convergence_change", d.convergence_change}};
}

Json final_values(const TimeSeries& s) {
  Json j = Json::object();
  for (std::size_t k = 0; k < s.names.size(); ++k) j[s.names[k]] = s.columns[k].empty() ? kNaN : s.columns[k].back();
  return j;
}

// Largest drop between successive samples within the last 20% of the run.
Json tail_monotonicity(const TimeSeries& s, double t_final) {
  Json j = Json::object();
  const double start = 0.8 * t_final;
  for (std::size_t k = 0; k < s.names.size(); ++k) {
    double worst = 0.0;
    for (std::size_t i = 1; i < s.times.size(); ++i) {
      if (s.times[i - 1] < start - 1e-9) continue;
      worst = std::max(worst, s.columns[k][i - 1] - s.columns[k][i]);
    }
    j[s.names[k]] = worst;
  }
  return j;
}

Json run_header(const ScenarioConfig& cfg, std::string_view kind) {
  return Json{{"schema_version", output::kRunSchema},
              {"kind", kind},
              {"code_version", code_version()},
              {"scenario", cfg.scenario},
              {"config", cfg.doc},
              {"resolved_rad_per_us", cfg.params.audit},
              {"notes", cfg.notes},
              {"warnings", cfg.warnings}};
}

void write_timing(const std::filesystem::path& dir, double wall_seconds, Json extra = Json::object()) {
  extra["wall_seconds"] = wall_seconds;
  output::write_text(dir / "timing.json", extra.dump(2) + "\n");
}

ScenarioConfig with_overrides(const ScenarioConfig& base, const std::vector<std::pair<std::string, double>>& sets) {
  Json doc = base.doc;
  doc.erase("sweep");
  doc.erase("ramp");
  doc.erase("nscale");
  for (const auto& [path, value] : sets) set_path(doc, path, value);
  return resolve(doc);
}

std::string axis_unit(const Json& doc, const std::string& path) {
  const Json* node = &doc;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const auto next = path.find('.', pos);
    const std::string key = path.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (!node->is_object() || !node->contains(key)) return "";
    node = &node->at(key);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (node->is_object() && node->contains("unit")) return node->at("unit").get<std::string>();
  return path == "t_final" ? "us" : "";
}

std::vector<std::string> measure_columns() {
  return {"fidelity", "purity", "negativity", "log_negativity", "fidelity_psi", "max_trace_drift", "min_eigenvalue"};
}

void append_measures(std::vector<output::Cell>& row, const CellResult& cell) {
  if (cell.report) {
    const auto& r = *cell.report;
    row.insert(row.end(), {r.fidelity, r.purity, r.negativity, r.log_negativity, r.populations.at("fidelity_psi"),
                           cell.diagnostics.max_trace_drift, cell.diagnostics.min_eigenvalue});
    row.emplace_back(std::string("ok"));
  } else {
    for (std::size_t k = 0; k < measure_columns().size(); ++k) row.emplace_back(kNaN);
    row.emplace_back(std::string("error"));
  }
  row.emplace_back(cell.error);
}

Json grid_summary(const SweepGrid& g) {
  Json s{{"cells", g.cells.size()}, {"failed", g.failed()}};
  const CellResult* best = nullptr;
  for (const auto& c : g.cells) {
    if (c.report && (!best || c.report->fidelity > best->report->fidelity)) best = &c;
  }
  if (best) {
    s["best"] = Json{{"coordinates", best->coordinates},
                     {"fidelity", best->report->fidelity},
                     {"purity", best->report->purity}};
  }
  return s;
}

unsigned worker_count(const ScenarioConfig& cfg, std::size_t jobs) {
  unsigned n = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers) : std::thread::hardware_concurrency();
  n = std::max(1u, n);
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, n) on a pool; every job writes only its own slot.
template <class Job>
void parallel_for(std::size_t n, unsigned workers, Job job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) job(i);
  };
  if (workers <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
}

}  // namespace

std::string code_version() { return RYDSIM_VERSION; }

std::size_t SweepGrid::failed() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return !c.report; }));
}

ModelSystem build_model(ModelKind kind, const AtomParams& atom, const RRIMatrix& rri) {
  return kind == ModelKind::kTwoAtom ? build_two_atom(atom, rri) : build_single_atom(atom);
}

ModelSystem build_model(const ScenarioConfig& cfg) {
  return build_model(cfg.model, cfg.params.atom, cfg.params.rri);
}

DensityMatrix make_initial_state(const ScenarioConfig& cfg, const ModelSystem& model) {
  const std::string& name = cfg.initial_state;
  if (name == "ground_mixture") {
    if (is_two_atom(cfg)) return initial_mixed_state();
    ComplexMatrix rho = ComplexMatrix::Zero(model.dim(), model.dim());
    rho(single_atom::kGround0, single_atom::kGround0) = 0.5;
    rho(single_atom::kGround1, single_atom::kGround1) = 0.5;
    return DensityMatrix(rho, model.dims);
  }
  if (name == "ground_entangled") {
    if (!is_two_atom(cfg)) throw ConfigError("initial_state 'ground_entangled' needs the two-atom model");
    return DensityMatrix::pure(ground_entangled_state(), model.dims);
  }
  if (name == "target") return DensityMatrix::pure(main_target(cfg), model.dims);
  if (name.rfind("level:", 0) == 0) {
    const int idx = level_of(cfg, model, name.substr(6));
    return DensityMatrix::pure(StateVector::basis(model.dim(), idx), model.dims);
  }
  throw ConfigError("unknown initial_state '" + name + "'");
}

std::vector<Observable> make_observables(const std::vector<std::string>& names, const ScenarioConfig& cfg,
                                         const ModelSystem& model) {
  std::vector<Observable> out;
  const auto& a = cfg.params.atom;
  auto fidelity_to = [](StateVector target) {
    return [target = std::move(target)](const DensityMatrix& rho) { return fidelity(rho, target); };
  };
  for (const auto& name : names) {
    Observable o{name, {}};
    if (name == "purity") {
      o.evaluate = [](const DensityMatrix& rho) { return purity(rho); };
    } else if (name.rfind("pop:", 0) == 0) {
      const int idx = level_of(cfg, model, name.substr(4));
      o.evaluate = [idx](const DensityMatrix& rho) { return rho.matrix()(idx, idx).real(); };
    } else if (!is_two_atom(cfg)) {
      if (name != "pop_dark") throw ConfigError("unknown single-atom observable '" + name + "'");
      o.evaluate = fidelity_to(single_atom_dark_state(a.omega1, a.omega2));
    } else if (name == "fidelity") {
      o.evaluate = fidelity_to(target_state(a.omega1, a.omega2, DarkTarget::kMain));
    } else if (name == "fidelity_dd1") {
      o.evaluate = fidelity_to(target_state(a.omega1, a.omega2, DarkTarget::kD1));
    } else if (name == "fidelity_dd2") {
      o.evaluate = fidelity_to(target_state(a.omega1, a.omega2, DarkTarget::kD2));
    } else if (name == "fidelity_psi") {
      o.evaluate = fidelity_to(ground_entangled_state());
    } else if (name == "negativity") {
      o.evaluate = [](const DensityMatrix& rho) { return negativity(rho); };
    } else if (name == "log_negativity") {
      o.evaluate = [](const DensityMatrix& rho) { return log_negativity(rho); };
    } else if (name == "pop_ground") {
      o.evaluate = [idx = ground_indices()](const DensityMatrix& rho) { return diagonal_sum(rho, idx); };
    } else if (name == "pop_rydberg") {
      o.evaluate = [idx = rydberg_indices()](const DensityMatrix& rho) { return diagonal_sum(rho, idx); };
    } else {
      throw ConfigError("unknown two-atom observable '" + name + "'");
    }
    out.push_back(std::move(o));
  }
  return out;
}

RunResult run_scenario(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out) {
  const auto start = Clock::now();
  if (out) output::ensure_directory(*out);
  const ModelSystem model = build_model(cfg);
  const DensityMatrix rho0 = make_initial_state(cfg, model);
  const auto observables = make_observables(cfg.observables, cfg, model);

  RunResult result;
  try {
    result.series = evolve(model, rho0, cfg.t_final, cfg.sample_dt, observables);
  } catch (const NumericalError& e) {
    throw NumericalError("scenario '" + cfg.scenario + "': " + e.what());
  }

  Json summary{{"t_final", cfg.t_final},
               {"samples", result.series.times.size()},
               {"final", final_values(result.series)},
               {"tail_max_drop", tail_monotonicity(result.series, cfg.t_final)},
               {"diagnostics", diagnostics_json(result.series.diagnostics)}};
  if (is_two_atom(cfg)) {
    const StateVector target = main_target(cfg);
    const DensityMatrix ideal = DensityMatrix::pure(target, model.dims);
    summary["ideal_negativity"] = negativity(ideal);
    summary["final_negativity"] = negativity(*result.series.final_state);
    summary["final_fidelity"] = fidelity(*result.series.final_state, target);
    if (result.series.has_column("negativity") && result.series.has_column("log_negativity")) {
      const auto& n = result.series.column("negativity");
      const auto& ln = result.series.column("log_negativity");
      double worst = 0.0;
      for (std::size_t i = 0; i < n.size(); ++i) worst = std::max(worst, std::abs(ln[i] - std::log2(2.0 * n[i] + 1.0)));
      summary["log_negativity_identity_error"] = worst;
    }
  }
  try {
    const SteadyStateResult ss = steady_state(model);
    Json s{{"multiplicity", ss.multiplicity}};
    if (ss.unique()) {
      s["fidelity"] = fidelity(*ss.state, main_target(cfg));
      s["purity"] = purity(*ss.state);
      s["residual"] = ss.residual;
      s["distance_to_final"] = (ss.state->matrix() - result.series.final_state->matrix()).norm();
    } else if (!is_two_atom(cfg) && cfg.params.atom.omega_mw == 0.0) {
      // |0> is decoupled without the microwave; solve on {1, p, R}.
      const std::vector<int> levels{single_atom::kGround1, single_atom::kIntermediate, single_atom::kRydberg};
      const SteadyStateResult sub = steady_state(restrict_levels(model, levels));
      if (sub.unique()) {
        ComplexVector dark(3);
        const StateVector full = main_target(cfg);
        for (int i = 0; i < 3; ++i) dark(i) = full[levels[i]];
        s["restricted_to"] = Json{"1", "p", "R"};
        s["fidelity"] = fidelity(*sub.state, StateVector(dark));
        s["purity"] = purity(*sub.state);
        s["residual"] = sub.residual;
      }
    }
    summary["steady_state"] = s;
  } catch (const NumericalError& e) {
    summary["steady_state"] = Json{{"error", e.what()}};
  }

  std::optional<output::Table> ramp_table;
  if (cfg.ramp) {
    const RampStage& stage = *cfg.ramp;
    const AtomParams base = cfg.params.atom;
    const RRIMatrix rri = cfg.params.rri;
    const ModelBuilder builder = [base, rri](double control) {
      AtomParams p = base;
      p.omega1 = control;
      return build_two_atom(p, rri);
    };
    const auto ramp_obs = make_observables(stage.observables, cfg, model);
    try {
      result.ramp = evolve_timedep(builder, PulseSchedule::cosine_ramp(base.omega1, stage.total_time),
                                   *result.series.final_state, stage.total_time, stage.sample_dt, ramp_obs);
    } catch (const NumericalError& e) {
      throw NumericalError("scenario '" + cfg.scenario + "' ramp stage: " + e.what());
    }
    summary["ramp"] = Json{{"total_time", stage.total_time},
                           {"final", final_values(*result.ramp)},
                           {"diagnostics", diagnostics_json(result.ramp->diagnostics)}};
    ramp_table = output::timeseries_table(*result.ramp, cfg.t_final);
  }

  const output::Table table = output::timeseries_table(result.series);
  result.run = run_header(cfg, "run");
  result.run["summary"] = summary;
  result.run["files"] = cfg.ramp ? Json{"timeseries.csv", "ramp_timeseries.csv"} : Json{"timeseries.csv"};
  result.run["timeseries"] = output::to_json(table);
  if (ramp_table) result.run["ramp_timeseries"] = output::to_json(*ramp_table);
  result.wall_seconds = seconds_since(start);

  if (out) {
    output::emit_outputs(table, output::Format::kCsv, *out / "timeseries.csv", output::kTimeseriesSchema);
    if (ramp_table) {
      output::emit_outputs(*ramp_table, output::Format::kCsv, *out / "ramp_timeseries.csv", output::kTimeseriesSchema);
    }
    output::write_text(*out / "run.json", output::dump(result.run));
    write_timing(*out, result.wall_seconds);
  }
  return result;
}

CellResult evaluate_cell(const ScenarioConfig& cfg) {
  CellResult cell;
  try {
    if (!is_two_atom(cfg)) throw ConfigError("grid cells require the two-atom model");
    const ModelSystem model = build_model(cfg);
    const DensityMatrix rho0 = make_initial_state(cfg, model);
    const TimeSeries s = evolve(model, rho0, cfg.t_final, cfg.sample_dt, {});
    cell.diagnostics = s.diagnostics;
    cell.report = measure(*s.final_state, main_target(cfg), 1, {{"fidelity_psi", ground_entangled_state()}});
  } catch (const Error& e) {
    cell.report.reset();
    cell.error = e.what();
  }
  return cell;
}

SweepGrid run_sweep(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out) {
  if (cfg.sweep.empty()) throw ConfigError("scenario '" + cfg.scenario + "' has no sweep axes");
  const auto start = Clock::now();
  if (out) output::ensure_directory(*out);

  SweepGrid g;
  std::size_t total = 1;
  for (const auto& axis : cfg.sweep) {
    g.axis_names.push_back(axis.label());
    g.axis_values.push_back(axis.values());
    total *= g.axis_values.back().size();
  }
  g.cells.resize(total);

  auto coordinates = [&](std::size_t index) {
    std::vector<double> c(cfg.sweep.size());
    for (std::size_t k = cfg.sweep.size(); k-- > 0;) {
      const auto& vals = g.axis_values[k];
      c[k] = vals[index % vals.size()];
      index /= vals.size();
    }
    return c;
  };

  parallel_for(total, worker_count(cfg, total), [&](std::size_t i) {
    CellResult& cell = g.cells[i];
    const auto coords = coordinates(i);
    try {
      std::vector<std::pair<std::string, double>> sets;
      for (std::size_t k = 0; k < cfg.sweep.size(); ++k) {
        for (const auto& path : cfg.sweep[k].paths) sets.emplace_back(path, coords[k]);
      }
      cell = evaluate_cell(with_overrides(cfg, sets));
    } catch (const Error& e) {
      cell = CellResult{};
      cell.error = e.what();
    }
    cell.coordinates = coords;
  });

  for (const auto& name : g.axis_names) g.table.columns.push_back(name);
  for (const auto& name : measure_columns()) g.table.columns.push_back(name);
  g.table.columns.push_back("status");
  g.table.columns.push_back("error");
  for (const auto& cell : g.cells) {
    std::vector<output::Cell> row(cell.coordinates.begin(), cell.coordinates.end());
    append_measures(row, cell);
    g.table.add_row(std::move(row));
  }

  Json axes = Json::array();
  for (std::size_t k = 0; k < cfg.sweep.size(); ++k) {
    const auto& axis = cfg.sweep[k];
    axes.push_back(Json{{"params", axis.paths},
                        {"unit", axis_unit(cfg.doc, axis.paths.front())},
                        {"scale", axis.log_scale ? "log" : "linear"},
                        {"values", g.axis_values[k]}});
  }
  g.run = run_header(cfg, "sweep");
  g.run["t_final"] = cfg.t_final;
  g.run["axes"] = axes;
  g.run["summary"] = grid_summary(g);
  g.run["files"] = Json{"grid.csv"};
  g.run["grid"] = output::to_json(g.table);
  g.wall_seconds = seconds_since(start);

  if (out) {
    output::emit_outputs(g.table, output::Format::kCsv, *out / "grid.csv", output::kGridSchema);
    output::write_text(*out / "run.json", output::dump(g.run));
    write_timing(*out, g.wall_seconds, Json{{"workers", worker_count(cfg, total)}});
  }
  return g;
}

SweepGrid run_nscaling(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out) {
  if (!cfg.nscale) throw ConfigError("scenario '" + cfg.scenario + "' has no nscale block");
  const auto start = Clock::now();
  if (out) output::ensure_directory(*out);

  const auto& rows = cfg.nscale->rows;
  SweepGrid g;
  g.axis_names = {"n"};
  g.axis_values.emplace_back();
  for (const auto& r : rows) g.axis_values[0].push_back(r.n);
  g.cells.resize(rows.size());

  parallel_for(rows.size(), worker_count(cfg, rows.size()), [&](std::size_t i) {
    ScenarioConfig c = cfg;
    c.params.atom.gamma_r = rows[i].gamma_r;
    c.params.rri.v00 = rows[i].v00;
    c.t_final = rows[i].t_final;
    c.sample_dt = cfg.nscale->sample_dt_fraction * rows[i].t_final;
    g.cells[i] = evaluate_cell(c);
    g.cells[i].coordinates = {static_cast<double>(rows[i].n)};
  });

  g.table.columns = {"n", "lifetime_us", "asymmetry", "gamma_r", "v00", "t_final"};
  for (const auto& name : measure_columns()) g.table.columns.push_back(name);
  g.table.columns.push_back("status");
  g.table.columns.push_back("error");
  Json row_inputs = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::vector<output::Cell> row{static_cast<double>(r.n), r.lifetime_us, r.asymmetry, r.gamma_r, r.v00, r.t_final};
    append_measures(row, g.cells[i]);
    g.table.add_row(std::move(row));
    row_inputs.push_back(Json{{"n", r.n},
                              {"lifetime_us", r.lifetime_us},
                              {"asymmetry", r.asymmetry},
                              {"gamma_r_rad_per_us", r.gamma_r},
                              {"v00_rad_per_us", r.v00},
                              {"t_final_us", r.t_final}});
  }

  g.run = run_header(cfg, "nscale");
  g.run["rows"] = row_inputs;
  g.run["summary"] = grid_summary(g);
  g.run["files"] = Json{"grid.csv"};
  g.run["grid"] = output::to_json(g.table);
  g.wall_seconds = seconds_since(start);

  if (out) {
    output::emit_outputs(g.table, output::Format::kCsv, *out / "grid.csv", output::kGridSchema);
    output::write_text(*out / "run.json", output::dump(g.run));
    write_timing(*out, g.wall_seconds, Json{{"workers", worker_count(cfg, rows.size())}});
  }
  return g;
}

}  // namespace rydsim::scenario
