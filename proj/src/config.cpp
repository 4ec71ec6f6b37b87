#include "rydsim/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "rydsim/errors.hpp"

namespace rydsim::scenario {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Json quantity(double value, std::string_view unit) { return Json{{"value", value}, {"unit", unit}}; }

Json two_atom_base() {
  return Json{
      {"schema_version", kConfigSchema},
      {"model", "two_atom"},
      {"params",
       {{"omega1", quantity(30.0, "MHz_over_2pi")},
        {"omega2", quantity(3.85, "omega1")},
        {"delta", quantity(0.0, "rad_per_us")},
        {"omega_mw", quantity(0.004, "omega1")},
        {"gamma_p", quantity(10.0, "MHz_over_2pi")},
        {"gamma_r", quantity(1.0, "kHz_over_2pi")},
        {"v12", quantity(2.0, "omega1")},
        {"v10", quantity(0.8, "v12")},
        {"v02", quantity(0.8, "v12")},
        {"v00", quantity(0.001, "v12")}}},
      {"initial_state", "ground_mixture"},
      {"t_final", 500.0},
      {"sample_dt", 0.5},
      {"observables", {"fidelity", "purity", "negativity", "log_negativity", "fidelity_psi", "pop_ground", "pop_rydberg"}},
      {"workers", 0},
      {"notes", Json::array()},
  };
}

Json axis(std::string_view path, double lo, double hi, int count, std::string_view scale) {
  return Json{{"params", {path}}, {"min", lo}, {"max", hi}, {"count", count}, {"scale", scale}};
}

Json sweep_base(Json axes) {
  Json doc = two_atom_base();
  doc["sample_dt"] = 5.0;
  doc["sweep"] = Json{{"axes", std::move(axes)}};
  doc["notes"].push_back("sweep ranges are best-effort readings of plotted axes, not tabulated values");
  return doc;
}

}  // namespace

std::vector<std::string> unit_names() {
  return {"rad_per_us", "per_us", "MHz", "kHz", "MHz_over_2pi", "kHz_over_2pi", "omega1", "v12"};
}

std::vector<std::string> scenario_names() {
  return {"fig1b", "fig4", "fig5", "fig6", "fig7a", "fig7b", "fig7c", "fig7d", "fig8", "fig9", "custom"};
}

Json default_config(std::string_view name) {
  Json doc;
  if (name == "fig1b") {
    doc = Json{
        {"schema_version", kConfigSchema},
        {"model", "single_atom"},
        {"params",
         {{"omega1", quantity(1.0, "rad_per_us")},
          {"omega2", quantity(1.0, "omega1")},
          {"delta", quantity(0.0, "rad_per_us")},
          {"omega_mw", quantity(0.0, "rad_per_us")},
          {"gamma_p", quantity(0.1515, "omega1")},
          {"gamma_r", quantity(5e-5, "omega1")}}},
        {"initial_state", "level:1"},
        {"t_final", 1000.0},
        {"sample_dt", 1.0},
        {"observables", {"pop_dark", "pop:1", "pop:p", "pop:R", "purity"}},
        {"workers", 0},
        {"notes", {"dimensionless run: omega1 = 1 rad/us, so t is measured in units of 1/omega1"}},
    };
  } else if (name == "fig4" || name == "fig5" || name == "custom") {
    doc = two_atom_base();
  } else if (name == "fig6") {
    doc = sweep_base(Json::array({axis("params.omega2", 1.0, 6.0, 11, "linear"),
                                  axis("params.omega_mw", 0.001, 0.01, 4, "log")}));
    doc["params"]["v10"] = quantity(0.5, "v12");
    doc["params"]["v02"] = quantity(0.5, "v12");
  } else if (name == "fig7a") {
    doc = sweep_base(Json::array({axis("params.v12", 0.5, 4.0, 8, "linear")}));
    doc["params"]["v10"] = quantity(1.6, "omega1");
    doc["params"]["v02"] = quantity(1.6, "omega1");
  } else if (name == "fig7b") {
    doc = sweep_base(Json::array({axis("params.v00", 0.001, 1.0, 7, "log")}));
    doc["params"]["v00"] = quantity(0.002, "omega1");
  } else if (name == "fig7c") {
    doc = sweep_base(Json::array({axis("params.gamma_p", 1.0, 100.0, 6, "log")}));
  } else if (name == "fig7d") {
    doc = sweep_base(Json::array({axis("params.gamma_r", 0.1, 100.0, 7, "log")}));
  } else if (name == "fig8") {
    doc = two_atom_base();
    doc["ramp"] = Json{{"shape", "cosine"},
                       {"control", "omega1"},
                       {"total_time", 10.0},
                       {"sample_dt", 0.1},
                       {"observables", {"fidelity_psi", "fidelity", "purity", "negativity", "log_negativity"}}};
    doc["notes"].push_back("ramp duration has no reference value; 10 us is a default choice");
  } else if (name == "fig9") {
    doc = two_atom_base();
    doc["nscale"] = Json{
        {"n_values", {50, 60, 70, 80, 90, 100}},
        {"rows", Json::array()},
        {"sample_dt_fraction", 0.02},
        {"generator",
         {{"enabled", true},
          {"reference_n", 70},
          {"reference_lifetime_us", 305.0},
          {"reference_asymmetry", 27.8523},
          {"lifetime_exponent", 3.0},
          {"asymmetry_exponent", -7.0},
          {"asymmetry_of", "v12"},
          {"decay_rate", "inverse_lifetime"}}}};
    doc["notes"].push_back(
        "model assumptions: lifetime ~ n^3, interaction asymmetry ~ n^-7, gamma_r = 1/lifetime, "
        "v00 = v12 / asymmetry, evaluated at t = lifetime");
  } else {
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
  }
  doc["scenario"] = name;
  return doc;
}

Json merge_with_defaults(const Json& user) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  const std::string name = user.value("scenario", std::string("custom"));
  Json doc = default_config(name);
  doc.merge_patch(user);
  return doc;
}

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  Json user;
  try {
    user = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return merge_with_defaults(user);
}

namespace {

std::vector<std::string> split_path(std::string_view dotted) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : dotted) {
    if (c == '.') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  for (const auto& p : parts) {
    if (p.empty()) throw ConfigError("malformed config path '" + std::string(dotted) + "'");
  }
  return parts;
}

bool is_quantity(const Json& j) { return j.is_object() && j.contains("value"); }

}  // namespace

void set_path(Json& doc, std::string_view dotted, const Json& value) {
  const auto parts = split_path(dotted);
  Json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("config path '" + std::string(dotted) + "' crosses a non-object");
    node = &(*node)[parts[i]];
  }
  Json& leaf = (*node)[parts.back()];
  if (is_quantity(leaf) && value.is_number()) {
    leaf["value"] = value;
  } else {
    leaf = value;
  }
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must have the form path=value");
  }
  const std::string_view path = assignment.substr(0, eq);
  const std::string raw(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::parse_error&) {
    value = raw;
  }
  set_path(doc, path, value);
}

namespace {

double number(const Json& j, std::string_view what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string(what) + " must be finite");
  return x;
}

struct Quantity {
  double value = 0.0;
  std::string unit = "rad_per_us";
};

Quantity read_quantity(const Json& j, const std::string& name) {
  if (j.is_number()) return {number(j, name), "rad_per_us"};
  if (!j.is_object()) throw ConfigError("parameter '" + name + "' must be a number or {value, unit}");
  for (const auto& [key, _] : j.items()) {
    if (key != "value" && key != "unit") throw ConfigError("parameter '" + name + "' has unknown field '" + key + "'");
  }
  if (!j.contains("value")) throw ConfigError("parameter '" + name + "' is missing 'value'");
  Quantity q{number(j.at("value"), name), j.value("unit", std::string("rad_per_us"))};
  const auto units = unit_names();
  if (std::find(units.begin(), units.end(), q.unit) == units.end()) {
    throw ConfigError("parameter '" + name + "' has unknown unit '" + q.unit + "'");
  }
  return q;
}

double convert(const Quantity& q, const std::string& name, std::optional<double> omega1, std::optional<double> v12) {
  if (q.unit == "rad_per_us" || q.unit == "per_us" || q.unit == "MHz") return q.value;
  if (q.unit == "kHz") return q.value * 1e-3;
  if (q.unit == "MHz_over_2pi") return q.value * kTwoPi;
  if (q.unit == "kHz_over_2pi") return q.value * kTwoPi * 1e-3;
  if (q.unit == "omega1") {
    if (!omega1) throw ConfigError("parameter '" + name + "' cannot be expressed in units of omega1");
    return q.value * *omega1;
  }
  if (q.unit == "v12") {
    if (!v12) throw ConfigError("parameter '" + name + "' cannot be expressed in units of v12");
    return q.value * *v12;
  }
  throw ConfigError("unknown unit '" + q.unit + "'");
}

}  // namespace

ResolvedParams resolve_params(const Json& params, ModelKind kind) {
  if (!params.is_object()) throw ConfigError("'params' must be an object");
  const std::set<std::string> atom_keys = {"omega1", "omega2", "delta", "omega_mw", "gamma_p", "gamma_r"};
  const std::set<std::string> rri_keys = {"v00", "v10", "v02", "v12"};
  for (const auto& [key, _] : params.items()) {
    const bool known = atom_keys.contains(key) || (kind == ModelKind::kTwoAtom && rri_keys.contains(key));
    if (!known) throw ConfigError("unknown parameter 'params." + key + "'");
  }

  ResolvedParams r;
  r.audit = Json::object();
  auto read = [&](const std::string& key, std::optional<double> omega1, std::optional<double> v12) {
    if (!params.contains(key)) {
      r.audit[key] = Json{{"rad_per_us", 0.0}, {"source", "default"}};
      return 0.0;
    }
    const Quantity q = read_quantity(params.at(key), key);
    const double value = convert(q, key, omega1, v12);
    r.audit[key] = Json{{"rad_per_us", value}, {"source", quantity(q.value, q.unit)}};
    return value;
  };

  if (!params.contains("omega1")) throw ConfigError("parameter 'params.omega1' is required");
  if (!params.contains("gamma_p")) throw ConfigError("parameter 'params.gamma_p' is required");
  const double omega1 = read("omega1", std::nullopt, std::nullopt);
  r.atom.omega1 = omega1;
  r.atom.omega2 = read("omega2", omega1, std::nullopt);
  r.atom.delta = read("delta", omega1, std::nullopt);
  r.atom.omega_mw = read("omega_mw", omega1, std::nullopt);
  r.atom.gamma_p = read("gamma_p", omega1, std::nullopt);
  r.atom.gamma_r = read("gamma_r", omega1, std::nullopt);
  if (kind == ModelKind::kTwoAtom) {
    const double v12 = read("v12", omega1, std::nullopt);
    r.rri.v12 = v12;
    r.rri.v10 = read("v10", omega1, v12);
    r.rri.v02 = read("v02", omega1, v12);
    r.rri.v00 = read("v00", omega1, v12);
  }
  r.atom.validate();
  return r;
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out[i] = log_scale ? min * std::pow(max / min, f) : min + f * (max - min);
  }
  if (count > 1) out.back() = max;
  return out;
}

std::string SweepAxis::label() const {
  std::string s;
  for (const auto& p : paths) s += (s.empty() ? "" : "|") + p;
  return s;
}

namespace {

SweepAxis read_axis(const Json& j) {
  if (!j.is_object()) throw ConfigError("sweep axis must be an object");
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> keys = {"params", "min", "max", "count", "scale"};
    if (!keys.contains(key)) throw ConfigError("sweep axis has unknown field '" + key + "'");
  }
  SweepAxis a;
  const Json& paths = j.at("params");
  if (paths.is_string()) {
    a.paths.push_back(paths.get<std::string>());
  } else if (paths.is_array() && !paths.empty()) {
    for (const auto& p : paths) a.paths.push_back(p.get<std::string>());
  } else {
    throw ConfigError("sweep axis 'params' must be a path or a non-empty list of paths");
  }
  a.min = number(j.at("min"), "sweep axis min");
  a.max = number(j.at("max"), "sweep axis max");
  if (!j.at("count").is_number_integer()) throw ConfigError("sweep axis count must be an integer");
  a.count = j.at("count").get<int>();
  const std::string scale = j.value("scale", std::string("linear"));
  if (scale != "linear" && scale != "log") throw ConfigError("sweep axis scale must be 'linear' or 'log'");
  a.log_scale = scale == "log";
  if (a.count < 1) throw ConfigError("sweep axis count must be >= 1");
  if (a.log_scale && !(a.min > 0.0 && a.max > 0.0)) throw ConfigError("log sweep axis needs positive bounds");
  return a;
}

std::vector<NScaleRow> read_nscale_rows(const Json& spec, const ResolvedParams& base) {
  const Json gen = spec.value("generator", Json::object());
  const bool generate = gen.value("enabled", false);

  std::vector<Json> entries;
  if (spec.contains("rows") && !spec.at("rows").empty()) {
    for (const auto& r : spec.at("rows")) entries.push_back(r);
  } else if (spec.contains("n_values")) {
    for (const auto& n : spec.at("n_values")) entries.push_back(Json{{"n", n}});
  }
  if (entries.empty()) throw ConfigError("nscale: no principal quantum numbers given");

  std::vector<NScaleRow> rows;
  for (const auto& e : entries) {
    if (!e.contains("n") || !e.at("n").is_number_integer()) throw ConfigError("nscale: every row needs an integer n");
    NScaleRow row;
    row.n = e.at("n").get<int>();
    if (row.n <= 0) throw ConfigError("nscale: n must be positive");

    if (generate) {
      const double n_ref = number(gen.at("reference_n"), "generator.reference_n");
      const double ratio = row.n / n_ref;
      row.lifetime_us = number(gen.at("reference_lifetime_us"), "generator.reference_lifetime_us") *
                        std::pow(ratio, number(gen.value("lifetime_exponent", Json(3.0)), "lifetime_exponent"));
      row.asymmetry = number(gen.at("reference_asymmetry"), "generator.reference_asymmetry") *
                      std::pow(ratio, number(gen.value("asymmetry_exponent", Json(-7.0)), "asymmetry_exponent"));
      const std::string rate = gen.value("decay_rate", std::string("inverse_lifetime"));
      if (rate == "inverse_lifetime") {
        row.gamma_r = 1.0 / row.lifetime_us;
      } else if (rate == "angular_inverse_lifetime") {
        row.gamma_r = kTwoPi / row.lifetime_us;
      } else {
        throw ConfigError("nscale generator decay_rate must be 'inverse_lifetime' or 'angular_inverse_lifetime'");
      }
      const std::string of = gen.value("asymmetry_of", std::string("v12"));
      double reference = 0.0;
      if (of == "v12") {
        reference = base.rri.v12;
      } else if (of == "v10") {
        reference = base.rri.v10;
      } else {
        throw ConfigError("nscale generator asymmetry_of must be 'v12' or 'v10'");
      }
      row.v00 = reference / row.asymmetry;
      row.t_final = row.lifetime_us;
    }
    // Explicit per-row values override generated ones.
    bool have_gamma = generate, have_v00 = generate, have_t = generate;
    if (e.contains("gamma_r")) {
      row.gamma_r = convert(read_quantity(e.at("gamma_r"), "gamma_r"), "gamma_r", base.atom.omega1, base.rri.v12);
      have_gamma = true;
    }
    if (e.contains("v00")) {
      row.v00 = convert(read_quantity(e.at("v00"), "v00"), "v00", base.atom.omega1, base.rri.v12);
      have_v00 = true;
    }
    if (e.contains("t_final")) {
      row.t_final = number(e.at("t_final"), "t_final");
      have_t = true;
    }
    if (e.contains("lifetime_us")) row.lifetime_us = number(e.at("lifetime_us"), "lifetime_us");
    if (e.contains("asymmetry")) row.asymmetry = number(e.at("asymmetry"), "asymmetry");
    if (!(have_gamma && have_v00 && have_t)) {
      throw ConfigError("nscale: row n=" + std::to_string(row.n) +
                        " is missing gamma_r, v00 or t_final and no generator is enabled");
    }
    if (!(row.t_final > 0.0)) throw ConfigError("nscale: t_final must be positive");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ScenarioConfig resolve(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> top_keys = {"schema_version", "scenario", "model",       "params",
                                                 "initial_state",  "t_final",  "sample_dt",   "observables",
                                                 "sweep",          "ramp",     "nscale",      "output",
                                                 "workers",        "notes"};
  for (const auto& [key, _] : doc.items()) {
    if (!top_keys.contains(key)) throw ConfigError("unknown config field '" + key + "'");
  }
  if (doc.value("schema_version", std::string(kConfigSchema)) != kConfigSchema) {
    throw ConfigError("unsupported config schema_version (expected " + std::string(kConfigSchema) + ")");
  }

  ScenarioConfig c;
  c.doc = doc;
  c.scenario = doc.value("scenario", std::string("custom"));
  const std::string model = doc.value("model", std::string("two_atom"));
  if (model == "two_atom") {
    c.model = ModelKind::kTwoAtom;
  } else if (model == "single_atom") {
    c.model = ModelKind::kSingleAtom;
  } else {
    throw ConfigError("model must be 'two_atom' or 'single_atom'");
  }
  if (!doc.contains("params")) throw ConfigError("config is missing 'params'");
  c.params = resolve_params(doc.at("params"), c.model);
  c.warnings = c.params.atom.warnings();

  c.t_final = number(doc.at("t_final"), "t_final");
  c.sample_dt = number(doc.at("sample_dt"), "sample_dt");
  if (!(c.t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (!(c.sample_dt > 0.0)) throw ConfigError("sample_dt must be positive");
  c.initial_state = doc.value("initial_state", std::string("ground_mixture"));
  for (const auto& o : doc.value("observables", Json::array())) c.observables.push_back(o.get<std::string>());

  if (doc.contains("sweep") && !doc.at("sweep").is_null()) {
    const Json& s = doc.at("sweep");
    if (!s.contains("axes") || !s.at("axes").is_array()) throw ConfigError("sweep must provide an 'axes' list");
    for (const auto& a : s.at("axes")) c.sweep.push_back(read_axis(a));
    if (c.sweep.empty() || c.sweep.size() > 2) throw ConfigError("sweep supports one or two axes");
    for (const auto& a : c.sweep) {
      for (const auto& p : a.paths) {
        if (p.rfind("params.", 0) != 0 && p != "t_final") {
          throw ConfigError("sweep axis path '" + p + "' must point into params or be t_final");
        }
      }
    }
    if (c.model != ModelKind::kTwoAtom) throw ConfigError("sweeps require the two-atom model");
  }

  if (doc.contains("ramp") && !doc.at("ramp").is_null()) {
    const Json& r = doc.at("ramp");
    if (r.value("shape", std::string("cosine")) != "cosine") throw ConfigError("ramp shape must be 'cosine'");
    if (r.value("control", std::string("omega1")) != "omega1") throw ConfigError("ramp control must be 'omega1'");
    if (c.model != ModelKind::kTwoAtom) throw ConfigError("the ramp stage requires the two-atom model");
    RampStage stage;
    stage.total_time = number(r.at("total_time"), "ramp.total_time");
    stage.sample_dt = number(r.at("sample_dt"), "ramp.sample_dt");
    if (!(stage.total_time > 0.0 && stage.sample_dt > 0.0)) throw ConfigError("ramp times must be positive");
    for (const auto& o : r.value("observables", Json::array())) stage.observables.push_back(o.get<std::string>());
    c.ramp = stage;
  }

  if (doc.contains("nscale") && !doc.at("nscale").is_null()) {
    if (c.model != ModelKind::kTwoAtom) throw ConfigError("nscale requires the two-atom model");
    NScaleSpec spec;
    spec.rows = read_nscale_rows(doc.at("nscale"), c.params);
    spec.sample_dt_fraction = doc.at("nscale").value("sample_dt_fraction", 0.02);
    if (!(spec.sample_dt_fraction > 0.0 && spec.sample_dt_fraction <= 1.0)) {
      throw ConfigError("nscale sample_dt_fraction must lie in (0, 1]");
    }
    c.nscale = spec;
  }

  c.output = doc.value("output", std::string());
  if (!doc.value("workers", Json(0)).is_number_integer() || doc.value("workers", 0) < 0) {
    throw ConfigError("workers must be a non-negative integer");
  }
  c.workers = doc.value("workers", 0);
  for (const auto& n : doc.value("notes", Json::array())) c.notes.push_back(n.get<std::string>());
  return c;
}

}  // namespace rydsim::scenario
