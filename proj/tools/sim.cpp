#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rydsim/config.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/output.hpp"
#include "rydsim/scenario.hpp"

namespace {

namespace sc = rydsim::scenario;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string scenario;
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  int workers = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out) {
  cmd->add_option("--scenario", args.scenario, "Named scenario")->check(CLI::IsMember(sc::scenario_names()));
  cmd->add_option("--config", args.config, "JSON config file, merged over its scenario's defaults");
  auto* out = cmd->add_option("--out", args.out, "Output directory");
  if (needs_out) out->required();
  cmd->add_option("--set", args.sets, "Override a config field, e.g. params.omega2=3.85")->take_all();
  cmd->add_option("--workers", args.workers, "Sweep worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

sc::ScenarioConfig load(const CommonArgs& args, const std::string& fallback) {
  sc::Json doc;
  if (!args.config.empty()) {
    doc = sc::load_config_file(args.config);
    if (!args.scenario.empty() && doc.value("scenario", std::string()) != args.scenario) {
      throw rydsim::ConfigError("--scenario " + args.scenario + " conflicts with the scenario in " + args.config);
    }
  } else {
    doc = sc::default_config(args.scenario.empty() ? fallback : args.scenario);
  }
  for (const auto& s : args.sets) sc::apply_override(doc, s);
  if (args.workers >= 0) doc["workers"] = args.workers;
  return sc::resolve(doc);
}

void report_grid(const sc::SweepGrid& g, const std::string& out) {
  std::cout << "wrote " << g.cells.size() << " cells to " << out << "/grid.csv";
  if (g.failed() > 0) std::cout << " (" << g.failed() << " failed)";
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative two-atom Rydberg entanglement simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, nscale_args, show_args;
  auto* run = app.add_subcommand("run", "Time series for one scenario");
  add_common(run, run_args, true);
  auto* sweep = app.add_subcommand("sweep", "Parameter grid evaluated at t_final");
  add_common(sweep, sweep_args, true);
  auto* nscale = app.add_subcommand("nscale", "Fidelity and purity versus principal quantum number");
  add_common(nscale, nscale_args, true);
  auto* show = app.add_subcommand("show", "Print the resolved config document");
  add_common(show, show_args, false);
  auto* list = app.add_subcommand("list", "List named scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& name : sc::scenario_names()) std::cout << name << "\n";
    } else if (show->parsed()) {
      const auto cfg = load(show_args, "fig4");
      sc::Json doc = cfg.doc;
      doc["resolved_rad_per_us"] = cfg.params.audit;
      std::cout << rydsim::output::dump(doc);
    } else if (run->parsed()) {
      const auto cfg = load(run_args, "fig4");
      for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
      const auto result = sc::run_scenario(cfg, std::filesystem::path(run_args.out));
      std::cout << "wrote " << result.series.times.size() << " samples to " << run_args.out << "/timeseries.csv\n";
    } else if (sweep->parsed()) {
      const auto cfg = load(sweep_args, "fig6");
      for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
      report_grid(sc::run_sweep(cfg, std::filesystem::path(sweep_args.out)), sweep_args.out);
    } else if (nscale->parsed()) {
      const auto cfg = load(nscale_args, "fig9");
      for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
      report_grid(sc::run_nscaling(cfg, std::filesystem::path(nscale_args.out)), nscale_args.out);
    }
  } catch (const rydsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rydsim::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
