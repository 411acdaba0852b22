// nlc: simulate and analyze nonlinear consensus dynamics on undirected
// graphs. Subcommands: analyze-signal, simulate, classify, basin, reproduce.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nlc/scenario.hpp"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw nlc::config_error("cannot open file: " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlc::ScenarioConfig load_with_env(const std::filesystem::path& file) {
  nlc::ScenarioConfig config = nlc::load_scenario(file);
  nlc::apply_seed_override(config, nlc::seed_override_from_env());
  return config;
}

void print_result(const nlc::RunResult& result) {
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "final spread: " << result.sync.final_spread << "\n";
  if (result.sync.common_value)
    std::cout << "synchronized value: " << *result.sync.common_value << "\n";
  else
    std::cout << "not synchronized at T (tol " << result.sync.tol << ")\n";
  std::cout << "max box excursion: " << result.monitor.max_box_excursion << "\n";
  for (const auto& p : result.written) std::cout << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlinear consensus dynamics: simulation and stability analysis"};
  app.require_subcommand(1);

  std::string spec_file;
  std::string scenario_file;
  std::string outdir = ".";
  int samples = 50;
  std::uint64_t basin_seed = 1;
  std::string figure;

  auto* analyze = app.add_subcommand("analyze-signal", "fixed points, estimation class and stability of a signal spec");
  analyze->add_option("spec", spec_file, "signal spec JSON file")->required();

  auto* simulate = app.add_subcommand("simulate", "integrate a scenario and write trajectory outputs");
  simulate->add_option("scenario", scenario_file, "scenario JSON file")->required();
  simulate->add_option("--outdir", outdir, "output directory");

  auto* classify = app.add_subcommand("classify", "simulate plus equilibrium/stability report");
  classify->add_option("scenario", scenario_file, "scenario JSON file")->required();
  classify->add_option("--outdir", outdir, "output directory");

  auto* basin = app.add_subcommand("basin", "attraction-cell probe of a scenario's graph and signal");
  basin->add_option("scenario", scenario_file, "scenario JSON file")->required();
  basin->add_option("--samples", samples, "initial states per cell");
  basin->add_option("--seed", basin_seed, "sampling seed");
  basin->add_option("--outdir", outdir, "output directory");

  auto* reproduce = app.add_subcommand("reproduce", "run a committed reference scenario (fig1|fig3|fig4)");
  reproduce->add_option("figure", figure, "fig1, fig3 or fig4")->required();
  reproduce->add_option("--outdir", outdir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      std::cout << nlc::analyze_signal_text(nlc::parse_signal(slurp(spec_file)));
      return 0;
    }

    nlc::ScenarioConfig config;
    nlc::RunOptions opts;
    opts.outdir = outdir;

    if (reproduce->parsed()) {
      if (figure == "fig1")
        config = nlc::fig1_scenario();
      else if (figure == "fig3")
        config = nlc::fig3_scenario();
      else if (figure == "fig4")
        config = nlc::fig4_scenario();
      else
        throw nlc::config_error("unknown figure '" + figure + "' (expected fig1, fig3 or fig4)");
      nlc::apply_seed_override(config, nlc::seed_override_from_env());
    } else {
      config = load_with_env(scenario_file);
    }

    if (simulate->parsed()) {
      // Trajectory outputs only.
      std::erase_if(config.outputs, [](nlc::OutputKind k) { return k == nlc::OutputKind::report_json; });
      if (config.outputs.empty()) config.outputs = {nlc::OutputKind::trajectory_csv};
    }
    if (classify->parsed() || reproduce->parsed()) {
      if (std::find(config.outputs.begin(), config.outputs.end(), nlc::OutputKind::report_json) ==
          config.outputs.end())
        config.outputs.push_back(nlc::OutputKind::report_json);
    }
    if (basin->parsed()) {
      opts.basin_samples = samples;
      opts.basin_seed = basin_seed;
      if (std::find(config.outputs.begin(), config.outputs.end(), nlc::OutputKind::report_json) ==
          config.outputs.end())
        config.outputs.push_back(nlc::OutputKind::report_json);
    }

    print_result(nlc::run_scenario(config, opts));
    return 0;
  } catch (const nlc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
