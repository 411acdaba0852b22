#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlc/analysis.hpp"
#include "nlc/dynamics.hpp"
#include "nlc/graph.hpp"
#include "nlc/signal.hpp"

namespace nlc {

/// Initial-condition recipe.
struct InitialSpec {
  enum class Kind { uniform_random, explicit_vector, synchronized };
  Kind kind = Kind::uniform_random;
  std::optional<std::uint64_t> seed;  // uniform_random
  std::vector<double> values;         // explicit_vector
  double value = 0.0;                 // synchronized
};

enum class OutputKind { trajectory_csv, trajectory_json, report_json };

/// One reproducible run: graph + signal + initial condition + horizon.
/// JSON schema is versioned; see parse_scenario / to_json.
struct ScenarioConfig {
  int schema = 1;
  std::string name = "scenario";
  GraphSpec graph;
  std::string signal_json;  // canonical signal spec (kind + params)
  InitialSpec x0;
  double T = 20.0;
  std::optional<double> h;  // absent: default_step(signal)
  std::vector<OutputKind> outputs = {OutputKind::trajectory_csv, OutputKind::report_json};
};

/// Signal-spec JSON: {"kind": string, "params": {...}}.
SignalFunction parse_signal(const std::string& json_text);
std::string signal_to_json(const SignalFunction& s);

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::filesystem::path& file);
std::string to_json(const ScenarioConfig& config);

/// NLC_SEED, when set, overrides every seed in the config (graph sampling
/// and random initial conditions).
std::optional<std::uint64_t> seed_override_from_env();
void apply_seed_override(ScenarioConfig& config, std::optional<std::uint64_t> seed);

struct RunOptions {
  std::filesystem::path outdir = ".";
  int basin_samples = 0;  // > 0 adds a basin probe to the report
  std::uint64_t basin_seed = 1;
  bool quiet = false;
};

struct RunResult {
  SyncStatus sync;
  MonitorReport monitor;
  std::vector<EquilibriumVerdict> equilibria;
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

/// Builds the graph, validates the signal (invalid signals are an error),
/// integrates, runs the requested analyses and writes the requested output
/// files (<name>_trajectory.csv/.json, <name>_report.json).
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& opts = {});

/// Human-readable signal analysis (validation, estimation class, fixed
/// points with consistency and graph-independent stability) for the
/// analyze-signal command.
std::string analyze_signal_text(const SignalFunction& s);

/// Committed scenarios reproducing the reference experiments. The seeds
/// are witnesses found by search (see tools/find_witness_seeds.cpp) and
/// are part of the repository contract: identical output bytes on every
/// run.
ScenarioConfig fig1_scenario();  // ER(100,0.1), tanh, sync to 0
ScenarioConfig fig3_scenario();  // ER(100,0.1), scaled sine, sync into [0.8,1]
ScenarioConfig fig4_scenario();  // line(6), tanh_gain(20), persistent disagreement

/// Seeds shared between the committed scenarios and the test suites.
namespace witness {
inline constexpr std::uint64_t fig1_graph_seed = 314159;
inline constexpr std::uint64_t fig1_x0_seed = 27;
inline constexpr std::uint64_t fig3_graph_seed = 314159;
inline constexpr std::uint64_t fig3_x0_seed = 1;
inline constexpr std::uint64_t fig4_x0_seed = 4;
}  // namespace witness

}  // namespace nlc
