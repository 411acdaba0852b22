#include "nlc/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "emit.hpp"

namespace nlc {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw config_error(std::string(what) + ": not valid JSON");
  return j;
}

GraphSpec graph_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("graph spec: expected an object with a 'kind'");
  GraphSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "complete") {
    spec.kind = GraphSpec::Kind::complete;
    spec.n = j.at("n").get<int>();
  } else if (kind == "line") {
    spec.kind = GraphSpec::Kind::line;
    spec.n = j.at("n").get<int>();
  } else if (kind == "complete_bipartite") {
    spec.kind = GraphSpec::Kind::complete_bipartite;
    spec.p_side = j.at("p").get<int>();
    spec.q_side = j.at("q").get<int>();
  } else if (kind == "erdos_renyi") {
    spec.kind = GraphSpec::Kind::erdos_renyi;
    spec.n = j.at("n").get<int>();
    spec.edge_prob = j.at("p").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  } else if (kind == "edge_list") {
    spec.kind = GraphSpec::Kind::edge_list;
    if (j.contains("path")) {
      std::ifstream in(j.at("path").get<std::string>());
      if (!in) throw config_error("graph spec: cannot open edge list file");
      Graph g = Graph::load_edge_list(in);
      spec.edge_list_n = g.size();
      spec.edges = g.edges();
    } else {
      int max_vertex = 0;
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
          throw config_error("graph spec: edges must be [i,j] pairs; weighted edges are not supported");
        const int u = e[0].get<int>();
        const int v = e[1].get<int>();
        if (u < 1 || v < 1) throw config_error("graph spec: edge indices are 1-based");
        spec.edges.emplace_back(u - 1, v - 1);
        max_vertex = std::max({max_vertex, u, v});
      }
      spec.edge_list_n = j.value("n", max_vertex);
    }
  } else {
    throw config_error("graph spec: unknown kind '" + kind + "'");
  }
  return spec;
}

json graph_spec_to_json(const GraphSpec& spec) {
  json j;
  switch (spec.kind) {
    case GraphSpec::Kind::complete:
      j["kind"] = "complete";
      j["n"] = spec.n;
      break;
    case GraphSpec::Kind::line:
      j["kind"] = "line";
      j["n"] = spec.n;
      break;
    case GraphSpec::Kind::complete_bipartite:
      j["kind"] = "complete_bipartite";
      j["p"] = spec.p_side;
      j["q"] = spec.q_side;
      break;
    case GraphSpec::Kind::erdos_renyi:
      j["kind"] = "erdos_renyi";
      j["n"] = spec.n;
      j["p"] = spec.edge_prob;
      if (spec.seed) j["seed"] = *spec.seed;
      break;
    case GraphSpec::Kind::edge_list: {
      j["kind"] = "edge_list";
      j["n"] = spec.edge_list_n;
      json edges = json::array();
      for (auto [u, v] : spec.edges) edges.push_back({u + 1, v + 1});
      j["edges"] = std::move(edges);
      break;
    }
  }
  return j;
}

SignalFunction signal_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("signal spec: expected an object with a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const json params = j.value("params", json::object());
  try {
    if (kind == "identity") return SignalFunction::identity();
    if (kind == "affine") return SignalFunction::affine(params.at("a").get<double>(), params.at("b").get<double>());
    if (kind == "tanh_gain") return SignalFunction::tanh_gain(params.at("k").get<double>());
    if (kind == "scaled_sine")
      return SignalFunction::scaled_sine(params.at("amplitude").get<double>(),
                                         params.at("frequency").get<double>());
    if (kind == "quantizer_approx") return SignalFunction::quantizer_approx(params.at("epsilon").get<double>());
    if (kind == "piecewise_linear") {
      std::vector<std::array<double, 2>> pts;
      for (const auto& p : params.at("points")) {
        if (!p.is_array() || p.size() != 2) throw config_error("signal spec: points must be [x,y] pairs");
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      return SignalFunction::piecewise_linear(std::move(pts));
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("signal spec: ") + e.what());
  } catch (const signal_error& e) {
    throw config_error(std::string("signal spec: ") + e.what());
  }
  throw config_error("signal spec: unknown kind '" + kind + "'");
}

json signal_spec_json(const SignalFunction& s) {
  json j;
  j["kind"] = to_string(s.kind());
  json params = json::object();
  switch (s.kind()) {
    case SignalKind::identity:
      break;
    case SignalKind::affine:
      params["a"] = s.param("a");
      params["b"] = s.param("b");
      break;
    case SignalKind::tanh_gain:
      params["k"] = s.param("k");
      break;
    case SignalKind::scaled_sine:
      params["amplitude"] = s.param("amplitude");
      params["frequency"] = s.param("frequency");
      break;
    case SignalKind::quantizer_approx:
      params["epsilon"] = s.param("epsilon");
      break;
    case SignalKind::piecewise_linear: {
      json pts = json::array();
      for (const auto& p : s.points()) pts.push_back({p[0], p[1]});
      params["points"] = std::move(pts);
      break;
    }
  }
  j["params"] = std::move(params);
  return j;
}

InitialSpec initial_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("x0 spec: expected an object with a 'kind'");
  InitialSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform_random") {
    spec.kind = InitialSpec::Kind::uniform_random;
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  } else if (kind == "explicit") {
    spec.kind = InitialSpec::Kind::explicit_vector;
    spec.values = j.at("values").get<std::vector<double>>();
  } else if (kind == "synchronized") {
    spec.kind = InitialSpec::Kind::synchronized;
    spec.value = j.at("value").get<double>();
    if (std::abs(spec.value) > 1.0) throw config_error("x0 spec: synchronized value outside [-1,1]");
  } else {
    throw config_error("x0 spec: unknown kind '" + kind + "'");
  }
  return spec;
}

json initial_to_json(const InitialSpec& spec) {
  json j;
  switch (spec.kind) {
    case InitialSpec::Kind::uniform_random:
      j["kind"] = "uniform_random";
      if (spec.seed) j["seed"] = *spec.seed;
      break;
    case InitialSpec::Kind::explicit_vector:
      j["kind"] = "explicit";
      j["values"] = spec.values;
      break;
    case InitialSpec::Kind::synchronized:
      j["kind"] = "synchronized";
      j["value"] = spec.value;
      break;
  }
  return j;
}

OutputKind output_from_string(const std::string& s) {
  if (s == "trajectory_csv") return OutputKind::trajectory_csv;
  if (s == "trajectory_json") return OutputKind::trajectory_json;
  if (s == "report_json") return OutputKind::report_json;
  throw config_error("outputs: unknown kind '" + s + "'");
}

std::string output_to_string(OutputKind k) {
  switch (k) {
    case OutputKind::trajectory_csv: return "trajectory_csv";
    case OutputKind::trajectory_json: return "trajectory_json";
    case OutputKind::report_json: return "report_json";
  }
  return "?";
}

}  // namespace

SignalFunction parse_signal(const std::string& json_text) {
  return signal_from_json(parse_json(json_text, "signal spec"));
}

std::string signal_to_json(const SignalFunction& s) { return signal_spec_json(s).dump(); }

ScenarioConfig parse_scenario(const std::string& json_text) {
  const json j = parse_json(json_text, "scenario");
  if (!j.is_object()) throw config_error("scenario: expected a JSON object");
  ScenarioConfig config;
  config.schema = j.value("schema", 1);
  if (config.schema != 1)
    throw config_error("scenario: unsupported schema version " + std::to_string(config.schema));
  config.name = j.value("name", std::string("scenario"));
  config.graph = graph_spec_from_json(j.at("graph"));
  config.signal_json = signal_spec_json(signal_from_json(j.at("signal"))).dump();
  config.x0 = initial_from_json(j.at("x0"));
  config.T = j.value("T", 20.0);
  if (!(config.T > 0)) throw config_error("scenario: T must be positive");
  if (j.contains("h")) {
    config.h = j.at("h").get<double>();
    if (!(*config.h > 0)) throw config_error("scenario: h must be positive");
  }
  if (j.contains("outputs")) {
    config.outputs.clear();
    for (const auto& o : j.at("outputs")) config.outputs.push_back(output_from_string(o.get<std::string>()));
  }
  if (config.x0.kind == InitialSpec::Kind::explicit_vector) {
    const int n = config.graph.kind == GraphSpec::Kind::complete_bipartite
                      ? config.graph.p_side + config.graph.q_side
                      : (config.graph.kind == GraphSpec::Kind::edge_list ? config.graph.edge_list_n
                                                                         : config.graph.n);
    if (static_cast<int>(config.x0.values.size()) != n)
      throw config_error("scenario: explicit x0 length does not match graph size");
  }
  return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot open scenario file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_json(const ScenarioConfig& config) {
  json j;
  j["schema"] = config.schema;
  j["name"] = config.name;
  j["graph"] = graph_spec_to_json(config.graph);
  j["signal"] = parse_json(config.signal_json, "signal spec");
  j["x0"] = initial_to_json(config.x0);
  j["T"] = config.T;
  if (config.h) j["h"] = *config.h;
  json outputs = json::array();
  for (OutputKind k : config.outputs) outputs.push_back(output_to_string(k));
  j["outputs"] = std::move(outputs);
  return j.dump(2);
}

std::optional<std::uint64_t> seed_override_from_env() {
  const char* env = std::getenv("NLC_SEED");
  if (!env || !*env) return std::nullopt;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw config_error("NLC_SEED must be an unsigned integer");
  }
}

void apply_seed_override(ScenarioConfig& config, std::optional<std::uint64_t> seed) {
  if (!seed) return;
  if (config.graph.kind == GraphSpec::Kind::erdos_renyi) config.graph.seed = *seed;
  if (config.x0.kind == InitialSpec::Kind::uniform_random) config.x0.seed = *seed;
}

namespace {

StateVector build_initial(const InitialSpec& spec, int n) {
  switch (spec.kind) {
    case InitialSpec::Kind::uniform_random: {
      if (!spec.seed) throw config_error("x0 spec: uniform_random needs a seed");
      Rng rng(*spec.seed);
      return StateVector::uniform_random(n, rng);
    }
    case InitialSpec::Kind::explicit_vector:
      return StateVector(spec.values);
    case InitialSpec::Kind::synchronized:
      return StateVector::synchronized(n, spec.value);
  }
  throw config_error("x0 spec: malformed");
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& opts) {
  const SignalFunction s = parse_signal(config.signal_json);
  const ValidationReport vr = validate(s);
  if (!vr.valid) throw config_error("signal failed validation: " + vr.summary());

  const Graph g = build_graph(config.graph);
  const StateVector x0 = build_initial(config.x0, g.size());

  IntegrateOptions iopts;
  iopts.T = config.T;
  iopts.h = config.h ? *config.h : default_step(s);
  const Trajectory traj = integrate(g, s, x0, iopts);

  RunResult result;
  result.monitor = invariance_monitor(traj);
  result.sync = synchronization_status(traj);
  result.warnings = traj.meta().warnings;

  std::filesystem::create_directories(opts.outdir);
  const auto path_for = [&](const std::string& suffix) {
    return opts.outdir / (config.name + suffix);
  };

  AnalysisReport report;
  bool want_report = false;
  for (OutputKind k : config.outputs) want_report |= (k == OutputKind::report_json);
  if (want_report || opts.basin_samples > 0) {
    result.equilibria = classify_equilibria(g, s);
    report.equilibria = result.equilibria;
    report.sync = result.sync;
    const LyapunovTrace trace = lyapunov_trace(g, traj);
    report.lyapunov_max_increment = trace.max_increment;
    report.lyapunov_center = trace.center;
    if (opts.basin_samples > 0) {
      BasinOptions bopts;
      bopts.T = config.T;
      if (config.h) bopts.h = *config.h;
      report.basin = basin_probe(g, s, opts.basin_samples, opts.basin_seed, bopts);
    }
  }

  for (OutputKind k : config.outputs) {
    switch (k) {
      case OutputKind::trajectory_csv: {
        const auto path = path_for("_trajectory.csv");
        std::ofstream out(path);
        traj.write_csv(out);
        result.written.push_back(path);
        break;
      }
      case OutputKind::trajectory_json: {
        const auto path = path_for("_trajectory.json");
        std::ofstream out(path);
        traj.write_json(out);
        out << "\n";
        result.written.push_back(path);
        break;
      }
      case OutputKind::report_json: {
        const auto path = path_for("_report.json");
        std::ofstream out(path);
        write_json(out, report);
        out << "\n";
        result.written.push_back(path);
        break;
      }
    }
  }
  return result;
}

std::string analyze_signal_text(const SignalFunction& s) {
  std::ostringstream os;
  os << "signal: " << s.describe() << "\n";
  const ValidationReport vr = validate(s);
  os << "validation: " << vr.summary() << "\n";
  if (!vr.valid) return os.str();

  os << "global estimation: " << to_string(classify_estimation(s)) << "\n";
  const FixedPointSet set = analyze_fixed_points(s);
  os << "fixed points:\n";
  for (const auto& p : set.isolated) {
    os << "  " << emit::g17(p.location) << "  " << to_string(p.consistency) << ", "
       << to_string(p.consistency == ConsistencyLabel::consistent
                        ? Stability::asymptotically_stable
                        : (p.consistency == ConsistencyLabel::inconsistent ? Stability::unstable
                                                                           : Stability::ambiguous))
       << "\n";
  }
  for (const auto& iv : set.intervals) {
    os << "  [" << emit::g17(iv.lo) << ", " << emit::g17(iv.hi) << "]  " << to_string(iv.consistency)
       << ", "
       << to_string(iv.consistency == ConsistencyLabel::consistent ? Stability::stable_not_asymptotic
                    : iv.consistency == ConsistencyLabel::inconsistent ? Stability::unstable
                                                                       : Stability::ambiguous)
       << "\n";
  }
  return os.str();
}

ScenarioConfig fig1_scenario() {
  ScenarioConfig c;
  c.name = "fig1";
  c.graph.kind = GraphSpec::Kind::erdos_renyi;
  c.graph.n = 100;
  c.graph.edge_prob = 0.1;
  c.graph.seed = witness::fig1_graph_seed;
  c.signal_json = signal_to_json(SignalFunction::tanh_gain(1.0));
  c.x0.kind = InitialSpec::Kind::uniform_random;
  c.x0.seed = witness::fig1_x0_seed;
  c.T = 20.0;
  c.h = 0.01;
  c.outputs = {OutputKind::trajectory_csv, OutputKind::report_json};
  return c;
}

ScenarioConfig fig3_scenario() {
  ScenarioConfig c;
  c.name = "fig3";
  c.graph.kind = GraphSpec::Kind::erdos_renyi;
  c.graph.n = 100;
  c.graph.edge_prob = 0.1;
  c.graph.seed = witness::fig3_graph_seed;
  c.signal_json = signal_to_json(SignalFunction::scaled_sine(0.8, 2.0));
  c.x0.kind = InitialSpec::Kind::uniform_random;
  c.x0.seed = witness::fig3_x0_seed;
  c.T = 40.0;
  c.h = 0.01;
  c.outputs = {OutputKind::trajectory_csv, OutputKind::report_json};
  return c;
}

ScenarioConfig fig4_scenario() {
  ScenarioConfig c;
  c.name = "fig4";
  c.graph.kind = GraphSpec::Kind::line;
  c.graph.n = 6;
  c.signal_json = signal_to_json(SignalFunction::tanh_gain(20.0));
  c.x0.kind = InitialSpec::Kind::uniform_random;
  c.x0.seed = witness::fig4_x0_seed;
  c.T = 100.0;
  // default_step lowers h to 0.001 for the gain-20 signal; keep it explicit
  // here so the committed scenario is self-describing.
  c.h = 0.001;
  c.outputs = {OutputKind::trajectory_csv, OutputKind::report_json};
  return c;
}

}  // namespace nlc
