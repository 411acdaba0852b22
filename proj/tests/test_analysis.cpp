#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nlc/analysis.hpp"
#include "nlc/dynamics.hpp"
#include "nlc/graph.hpp"
#include "nlc/scenario.hpp"
#include "nlc/signal.hpp"

using namespace nlc;

namespace {

SignalFunction fig3_signal() { return SignalFunction::scaled_sine(0.8, 2.0); }

const EquilibriumVerdict* find_point(const std::vector<EquilibriumVerdict>& vs, double c) {
  for (const auto& v : vs)
    if (!v.is_interval && std::abs(v.location - c) < 1e-6) return &v;
  return nullptr;
}

}  // namespace

TEST_CASE("classify_equilibria: tanh_gain(1) has the single AS point 0") {
  const auto verdicts = classify_equilibria(Graph::complete(4), SignalFunction::tanh_gain(1.0));
  REQUIRE(verdicts.size() == 1);
  CHECK_FALSE(verdicts[0].is_interval);
  CHECK(std::abs(verdicts[0].location) <= 1e-9);
  CHECK(verdicts[0].stability == Stability::asymptotically_stable);
  CHECK(verdicts[0].residual <= 1e-9);
}

TEST_CASE("classify_equilibria: quantizer splits into unstable 0 and AS +-1") {
  const auto verdicts = classify_equilibria(Graph::line(4), SignalFunction::quantizer_approx(0.5));
  REQUIRE(verdicts.size() == 3);
  CHECK(find_point(verdicts, -1.0)->stability == Stability::asymptotically_stable);
  CHECK(find_point(verdicts, 0.0)->stability == Stability::unstable);
  CHECK(find_point(verdicts, 1.0)->stability == Stability::asymptotically_stable);
}

TEST_CASE("classify_equilibria: identity is one stable-not-asymptotic interval") {
  const auto verdicts = classify_equilibria(Graph::complete(3), SignalFunction::identity());
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0].is_interval);
  CHECK(verdicts[0].location == -1.0);
  CHECK(verdicts[0].location_hi == 1.0);
  CHECK(verdicts[0].stability == Stability::stable_not_asymptotic);
}

TEST_CASE("classify_equilibria: the sine signal mixes an unstable point with stable wings") {
  const auto verdicts = classify_equilibria(Graph::complete(3), fig3_signal());
  REQUIRE(verdicts.size() == 3);
  CHECK(verdicts[0].is_interval);
  CHECK(verdicts[0].stability == Stability::stable_not_asymptotic);
  CHECK_FALSE(verdicts[1].is_interval);
  CHECK(verdicts[1].stability == Stability::unstable);
  CHECK(verdicts[2].is_interval);
  CHECK(verdicts[2].stability == Stability::stable_not_asymptotic);
}

TEST_CASE("classify_equilibria requires connectivity") {
  CHECK_THROWS_AS(classify_equilibria(Graph(4, {{0, 1}, {2, 3}}), SignalFunction::identity()),
                  graph_error);
}

TEST_CASE("verdict structure: AS only for isolated consistent, unstable only for inconsistent") {
  std::vector<SignalFunction> signals = {
      SignalFunction::identity(),        SignalFunction::affine(0.5, 0.25),
      SignalFunction::tanh_gain(1.0),    SignalFunction::tanh_gain(20.0),
      fig3_signal(),                     SignalFunction::quantizer_approx(0.5),
      SignalFunction::quantizer_approx(0.1),
  };
  std::vector<Graph> graphs;
  graphs.push_back(Graph::complete(5));
  graphs.push_back(Graph::line(6));
  for (const Graph& g : graphs) {
    for (const auto& s : signals) {
      CAPTURE(g.describe());
      CAPTURE(s.describe());
      for (const auto& v : classify_equilibria(g, s)) {
        if (v.stability == Stability::asymptotically_stable) {
          CHECK_FALSE(v.is_interval);
          CHECK(v.consistency == ConsistencyLabel::consistent);
        }
        if (v.stability == Stability::unstable)
          CHECK(v.consistency == ConsistencyLabel::inconsistent);
        if (v.stability == Stability::stable_not_asymptotic) CHECK(v.is_interval);
        CHECK(v.residual <= 1e-9);
        // the linearization hint must never contradict a definite verdict
        if (v.spectral_hint) {
          if (*v.spectral_hint > 1e-9) CHECK(v.stability == Stability::unstable);
          if (*v.spectral_hint < -1e-9) CHECK(v.stability == Stability::asymptotically_stable);
        }
      }
    }
  }
}

TEST_CASE("spectral_stability_hint: tanh at 0 is the marginal case") {
  const SpectralHint h = spectral_stability_hint(Graph::complete(4), SignalFunction::tanh_gain(1.0), 0.0);
  CHECK(h.slope == 1.0);
  CHECK(std::abs(h.max_eigenvalue) <= 1e-9);  // s'(0) mu_max - 1 = 0
  CHECK(h.verdict == SpectralHint::Verdict::inconclusive);
}

TEST_CASE("spectral_stability_hint: quantizer slope 2 gives +1 at the origin") {
  const SpectralHint h =
      spectral_stability_hint(Graph::complete(4), SignalFunction::quantizer_approx(0.5), 0.0);
  CHECK(h.slope == 2.0);
  CHECK(h.max_eigenvalue == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.verdict == SpectralHint::Verdict::unstable);
  // saturated branch at c = 1: slope 0, all eigenvalues -1
  const SpectralHint flat =
      spectral_stability_hint(Graph::complete(4), SignalFunction::quantizer_approx(0.5), 1.0);
  CHECK(flat.max_eigenvalue == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(flat.verdict == SpectralHint::Verdict::stable);
}

TEST_CASE("spectral_stability_hint: identity consensus spectrum is marginal") {
  const SpectralHint h =
      spectral_stability_hint(Graph::line(5), SignalFunction::identity(), 0.42);
  CHECK(h.max_eigenvalue == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(h.verdict == SpectralHint::Verdict::inconclusive);
  for (double lam : h.jacobian_eigenvalues) CHECK(lam <= 1e-12);
}

TEST_CASE("spectral_stability_hint requires a fixed point") {
  CHECK_THROWS_AS(spectral_stability_hint(Graph::complete(3), SignalFunction::tanh_gain(1.0), 0.3),
                  not_a_fixed_point);
}

TEST_CASE("lyapunov_trace: decreasing for a globally underestimating signal") {
  Rng rng(31);
  const Graph g = Graph::erdos_renyi(50, 0.2, rng);
  const auto s = SignalFunction::tanh_gain(1.0);
  Rng xrng(32);
  const Trajectory traj = integrate(g, s, StateVector::uniform_random(50, xrng), {.T = 20.0});
  const LyapunovTrace trace = lyapunov_trace(g, traj);
  CHECK(trace.max_increment <= 1e-9);
  for (double v : trace.values) CHECK(v >= 0.0);
  CHECK(trace.values.front() > trace.values.back());
}

TEST_CASE("lyapunov_trace: constant at equilibrium, shifted form near c") {
  const Graph g = Graph::complete(4);
  const auto s = SignalFunction::quantizer_approx(0.5);
  const Trajectory still = integrate(g, s, StateVector::synchronized(4, 1.0), {.T = 5.0});
  const LyapunovTrace flat = lyapunov_trace(g, still, 1.0);
  CHECK(flat.values.front() == 0.0);
  CHECK(flat.max_increment <= 1e-15);

  // inside the consistency neighborhood of c = 1 the shifted form decays
  const Trajectory near = integrate(g, s, StateVector::synchronized(4, 0.9), {.T = 5.0});
  const LyapunovTrace shifted = lyapunov_trace(g, near, 1.0);
  CHECK(shifted.max_increment <= 1e-9);
  CHECK(shifted.values.back() < shifted.values.front());
}

TEST_CASE("synchronization_status: immediate sync and non-sync") {
  const Graph g = Graph::complete(3);
  const Trajectory still =
      integrate(g, SignalFunction::identity(), StateVector::synchronized(3, 0.4), {.T = 1.0});
  const SyncStatus st = synchronization_status(still, 1e-9);
  REQUIRE(st.first_sync_time.has_value());
  CHECK(*st.first_sync_time == 0.0);
  REQUIRE(st.common_value.has_value());
  CHECK(*st.common_value == doctest::Approx(0.4).epsilon(1e-12));

  // line graph with a high-gain overestimating signal: clusters persist
  Rng rng(witness::fig4_x0_seed);
  const Graph line6 = Graph::line(6);
  const Trajectory stuck = integrate(line6, SignalFunction::tanh_gain(20.0),
                                     StateVector::uniform_random(6, rng), {.T = 100.0, .h = 0.001});
  const SyncStatus bad = synchronization_status(stuck, 1e-3);
  CHECK(bad.final_spread > 0.5);
  CHECK_FALSE(bad.common_value.has_value());
}

TEST_CASE("basin_probe: quantizer cells are the half boxes with corner targets") {
  const Graph g = Graph::complete(4);
  const BasinReport rep = basin_probe(g, SignalFunction::quantizer_approx(0.5), 12, 77);
  REQUIRE(rep.inconsistent_points.size() == 1);
  CHECK(std::abs(rep.inconsistent_points[0]) <= 1e-9);
  REQUIRE(rep.cells.size() == 2);
  CHECK_FALSE(rep.trivial_cell);

  const CellReport& lower = rep.cells[0];
  CHECK(lower.lo == doctest::Approx(-1.0));
  CHECK(lower.hi == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_FALSE(lower.lower_is_inconsistent);
  CHECK(lower.upper_is_inconsistent);
  REQUIRE(lower.target_points.size() == 1);
  CHECK(lower.target_points[0] == doctest::Approx(-1.0));

  for (const CellReport& cell : rep.cells) {
    CHECK(cell.samples == 12);
    CHECK(cell.stayed_in_box == 12);
    CHECK(cell.converged_to_target == 12);
    CHECK(cell.direct_hits == 12);  // exponential approach to the corner
    CHECK(cell.max_box_excursion <= 1e-9);
  }
  // globally overestimating: the corollary half-box runs are included
  REQUIRE(rep.half_boxes.size() == 2);
  for (const auto& half : rep.half_boxes) CHECK(half.converged_to_fixed == half.samples);
}

TEST_CASE("basin_probe: no inconsistent points gives the trivial cell") {
  const Graph g = Graph::complete(5);
  const BasinReport rep = basin_probe(g, SignalFunction::tanh_gain(1.0), 8, 5);
  CHECK(rep.trivial_cell);
  REQUIRE(rep.cells.size() == 1);
  const CellReport& cell = rep.cells[0];
  CHECK(cell.lo == -1.0);
  CHECK(cell.hi == 1.0);
  REQUIRE(cell.target_points.size() == 1);
  CHECK(std::abs(cell.target_points[0]) <= 1e-9);
  // all synchronize; the crawl toward 0 is cubic, so these are certified
  // by synchronization inside the cell rather than direct hits
  CHECK(cell.converged_to_target == 8);
  CHECK(cell.worst_target_distance < 0.5);
  CHECK(rep.half_boxes.empty());  // underestimating signal
}

TEST_CASE("basin_probe: sine signal attracts the half boxes into the identity wings") {
  Rng rng(41);
  const Graph g = Graph::erdos_renyi(30, 0.2, rng);
  const BasinReport rep = basin_probe(g, fig3_signal(), 10, 99);
  REQUIRE(rep.cells.size() == 2);
  const CellReport& upper = rep.cells[1];
  CHECK(upper.lo == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(upper.hi == doctest::Approx(1.0));
  REQUIRE(upper.target_intervals.size() == 1);
  CHECK(upper.target_intervals[0].first == doctest::Approx(0.8).epsilon(1e-5));
  CHECK(upper.stayed_in_box == 10);
  CHECK(upper.converged_to_target == 10);
  REQUIRE(rep.half_boxes.size() == 2);
  for (const auto& half : rep.half_boxes) CHECK(half.converged_to_fixed == half.samples);
}

TEST_CASE("basin_probe: determinism across thread counts") {
  const Graph g = Graph::complete(4);
  BasinOptions serial;
  serial.threads = 1;
  BasinOptions parallel;
  parallel.threads = 4;
  const BasinReport a = basin_probe(g, SignalFunction::quantizer_approx(0.5), 8, 123, serial);
  const BasinReport b = basin_probe(g, SignalFunction::quantizer_approx(0.5), 8, 123, parallel);
  REQUIRE(a.cells.size() == b.cells.size());
  for (size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].converged_to_target == b.cells[i].converged_to_target);
    CHECK(a.cells[i].max_box_excursion == b.cells[i].max_box_excursion);
  }
}

TEST_CASE("pairwise_sync_check: complete graph pairs decay monotonically") {
  const Graph g = Graph::complete(5);
  Rng rng(51);
  const Trajectory traj =
      integrate(g, fig3_signal(), StateVector::uniform_random(5, rng), {.T = 20.0});
  const auto reports = pairwise_sync_check(g, traj);
  REQUIRE(reports.size() == 10);
  for (const auto& rep : reports) {
    CAPTURE(rep.i);
    CAPTURE(rep.j);
    CHECK(rep.monotone);
    CHECK(rep.decayed);
    CHECK(rep.final_gap <= 1e-6);
  }
}

TEST_CASE("pairwise_sync_check: line(3) endpoints pair off even without global sync") {
  const Graph g = Graph::line(3);
  Rng rng(52);
  const Trajectory traj = integrate(g, SignalFunction::tanh_gain(20.0),
                                    StateVector::uniform_random(3, rng), {.T = 40.0, .h = 0.001});
  const auto reports = pairwise_sync_check(g, traj);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].i == 0);
  CHECK(reports[0].j == 2);
  CHECK(reports[0].monotone);
  CHECK(reports[0].final_gap <= 1e-3);
}

TEST_CASE("pairwise_sync_check: synchronized start keeps all gaps at zero") {
  const Graph g = Graph::complete(4);
  const Trajectory traj =
      integrate(g, SignalFunction::tanh_gain(1.0), StateVector::synchronized(4, 0.2), {.T = 5.0});
  for (const auto& rep : pairwise_sync_check(g, traj)) {
    CHECK(rep.initial_gap == 0.0);
    CHECK(rep.final_gap <= 1e-12);
    CHECK(rep.monotone);
  }
}

TEST_CASE("equilibria iff fixed points: random synchronized states") {
  // f(c 1) vanishes exactly when s(c) = c, at matching tolerance
  std::vector<Graph> graphs;
  graphs.push_back(Graph::complete(5));
  graphs.push_back(Graph::line(6));
  const auto s = SignalFunction::tanh_gain(20.0);
  Rng rng(61);
  for (const Graph& g : graphs) {
    for (int trial = 0; trial < 2000; ++trial) {
      const double c = rng.uniform(-1.0, 1.0);
      const auto f = vector_field(g, s, std::vector<double>(g.size(), c));
      double norm = 0.0;
      for (double v : f) norm = std::max(norm, std::abs(v));
      CHECK((norm <= 1e-9) == (std::abs(s(c) - c) <= 1e-9));
    }
  }
}

TEST_CASE("perturbation_check: AS points recover, unstable points escape") {
  const Graph g = Graph::complete(5);
  const auto s = SignalFunction::quantizer_approx(0.5);
  PerturbationOptions opts;
  opts.attempts = 8;
  const PerturbationReport as = perturbation_check(g, s, 1.0, 7, opts);
  CHECK(as.returned == as.attempts);
  CHECK(as.worst_return_distance <= 1e-4);
  PerturbationOptions unstable_opts;
  unstable_opts.attempts = 16;
  const PerturbationReport un = perturbation_check(g, s, 0.0, 7, unstable_opts);
  CHECK(un.escaped >= 1);
}

TEST_CASE("analysis report serializes to parseable JSON with verdict fields") {
  const Graph g = Graph::complete(3);
  AnalysisReport report;
  report.equilibria = classify_equilibria(g, SignalFunction::quantizer_approx(0.5));
  std::ostringstream os;
  write_json(os, report);
  const std::string text = os.str();
  CHECK(text.find("\"equilibria\"") != std::string::npos);
  CHECK(text.find("\"unstable\"") != std::string::npos);
  CHECK(text.find("\"asymptotically_stable\"") != std::string::npos);
  CHECK(text.find("\"lyapunov\"") != std::string::npos);
}
