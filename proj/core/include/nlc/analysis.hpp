#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlc/dynamics.hpp"
#include "nlc/graph.hpp"
#include "nlc/signal.hpp"

namespace nlc {

enum class Stability {
  asymptotically_stable,
  stable_not_asymptotic,
  unstable,
  ambiguous,
};
std::string to_string(Stability s);

/// Verdict for one synchronization equilibrium S_c (or S_I for a perfect
/// interval I). Stability follows the sign-pattern characterization:
/// consistent isolated points are asymptotically stable, consistent
/// intervals are stable but not asymptotically (their points are not
/// isolated), inconsistent elements are unstable.
struct EquilibriumVerdict {
  bool is_interval = false;
  double location = 0.0;      // point, or interval lower end
  double location_hi = 0.0;   // == location for points
  ConsistencyLabel consistency = ConsistencyLabel::ambiguous;
  Stability stability = Stability::ambiguous;
  double residual = 0.0;      // ||f(c 1)||_inf on the given graph
  std::optional<double> spectral_hint;  // max eigenvalue of s'(c) D^-1 A - I
};

struct ClassifyOptions {
  FixedPointOptions fixed_points;
  ConsistencyOptions consistency;
  bool with_spectral_hint = true;
};

/// One verdict per element of the fixed point set. Requires a connected
/// graph.
std::vector<EquilibriumVerdict> classify_equilibria(const Graph& g, const SignalFunction& s,
                                                    const ClassifyOptions& opts = {});

struct SpectralHint {
  std::vector<double> jacobian_eigenvalues;  // s'(c) mu_i - 1, ascending
  double max_eigenvalue = 0.0;
  double slope = 0.0;  // s'(c)
  enum class Verdict { stable, unstable, inconclusive } verdict = Verdict::inconclusive;
};

/// Linearization cross-check at the synchronized fixed point c. The sign
/// test is the authority; this is inconclusive exactly at the s'(c) mu = 1
/// margin (e.g. tanh at 0). Throws not_a_fixed_point when s(c) != c.
SpectralHint spectral_stability_hint(const Graph& g, const SignalFunction& s, double c,
                                     double tol = 1e-9);

struct LyapunovTrace {
  std::vector<double> times;
  std::vector<double> values;   // V(x(t)) = (x - c 1)^T D (x - c 1) / 2
  double max_increment = 0.0;   // largest rise between consecutive frames
  double center = 0.0;
};

/// Degree-weighted quadratic form along a trajectory; center shifts the
/// form to (x - c 1). Non-increasing along exact flows for globally
/// underestimating signals (center 0) and inside consistency neighborhoods
/// (center c), so the max increment measures integrator error.
LyapunovTrace lyapunov_trace(const Graph& g, const Trajectory& traj, double center = 0.0);

struct SyncStatus {
  double final_spread = 0.0;
  std::optional<double> first_sync_time;  // first stored frame with spread < tol
  std::optional<double> common_value;     // mean of final state when synced
  double tol = 0.0;
};

SyncStatus synchronization_status(const Trajectory& traj, double tol = 1e-3);

/// One attraction cell [lo, hi]^N between consecutive inconsistent fixed
/// points (or a consistent domain boundary).
struct CellReport {
  double lo = 0.0, hi = 0.0;
  bool lower_is_inconsistent = false;  // cell wall provenance
  bool upper_is_inconsistent = false;
  std::vector<double> target_points;                      // C inside the cell
  std::vector<std::pair<double, double>> target_intervals;
  bool target_missing = false;  // flagged; the attraction target should never be empty
  int samples = 0;
  int stayed_in_box = 0;       // never left [lo,hi]^N beyond the projection tol
  // Synchronized onto C (direct hit within target_tol) or synchronized
  // strictly inside the cell away from inconsistent walls, from where the
  // synchronized scalar flow is pinned to C.
  int converged_to_target = 0;
  int direct_hits = 0;
  double max_box_excursion = 0.0;
  double worst_target_distance = 0.0;
};

struct HalfBoxReport {
  double lo = 0.0, hi = 0.0;  // [0,1] and [-1,0]
  int samples = 0;
  int converged_to_fixed = 0;  // synchronized to some fixed point of s
  double worst_target_distance = 0.0;
};

struct BasinReport {
  std::vector<double> inconsistent_points;  // ordered k_1 < ... < k_m
  bool trivial_cell = false;                // fallback single cell [-1,1]^N
  std::vector<CellReport> cells;
  // The half-box experiment runs when s is globally overestimating:
  // starts in [0,1]^N and [-1,0]^N must reach a synchronized fixed point.
  std::vector<HalfBoxReport> half_boxes;
};

struct BasinOptions {
  double T = 40.0;
  double h = 0.0;           // 0: default_step(s)
  double sync_tol = 1e-3;
  double target_tol = 1e-3;
  double containment_tol = 1e-9;
  int max_frames = 500;
  int threads = 0;          // 0: hardware concurrency
};

/// Samples `samples` uniform initial states per attraction cell (corner
/// states excluded), integrates each with a per-sample derived seed, and
/// verifies box containment plus convergence to the synchronized fixed
/// points inside the cell. Deterministic in (seed, samples) regardless of
/// scheduling.
BasinReport basin_probe(const Graph& g, const SignalFunction& s, int samples,
                        std::uint64_t seed, const BasinOptions& opts = {});

/// Per-pair synchronization check for topology-symmetric pairs.
struct PairSyncReport {
  int i = 0, j = 0;
  double initial_gap = 0.0;
  double final_gap = 0.0;
  double max_monotonicity_violation = 0.0;  // largest rise of |delta| between frames
  bool monotone = false;                    // within slack
  bool decayed = false;                     // final <= exp(-T/2) initial + tol
};

struct PairSyncOptions {
  double slack = 1e-9;  // allowed |delta| rise between consecutive frames
  double tol = 1e-9;    // additive tolerance on the decay bound
};

/// Verifies that |x_i(t) - x_j(t)| is non-increasing and beats the
/// conservative exp(-T/2) decay bound for every symmetric pair of g.
/// (The sign analysis of the pair dynamics gives decay at rate >= 1; the
/// bound checked here is deliberately looser.)
std::vector<PairSyncReport> pairwise_sync_check(const Graph& g, const Trajectory& traj,
                                                const PairSyncOptions& opts = {});

struct PerturbationReport {
  double center = 0.0;
  int attempts = 0;
  int returned = 0;   // back within return_tol of c 1 at time T
  int escaped = 0;    // left the escape_radius ball at some frame
  double worst_return_distance = 0.0;
};

struct PerturbationOptions {
  double size = 1e-2;
  double T = 40.0;
  double h = 0.0;  // 0: default_step(s)
  double return_tol = 1e-4;
  double escape_radius = 1e-1;
  int attempts = 16;
};

/// Integrates from c 1 + eta for random sign patterns eta (clamped into the
/// box) and reports how many runs returned to c and how many escaped.
PerturbationReport perturbation_check(const Graph& g, const SignalFunction& s, double c,
                                      std::uint64_t seed, const PerturbationOptions& opts = {});

/// Aggregate report serialization (equilibria + sync + lyapunov + optional
/// basin) as JSON with 17 significant digits.
struct AnalysisReport {
  std::vector<EquilibriumVerdict> equilibria;
  std::optional<SyncStatus> sync;
  std::optional<double> lyapunov_max_increment;
  double lyapunov_center = 0.0;
  std::optional<BasinReport> basin;
};

void write_json(std::ostream& out, const AnalysisReport& report);

}  // namespace nlc
