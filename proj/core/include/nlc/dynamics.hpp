#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlc/graph.hpp"
#include "nlc/random.hpp"
#include "nlc/signal.hpp"

namespace nlc {

/// Agent states x in [-1,1]^N. Construction projects round-off excursions
/// (<= 1e-12) back into the box and rejects anything larger.
class StateVector {
 public:
  explicit StateVector(std::vector<double> values);

  static StateVector synchronized(int n, double c);
  static StateVector uniform_random(int n, Rng& rng);  // U[-1,1]^N
  static StateVector uniform_random_box(int n, double lo, double hi, Rng& rng);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  double spread() const;  // max_i x_i - min_i x_i
  double mean() const;

 private:
  std::vector<double> values_;
};

double spread_of(std::span<const double> x);
double mean_of(std::span<const double> x);

/// The right-hand side f(x) = D^-1 A s(x) - x, evaluated per agent as
/// (1/d_i) sum_{j in N_i} s(x_j) - x_i. Throws on dimension mismatch.
std::vector<double> vector_field(const Graph& g, const SignalFunction& s,
                                 std::span<const double> x);

struct IntegrateOptions {
  double T = 20.0;
  double h = 0.01;              // fixed RK4 step, 0 < h <= 0.1
  int max_frames = 2000;        // stored frames are decimated to this many
  double projection_tol = 1e-9; // box excursions beyond this abort
  // Optional observation box: max excursion outside [lo,hi]^N is recorded
  // at every step (used for attraction-cell containment checks).
  std::optional<std::pair<double, double>> watch_box;
  // Recorded in the trajectory metadata (the seed that produced x0).
  std::optional<std::uint64_t> seed;
};

/// Step size the scenarios use: 0.01, lowered to 0.001 for signals with
/// Lipschitz bound above 10 (high-gain tanh, sharp quantizer ramps).
double default_step(const SignalFunction& s);

struct TrajectoryMeta {
  std::string graph;
  std::string signal;
  double T = 0.0;
  double h = 0.0;
  int total_steps = 0;
  int stride = 1;
  std::optional<std::uint64_t> seed;
  double max_box_excursion = 0.0;    // over all integration steps
  double max_watch_excursion = 0.0;  // outside watch_box, if set
  std::vector<std::string> warnings;
};

/// Time samples of one integration. Frames are a decimated view (every
/// `stride` steps plus the final state); the box-excursion statistics in
/// the metadata cover every step, not just stored frames.
class Trajectory {
 public:
  int frame_count() const { return static_cast<int>(times_.size()); }
  int agents() const { return n_; }
  double time(int k) const { return times_[k]; }
  std::span<const double> state(int k) const;
  const std::vector<double>& times() const { return times_; }
  std::span<const double> initial_state() const { return state(0); }
  std::span<const double> final_state() const { return state(frame_count() - 1); }
  const TrajectoryMeta& meta() const { return meta_; }

  /// CSV with header t,x1,...,xn; 17 significant digits.
  void write_csv(std::ostream& out) const;
  /// JSON mirroring frames and metadata; 17 significant digits.
  void write_json(std::ostream& out) const;

 private:
  friend Trajectory integrate(const Graph&, const SignalFunction&, const StateVector&,
                              const IntegrateOptions&);
  int n_ = 0;
  std::vector<double> times_;
  std::vector<double> states_;  // frame-major, frame_count * n
  TrajectoryMeta meta_;
};

/// Classical fixed-step RK4 from t=0 to T. After every step, components
/// outside [-1,1] by at most projection_tol are projected back and the
/// excursion recorded; larger excursions throw invariance_violation.
/// A disconnected graph is recorded as a warning, not an error.
Trajectory integrate(const Graph& g, const SignalFunction& s, const StateVector& x0,
                     const IntegrateOptions& opts = {});

struct MonitorReport {
  double max_box_excursion = 0.0;  // over stored frames and integrator log
  bool synchronized_start = false; // was spread(x0) <= sync_tol
  double initial_spread = 0.0;
  double max_spread_after_start = 0.0;  // only meaningful for sync starts
  double sync_tol = 0.0;
};

/// Prop-style invariance diagnostics: box containment always, and spread
/// growth when the initial state was synchronized.
MonitorReport invariance_monitor(const Trajectory& traj, double sync_tol = 1e-9);

}  // namespace nlc
