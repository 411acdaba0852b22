#include "nlc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "emit.hpp"

namespace nlc {

namespace {

constexpr double kStateSlack = 1e-12;

void check_dimensions(const Graph& g, size_t n, const char* who) {
  if (static_cast<size_t>(g.size()) != n)
    throw error(std::string(who) + ": state dimension " + std::to_string(n) +
                " does not match graph size " + std::to_string(g.size()));
}

}  // namespace

StateVector::StateVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw error("StateVector: empty state");
  for (double& v : values_) {
    if (!std::isfinite(v)) throw error("StateVector: non-finite component");
    if (v > 1.0 + kStateSlack || v < -1.0 - kStateSlack)
      throw error("StateVector: component outside [-1,1]: " + std::to_string(v));
    v = std::clamp(v, -1.0, 1.0);
  }
}

StateVector StateVector::synchronized(int n, double c) {
  return StateVector(std::vector<double>(n, c));
}

StateVector StateVector::uniform_random(int n, Rng& rng) {
  return uniform_random_box(n, -1.0, 1.0, rng);
}

StateVector StateVector::uniform_random_box(int n, double lo, double hi, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return StateVector(std::move(v));
}

double spread_of(std::span<const double> x) {
  auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  return *mx - *mn;
}

double mean_of(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double StateVector::spread() const { return spread_of(values_); }
double StateVector::mean() const { return mean_of(values_); }

namespace {

/// Reusable f(x) = D^-1 A s(x) - x evaluation. Signal values are computed
/// once per agent and accumulated over neighbor lists; summation order is
/// fixed, so results are bit-reproducible.
struct FieldScratch {
  std::vector<double> sbuf;

  void eval(const Graph& g, const SignalFunction& s, std::span<const double> x,
            std::span<double> out) {
    const int n = g.size();
    sbuf.resize(n);
    for (int i = 0; i < n; ++i) sbuf[i] = s.eval_extended(x[i]);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j : g.neighbors(i)) acc += sbuf[j];
      out[i] = acc / g.degree(i) - x[i];
    }
  }
};

}  // namespace

std::vector<double> vector_field(const Graph& g, const SignalFunction& s,
                                 std::span<const double> x) {
  check_dimensions(g, x.size(), "vector_field");
  std::vector<double> out(x.size());
  FieldScratch scratch;
  scratch.eval(g, s, x, out);
  return out;
}

double default_step(const SignalFunction& s) { return s.lipschitz_bound() > 10.0 ? 0.001 : 0.01; }

std::span<const double> Trajectory::state(int k) const {
  return {states_.data() + static_cast<size_t>(k) * n_, static_cast<size_t>(n_)};
}

Trajectory integrate(const Graph& g, const SignalFunction& s, const StateVector& x0,
                     const IntegrateOptions& opts) {
  check_dimensions(g, x0.values().size(), "integrate");
  if (!(opts.h > 0.0) || opts.h > 0.1) throw error("integrate: need 0 < h <= 0.1");
  if (!(opts.T >= opts.h)) throw error("integrate: need T >= h");
  if (opts.max_frames < 2) throw error("integrate: need max_frames >= 2");

  const int n = g.size();
  const int steps = std::max(1, static_cast<int>(std::llround(opts.T / opts.h)));
  const int stride = std::max(1, (steps + opts.max_frames - 2) / (opts.max_frames - 1));

  Trajectory traj;
  traj.n_ = n;
  traj.meta_.graph = g.describe();
  traj.meta_.signal = s.describe();
  traj.meta_.T = opts.T;
  traj.meta_.h = opts.h;
  traj.meta_.total_steps = steps;
  traj.meta_.stride = stride;
  if (!g.connected())
    traj.meta_.warnings.push_back("graph is not connected; components evolve independently");

  std::vector<double> x = x0.values();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
  FieldScratch scratch;

  const auto record = [&](double t) {
    traj.times_.push_back(t);
    traj.states_.insert(traj.states_.end(), x.begin(), x.end());
  };

  double max_excursion = 0.0;
  double max_watch = 0.0;
  const auto observe = [&]() {
    if (!opts.watch_box) return;
    const auto [lo, hi] = *opts.watch_box;
    for (double v : x) {
      if (v < lo) max_watch = std::max(max_watch, lo - v);
      if (v > hi) max_watch = std::max(max_watch, v - hi);
    }
  };

  record(0.0);
  observe();
  for (int step = 1; step <= steps; ++step) {
    scratch.eval(g, s, x, k1);
    for (int i = 0; i < n; ++i) stage[i] = x[i] + 0.5 * opts.h * k1[i];
    scratch.eval(g, s, stage, k2);
    for (int i = 0; i < n; ++i) stage[i] = x[i] + 0.5 * opts.h * k2[i];
    scratch.eval(g, s, stage, k3);
    for (int i = 0; i < n; ++i) stage[i] = x[i] + opts.h * k3[i];
    scratch.eval(g, s, stage, k4);
    for (int i = 0; i < n; ++i)
      x[i] += opts.h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    // The exact flow never leaves [-1,1]^N; integrator overshoot up to the
    // projection tolerance is logged and projected, anything larger aborts.
    for (int i = 0; i < n; ++i) {
      const double excursion = std::abs(x[i]) - 1.0;
      if (excursion > 0.0) {
        if (excursion > opts.projection_tol)
          throw invariance_violation(
              "integrate: state left [-1,1] by " + std::to_string(excursion) +
                  " at t = " + std::to_string(step * opts.h) +
                  " (step size too large for this signal?)",
              excursion);
        max_excursion = std::max(max_excursion, excursion);
        x[i] = std::clamp(x[i], -1.0, 1.0);
      }
    }
    observe();
    if (step % stride == 0 || step == steps) record(step * opts.h);
  }

  traj.meta_.max_box_excursion = max_excursion;
  traj.meta_.max_watch_excursion = max_watch;
  return traj;
}

MonitorReport invariance_monitor(const Trajectory& traj, double sync_tol) {
  MonitorReport rep;
  rep.sync_tol = sync_tol;
  rep.max_box_excursion = traj.meta().max_box_excursion;
  for (int k = 0; k < traj.frame_count(); ++k)
    for (double v : traj.state(k))
      rep.max_box_excursion = std::max(rep.max_box_excursion, std::abs(v) - 1.0);
  rep.max_box_excursion = std::max(rep.max_box_excursion, 0.0);

  rep.initial_spread = spread_of(traj.initial_state());
  rep.synchronized_start = rep.initial_spread <= sync_tol;
  if (rep.synchronized_start) {
    for (int k = 1; k < traj.frame_count(); ++k)
      rep.max_spread_after_start = std::max(rep.max_spread_after_start, spread_of(traj.state(k)));
  }
  return rep;
}

void Trajectory::write_csv(std::ostream& out) const {
  out << "t";
  for (int i = 1; i <= n_; ++i) out << ",x" << i;
  out << "\n";
  for (int k = 0; k < frame_count(); ++k) {
    out << emit::g17(times_[k]);
    for (double v : state(k)) out << ',' << emit::g17(v);
    out << "\n";
  }
}

void Trajectory::write_json(std::ostream& out) const {
  emit::Object root(out);
  root.field("schema", 1);
  {
    auto meta = root.object("metadata");
    meta.field("graph", meta_.graph);
    meta.field("signal", meta_.signal);
    meta.field("T", meta_.T);
    meta.field("h", meta_.h);
    meta.field("total_steps", meta_.total_steps);
    meta.field("stride", meta_.stride);
    if (meta_.seed)
      meta.field("seed", *meta_.seed);
    else
      meta.null_field("seed");
    meta.field("max_box_excursion", meta_.max_box_excursion);
    auto warn = meta.array("warnings");
    for (const auto& w : meta_.warnings) warn.value(w);
  }
  {
    auto times = root.array("times");
    for (double t : times_) times.value(t);
  }
  {
    auto frames = root.array("states");
    for (int k = 0; k < frame_count(); ++k) {
      auto row = frames.array();
      for (double v : state(k)) row.value(v);
    }
  }
}

}  // namespace nlc
