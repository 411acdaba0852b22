#include "nlc/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "emit.hpp"

namespace nlc {

std::string to_string(Stability s) {
  switch (s) {
    case Stability::asymptotically_stable: return "asymptotically_stable";
    case Stability::stable_not_asymptotic: return "stable_not_asymptotic";
    case Stability::unstable: return "unstable";
    case Stability::ambiguous: return "ambiguous";
  }
  return "?";
}

namespace {

Stability stability_from(ConsistencyLabel label, bool isolated) {
  switch (label) {
    case ConsistencyLabel::consistent:
      // Consistent + isolated is asymptotically stable; points of a
      // perfect interval are fixed points themselves, hence stable but
      // not attracting.
      return isolated ? Stability::asymptotically_stable : Stability::stable_not_asymptotic;
    case ConsistencyLabel::inconsistent:
      return Stability::unstable;
    case ConsistencyLabel::ambiguous:
      return Stability::ambiguous;
  }
  return Stability::ambiguous;
}

double equilibrium_residual(const Graph& g, const SignalFunction& s, double c) {
  const auto f = vector_field(g, s, std::vector<double>(g.size(), c));
  double worst = 0.0;
  for (double v : f) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace

std::vector<EquilibriumVerdict> classify_equilibria(const Graph& g, const SignalFunction& s,
                                                    const ClassifyOptions& opts) {
  if (!g.connected()) throw graph_error("classify_equilibria requires a connected graph");
  const FixedPointSet set = analyze_fixed_points(s, opts.fixed_points, opts.consistency);

  std::vector<EquilibriumVerdict> verdicts;
  for (const auto& p : set.isolated) {
    EquilibriumVerdict v;
    v.is_interval = false;
    v.location = v.location_hi = p.location;
    v.consistency = p.consistency;
    v.stability = stability_from(p.consistency, /*isolated=*/true);
    v.residual = equilibrium_residual(g, s, p.location);
    if (opts.with_spectral_hint)
      v.spectral_hint = spectral_stability_hint(g, s, p.location).max_eigenvalue;
    verdicts.push_back(std::move(v));
  }
  for (const auto& iv : set.intervals) {
    EquilibriumVerdict v;
    v.is_interval = true;
    v.location = iv.lo;
    v.location_hi = iv.hi;
    v.consistency = iv.consistency;
    v.stability = stability_from(iv.consistency, /*isolated=*/false);
    v.residual = std::max(equilibrium_residual(g, s, iv.lo),
                          equilibrium_residual(g, s, 0.5 * (iv.lo + iv.hi)));
    verdicts.push_back(std::move(v));
  }
  std::sort(verdicts.begin(), verdicts.end(),
            [](const auto& a, const auto& b) { return a.location < b.location; });
  return verdicts;
}

SpectralHint spectral_stability_hint(const Graph& g, const SignalFunction& s, double c,
                                     double tol) {
  if (std::abs(s(c) - c) > 1e-9)
    throw not_a_fixed_point("spectral_stability_hint: s(c) != c at c = " + std::to_string(c));

  SpectralHint hint;
  hint.slope = s.slope_at(c);

  // Eigenvalues of s'(c) D^-1 A - I are s'(c) mu_i - 1 with mu_i the
  // (real) spectrum of the normalized adjacency.
  const EigenSummary spec = spectral_check(g, tol);
  hint.jacobian_eigenvalues.reserve(spec.eigenvalues.size());
  for (double mu : spec.eigenvalues) hint.jacobian_eigenvalues.push_back(hint.slope * mu - 1.0);
  std::sort(hint.jacobian_eigenvalues.begin(), hint.jacobian_eigenvalues.end());
  hint.max_eigenvalue = hint.jacobian_eigenvalues.back();

  if (hint.max_eigenvalue > tol)
    hint.verdict = SpectralHint::Verdict::unstable;
  else if (hint.max_eigenvalue < -tol)
    hint.verdict = SpectralHint::Verdict::stable;
  else
    hint.verdict = SpectralHint::Verdict::inconclusive;
  return hint;
}

LyapunovTrace lyapunov_trace(const Graph& g, const Trajectory& traj, double center) {
  if (g.size() != traj.agents())
    throw error("lyapunov_trace: trajectory dimension does not match graph");
  LyapunovTrace trace;
  trace.center = center;
  trace.times = traj.times();
  trace.values.reserve(traj.frame_count());
  for (int k = 0; k < traj.frame_count(); ++k) {
    const auto x = traj.state(k);
    double v = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double d = x[i] - center;
      v += g.degree(i) * d * d;
    }
    trace.values.push_back(0.5 * v);
  }
  for (size_t k = 1; k < trace.values.size(); ++k)
    trace.max_increment = std::max(trace.max_increment, trace.values[k] - trace.values[k - 1]);
  return trace;
}

SyncStatus synchronization_status(const Trajectory& traj, double tol) {
  SyncStatus st;
  st.tol = tol;
  st.final_spread = spread_of(traj.final_state());
  for (int k = 0; k < traj.frame_count(); ++k) {
    if (spread_of(traj.state(k)) < tol) {
      st.first_sync_time = traj.time(k);
      break;
    }
  }
  if (st.final_spread < tol) st.common_value = mean_of(traj.final_state());
  return st;
}

namespace {

/// Runs fn(i) for i in [0, count) over a small worker pool; each index is
/// processed exactly once and writes only its own slot, so the result is
/// independent of scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct SampleOutcome {
  bool stayed = true;
  double excursion = 0.0;
  double final_spread = 0.0;
  double common = 0.0;
  double target_distance = std::numeric_limits<double>::infinity();
};

double distance_to_targets(double v, const std::vector<double>& points,
                           const std::vector<std::pair<double, double>>& intervals) {
  double best = std::numeric_limits<double>::infinity();
  for (double p : points) best = std::min(best, std::abs(v - p));
  for (auto [lo, hi] : intervals) {
    if (v >= lo && v <= hi)
      best = 0.0;
    else
      best = std::min(best, std::min(std::abs(v - lo), std::abs(v - hi)));
  }
  return best;
}

SampleOutcome probe_sample(const Graph& g, const SignalFunction& s, double lo, double hi,
                           Rng rng, const std::vector<double>& target_points,
                           const std::vector<std::pair<double, double>>& target_intervals,
                           const BasinOptions& opts) {
  StateVector x0 = StateVector::uniform_random_box(g.size(), lo, hi, rng);
  // Corner states are excluded from the cells; a uniform draw hits them
  // with probability zero, but degenerate boxes could not, so guard anyway.
  if (spread_of(x0.values()) == 0.0 && (x0[0] == lo || x0[0] == hi))
    x0 = StateVector::uniform_random_box(g.size(), lo, hi, rng);

  IntegrateOptions iopts;
  iopts.T = opts.T;
  iopts.h = opts.h > 0 ? opts.h : default_step(s);
  iopts.max_frames = opts.max_frames;
  iopts.watch_box = std::make_pair(lo, hi);
  const Trajectory traj = integrate(g, s, x0, iopts);

  SampleOutcome out;
  out.excursion = traj.meta().max_watch_excursion;
  out.stayed = out.excursion <= opts.containment_tol;
  out.final_spread = spread_of(traj.final_state());
  out.common = mean_of(traj.final_state());
  out.target_distance = distance_to_targets(out.common, target_points, target_intervals);
  return out;
}

/// A sample counts as converged when it synchronized either directly onto
/// the target set, or strictly inside the cell away from the inconsistent
/// walls: from there the synchronized scalar flow v' = s(v) - v can only
/// run into a fixed point of the cell, so the limit is certified even when
/// a slow tail (e.g. the cubic tanh decay toward 0) has not closed the
/// distance within the horizon.
bool sample_converged(const SampleOutcome& o, double lo, double hi, bool lo_inconsistent,
                      bool hi_inconsistent, const BasinOptions& opts) {
  if (!(o.final_spread < opts.sync_tol)) return false;
  if (o.target_distance <= opts.target_tol) return true;
  const double lo_margin = lo_inconsistent ? opts.target_tol : 0.0;
  const double hi_margin = hi_inconsistent ? opts.target_tol : 0.0;
  return o.common > lo + lo_margin && o.common < hi - hi_margin;
}

}  // namespace

BasinReport basin_probe(const Graph& g, const SignalFunction& s, int samples,
                        std::uint64_t seed, const BasinOptions& opts) {
  if (samples < 1) throw error("basin_probe: need at least one sample");
  const FixedPointSet set = analyze_fixed_points(s);
  const Rng root(seed);

  BasinReport report;
  for (const auto& p : set.isolated)
    if (p.consistency == ConsistencyLabel::inconsistent)
      report.inconsistent_points.push_back(p.location);

  // Cell walls: inconsistent fixed points, extended to a domain boundary
  // when the boundary itself is a consistent fixed value (an isolated
  // consistent point at +-1 or a perfect interval reaching it).
  const auto boundary_is_consistent_fixed = [&](double b) {
    for (const auto& p : set.isolated)
      if (std::abs(p.location - b) <= set.merge_tol &&
          p.consistency == ConsistencyLabel::consistent)
        return true;
    for (const auto& iv : set.intervals)
      if (b >= iv.lo - set.merge_tol && b <= iv.hi + set.merge_tol &&
          iv.consistency != ConsistencyLabel::inconsistent)
        return true;
    return false;
  };

  std::vector<double> walls = report.inconsistent_points;
  std::vector<char> wall_inconsistent(walls.size(), 1);
  if (boundary_is_consistent_fixed(-1.0) && (walls.empty() || walls.front() > -1.0 + set.merge_tol)) {
    walls.insert(walls.begin(), -1.0);
    wall_inconsistent.insert(wall_inconsistent.begin(), 0);
  }
  if (boundary_is_consistent_fixed(1.0) && (walls.empty() || walls.back() < 1.0 - set.merge_tol)) {
    walls.push_back(1.0);
    wall_inconsistent.push_back(0);
  }

  if (walls.size() < 2) {
    // Fewer than two walls: probe the whole box, targeting every fixed point.
    report.trivial_cell = true;
    CellReport cell;
    cell.lo = -1.0;
    cell.hi = 1.0;
    for (const auto& p : set.isolated) cell.target_points.push_back(p.location);
    for (const auto& iv : set.intervals) cell.target_intervals.emplace_back(iv.lo, iv.hi);
    report.cells.push_back(std::move(cell));
  } else {
    for (size_t w = 0; w + 1 < walls.size(); ++w) {
      CellReport cell;
      cell.lo = walls[w];
      cell.hi = walls[w + 1];
      cell.lower_is_inconsistent = wall_inconsistent[w];
      cell.upper_is_inconsistent = wall_inconsistent[w + 1];
      // The attraction target C: fixed points strictly inside the cell,
      // plus a consistent wall itself (the domain-boundary extension; the
      // inner walls are inconsistent and excluded).
      for (const auto& p : set.isolated) {
        const bool interior = p.location > cell.lo + set.merge_tol && p.location < cell.hi - set.merge_tol;
        const bool lower_wall = !cell.lower_is_inconsistent && std::abs(p.location - cell.lo) <= set.merge_tol;
        const bool upper_wall = !cell.upper_is_inconsistent && std::abs(p.location - cell.hi) <= set.merge_tol;
        if (interior || lower_wall || upper_wall) cell.target_points.push_back(p.location);
      }
      for (const auto& iv : set.intervals) {
        const double lo = std::max(iv.lo, cell.lo);
        const double hi = std::min(iv.hi, cell.hi);
        if (lo <= hi) cell.target_intervals.emplace_back(lo, hi);
      }
      cell.target_missing = cell.target_points.empty() && cell.target_intervals.empty();
      report.cells.push_back(std::move(cell));
    }
  }

  for (size_t c = 0; c < report.cells.size(); ++c) {
    CellReport& cell = report.cells[c];
    if (cell.hi - cell.lo <= 0.0) throw error("basin_probe: zero-volume cell");
    if (cell.target_missing) continue;
    cell.samples = samples;
    std::vector<SampleOutcome> outcomes(samples);
    parallel_for(samples, opts.threads, [&](int i) {
      outcomes[i] = probe_sample(g, s, cell.lo, cell.hi,
                                 root.derive(1000003ULL * c + static_cast<std::uint64_t>(i)),
                                 cell.target_points, cell.target_intervals, opts);
    });
    for (const auto& o : outcomes) {
      cell.stayed_in_box += o.stayed;
      const bool converged = sample_converged(o, cell.lo, cell.hi, cell.lower_is_inconsistent,
                                              cell.upper_is_inconsistent, opts);
      cell.converged_to_target += converged;
      cell.direct_hits += o.target_distance <= opts.target_tol;
      cell.max_box_excursion = std::max(cell.max_box_excursion, o.excursion);
      if (converged) cell.worst_target_distance = std::max(cell.worst_target_distance, o.target_distance);
    }
  }

  // Corollary check for globally overestimating signals: every start in
  // [0,1]^N or [-1,0]^N reaches a synchronized fixed point.
  if (classify_estimation(s) == EstimationLabel::overestimation) {
    std::vector<double> all_points;
    std::vector<std::pair<double, double>> all_intervals;
    for (const auto& p : set.isolated) all_points.push_back(p.location);
    for (const auto& iv : set.intervals) all_intervals.emplace_back(iv.lo, iv.hi);
    int half_index = 0;
    for (auto [lo, hi] : {std::pair{0.0, 1.0}, std::pair{-1.0, 0.0}}) {
      HalfBoxReport half;
      half.lo = lo;
      half.hi = hi;
      half.samples = samples;
      std::vector<SampleOutcome> outcomes(samples);
      parallel_for(samples, opts.threads, [&, lo = lo, hi = hi](int i) {
        outcomes[i] = probe_sample(g, s, lo, hi,
                                   root.derive(7000003ULL * (half_index + 1) + static_cast<std::uint64_t>(i)),
                                   all_points, all_intervals, opts);
      });
      // wall at 0 may be an inconsistent fixed point; the outer wall +-1
      // belongs to the target set for overestimating signals
      const bool zero_wall_inconsistent =
          std::any_of(report.inconsistent_points.begin(), report.inconsistent_points.end(),
                      [&](double k) { return std::abs(k) <= set.merge_tol; });
      for (const auto& o : outcomes) {
        const bool converged = lo == 0.0
                                   ? sample_converged(o, lo, hi, zero_wall_inconsistent, false, opts)
                                   : sample_converged(o, lo, hi, false, zero_wall_inconsistent, opts);
        half.converged_to_fixed += converged;
        if (converged) half.worst_target_distance = std::max(half.worst_target_distance, o.target_distance);
      }
      report.half_boxes.push_back(std::move(half));
      ++half_index;
    }
  }
  return report;
}

std::vector<PairSyncReport> pairwise_sync_check(const Graph& g, const Trajectory& traj,
                                                const PairSyncOptions& opts) {
  if (g.size() != traj.agents())
    throw error("pairwise_sync_check: trajectory dimension does not match graph");
  std::vector<PairSyncReport> reports;
  const double T = traj.time(traj.frame_count() - 1);
  for (auto [i, j] : symmetric_pairs(g)) {
    PairSyncReport rep;
    rep.i = i;
    rep.j = j;
    rep.initial_gap = std::abs(traj.state(0)[i] - traj.state(0)[j]);
    double prev = rep.initial_gap;
    for (int k = 1; k < traj.frame_count(); ++k) {
      const double gap = std::abs(traj.state(k)[i] - traj.state(k)[j]);
      rep.max_monotonicity_violation = std::max(rep.max_monotonicity_violation, gap - prev);
      prev = gap;
    }
    rep.final_gap = prev;
    rep.monotone = rep.max_monotonicity_violation <= opts.slack;
    // The pair dynamics satisfy d|delta|/dt <= -|delta|; checking only the
    // far weaker exp(-T/2) envelope keeps the bound robust to transients.
    rep.decayed = rep.final_gap <= std::exp(-0.5 * T) * rep.initial_gap + opts.tol;
    reports.push_back(rep);
  }
  return reports;
}

PerturbationReport perturbation_check(const Graph& g, const SignalFunction& s, double c,
                                      std::uint64_t seed, const PerturbationOptions& opts) {
  if (std::abs(s(c) - c) > 1e-9)
    throw not_a_fixed_point("perturbation_check: s(c) != c at c = " + std::to_string(c));
  PerturbationReport rep;
  rep.center = c;
  rep.attempts = opts.attempts;
  Rng root(seed);

  for (int attempt = 0; attempt < opts.attempts; ++attempt) {
    Rng rng = root.derive(attempt);
    std::vector<double> x(g.size());
    for (double& v : x) {
      const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      v = std::clamp(c + sign * opts.size, -1.0, 1.0);
    }
    IntegrateOptions iopts;
    iopts.T = opts.T;
    iopts.h = opts.h > 0 ? opts.h : default_step(s);
    const Trajectory traj = integrate(g, s, StateVector(std::move(x)), iopts);

    double final_dist = 0.0;
    for (double v : traj.final_state()) final_dist = std::max(final_dist, std::abs(v - c));
    bool escaped = false;
    for (int k = 0; k < traj.frame_count() && !escaped; ++k) {
      double dist = 0.0;
      for (double v : traj.state(k)) dist = std::max(dist, std::abs(v - c));
      escaped = dist > opts.escape_radius;
    }
    rep.returned += final_dist <= opts.return_tol;
    rep.escaped += escaped;
    rep.worst_return_distance = std::max(rep.worst_return_distance, final_dist);
  }
  return rep;
}

namespace {

void emit_verdict(emit::Object&& obj, const EquilibriumVerdict& v) {
  obj.field("kind", v.is_interval ? "interval" : "point");
  obj.field("location", v.location);
  obj.field("location_hi", v.location_hi);
  obj.field("consistency", to_string(v.consistency));
  obj.field("stability", to_string(v.stability));
  obj.field("residual", v.residual);
  if (v.spectral_hint)
    obj.field("spectral_hint", *v.spectral_hint);
  else
    obj.null_field("spectral_hint");
}

void emit_basin(emit::Object&& obj, const BasinReport& basin) {
  {
    auto pts = obj.array("inconsistent_points");
    for (double k : basin.inconsistent_points) pts.value(k);
  }
  obj.field("trivial_cell", basin.trivial_cell);
  {
    auto cells = obj.array("cells");
    for (const auto& cell : basin.cells) {
      auto co = cells.object();
      co.field("lo", cell.lo);
      co.field("hi", cell.hi);
      co.field("lower_is_inconsistent", cell.lower_is_inconsistent);
      co.field("upper_is_inconsistent", cell.upper_is_inconsistent);
      {
        auto tp = co.array("target_points");
        for (double p : cell.target_points) tp.value(p);
      }
      {
        auto ti = co.array("target_intervals");
        for (auto [lo, hi] : cell.target_intervals) {
          auto pair = ti.array();
          pair.value(lo);
          pair.value(hi);
        }
      }
      co.field("target_missing", cell.target_missing);
      co.field("samples", cell.samples);
      co.field("stayed_in_box", cell.stayed_in_box);
      co.field("converged_to_target", cell.converged_to_target);
      co.field("direct_hits", cell.direct_hits);
      co.field("max_box_excursion", cell.max_box_excursion);
      co.field("worst_target_distance", cell.worst_target_distance);
    }
  }
  {
    auto halves = obj.array("half_boxes");
    for (const auto& half : basin.half_boxes) {
      auto ho = halves.object();
      ho.field("lo", half.lo);
      ho.field("hi", half.hi);
      ho.field("samples", half.samples);
      ho.field("converged_to_fixed", half.converged_to_fixed);
    }
  }
}

}  // namespace

void write_json(std::ostream& out, const AnalysisReport& report) {
  emit::Object root(out);
  root.field("schema", 1);
  {
    auto eq = root.array("equilibria");
    for (const auto& v : report.equilibria) emit_verdict(eq.object(), v);
  }
  if (report.sync) {
    auto sync = root.object("sync");
    sync.field("final_spread", report.sync->final_spread);
    if (report.sync->first_sync_time)
      sync.field("first_sync_time", *report.sync->first_sync_time);
    else
      sync.null_field("first_sync_time");
    if (report.sync->common_value)
      sync.field("common_value", *report.sync->common_value);
    else
      sync.null_field("common_value");
    sync.field("tol", report.sync->tol);
  } else {
    root.null_field("sync");
  }
  {
    auto ly = root.object("lyapunov");
    if (report.lyapunov_max_increment)
      ly.field("max_increment", *report.lyapunov_max_increment);
    else
      ly.null_field("max_increment");
    ly.field("center", report.lyapunov_center);
  }
  if (report.basin)
    emit_basin(root.object("basin"), *report.basin);
  else
    root.null_field("basin");
}

}  // namespace nlc
