#include "nlc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlc {

namespace {

constexpr double kDomainSlack = 1e-12;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

/// Uniform grid over [lo, hi] with the signal's breakpoints (and 0) merged
/// in, so piecewise kinds are sampled exactly at their kinks.
std::vector<double> scan_grid(const SignalFunction& s, double lo, double hi, int points) {
  std::vector<double> xs;
  xs.reserve(points + s.breakpoints().size() + 3);
  for (int i = 0; i < points; ++i) {
    double t = static_cast<double>(i) / (points - 1);
    xs.push_back(lo + t * (hi - lo));
  }
  for (double b : s.breakpoints())
    if (b > lo && b < hi) xs.push_back(b);
  if (lo < 0.0 && hi > 0.0) xs.push_back(0.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::identity: return "identity";
    case SignalKind::affine: return "affine";
    case SignalKind::tanh_gain: return "tanh_gain";
    case SignalKind::scaled_sine: return "scaled_sine";
    case SignalKind::piecewise_linear: return "piecewise_linear";
    case SignalKind::quantizer_approx: return "quantizer_approx";
  }
  return "?";
}

std::string to_string(ConsistencyLabel l) {
  switch (l) {
    case ConsistencyLabel::consistent: return "consistent";
    case ConsistencyLabel::inconsistent: return "inconsistent";
    case ConsistencyLabel::ambiguous: return "ambiguous";
  }
  return "?";
}

std::string to_string(EstimationLabel l) {
  switch (l) {
    case EstimationLabel::underestimation: return "underestimation";
    case EstimationLabel::overestimation: return "overestimation";
    case EstimationLabel::perfect: return "perfect";
    case EstimationLabel::mixed: return "mixed";
  }
  return "?";
}

SignalFunction SignalFunction::identity() {
  SignalFunction s;
  s.kind_ = SignalKind::identity;
  s.lipschitz_ = 1.0;
  return s;
}

SignalFunction SignalFunction::affine(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw signal_error("affine: parameters must be finite");
  SignalFunction s;
  s.kind_ = SignalKind::affine;
  s.a_ = a;
  s.b_ = b;
  s.lipschitz_ = std::abs(a);
  return s;
}

SignalFunction SignalFunction::tanh_gain(double k) {
  if (!(k > 0) || !std::isfinite(k)) throw signal_error("tanh_gain: gain must be positive");
  SignalFunction s;
  s.kind_ = SignalKind::tanh_gain;
  s.gain_ = k;
  s.lipschitz_ = k;  // max of k sech^2(kx) is at x = 0
  return s;
}

SignalFunction SignalFunction::scaled_sine(double amplitude, double frequency) {
  if (!(amplitude > 0) || amplitude > 1) throw signal_error("scaled_sine: amplitude must be in (0,1]");
  if (!(frequency > 0) || !(frequency * amplitude < 3.141592653589793))
    throw signal_error("scaled_sine: need 0 < frequency*amplitude < pi");
  SignalFunction s;
  s.kind_ = SignalKind::scaled_sine;
  s.amp_ = amplitude;
  s.freq_ = frequency;
  s.sine_scale_ = amplitude / std::sin(frequency * amplitude);
  // Slope is largest either at 0 (sine branch) or 1 (identity branch).
  s.lipschitz_ = std::max(1.0, s.sine_scale_ * frequency);
  s.breakpoints_ = {-amplitude, amplitude};
  return s;
}

SignalFunction SignalFunction::piecewise_linear(std::vector<std::array<double, 2>> points) {
  if (points.size() < 2) throw signal_error("piecewise_linear: need at least 2 points");
  for (size_t i = 1; i < points.size(); ++i)
    if (!(points[i][0] > points[i - 1][0]))
      throw signal_error("piecewise_linear: x coordinates must be strictly increasing");
  if (points.front()[0] != -1.0 || points.back()[0] != 1.0)
    throw signal_error("piecewise_linear: points must cover [-1,1] exactly");
  SignalFunction s;
  s.kind_ = SignalKind::piecewise_linear;
  double lip = 0.0;
  for (size_t i = 1; i < points.size(); ++i) {
    const double slope = (points[i][1] - points[i - 1][1]) / (points[i][0] - points[i - 1][0]);
    lip = std::max(lip, std::abs(slope));
    if (i + 1 < points.size()) s.breakpoints_.push_back(points[i][0]);
  }
  s.lipschitz_ = std::max(lip, 1e-12);
  s.points_ = std::move(points);
  return s;
}

SignalFunction SignalFunction::quantizer_approx(double eps) {
  if (!(eps > 0) || !(eps < 1)) throw signal_error("quantizer_approx: eps must be in (0,1)");
  SignalFunction s;
  s.kind_ = SignalKind::quantizer_approx;
  s.eps_ = eps;
  s.lipschitz_ = 1.0 / eps;
  s.breakpoints_ = {-eps, eps};
  return s;
}

double SignalFunction::operator()(double x) const {
  if (x < -1.0 - kDomainSlack || x > 1.0 + kDomainSlack)
    throw signal_error("signal evaluated outside [-1,1]: x = " + std::to_string(x));
  x = clamp_unit(x);
  double y;
  switch (kind_) {
    case SignalKind::identity:
      y = x;
      break;
    case SignalKind::affine:
      y = a_ * x + b_;
      break;
    case SignalKind::tanh_gain:
      y = std::tanh(gain_ * x);
      break;
    case SignalKind::scaled_sine:
      y = std::abs(x) <= amp_ ? sine_scale_ * std::sin(freq_ * x) : x;
      break;
    case SignalKind::piecewise_linear: {
      auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                 [](double v, const std::array<double, 2>& p) { return v < p[0]; });
      if (it == points_.begin()) ++it;
      if (it == points_.end()) --it;
      const auto& p1 = *it;
      const auto& p0 = *(it - 1);
      y = p0[1] + (x - p0[0]) * (p1[1] - p0[1]) / (p1[0] - p0[0]);
      break;
    }
    case SignalKind::quantizer_approx:
      y = std::abs(x) <= eps_ ? x / eps_ : (x > 0 ? 1.0 : -1.0);
      break;
    default:
      throw signal_error("unknown signal kind");
  }
  // Round-off clamp only; genuine range violations pass through for
  // validate() to report.
  if (y > 1.0 && y <= 1.0 + kDomainSlack) y = 1.0;
  if (y < -1.0 && y >= -1.0 - kDomainSlack) y = -1.0;
  return y;
}

double SignalFunction::eval_extended(double x) const { return (*this)(clamp_unit(x)); }

double SignalFunction::slope_at(double c) const {
  c = clamp_unit(c);
  auto fd = [this](double x) {
    const double h = 1e-6;
    const double lo = std::max(-1.0, x - h);
    const double hi = std::min(1.0, x + h);
    return ((*this)(hi) - (*this)(lo)) / (hi - lo);
  };
  switch (kind_) {
    case SignalKind::identity:
      return 1.0;
    case SignalKind::affine:
      return a_;
    case SignalKind::tanh_gain: {
      const double t = std::tanh(gain_ * c);
      return gain_ * (1.0 - t * t);
    }
    case SignalKind::scaled_sine:
      if (std::abs(std::abs(c) - amp_) < 1e-14) return fd(c);  // seam
      return std::abs(c) < amp_ ? sine_scale_ * freq_ * std::cos(freq_ * c) : 1.0;
    case SignalKind::quantizer_approx:
      if (std::abs(std::abs(c) - eps_) < 1e-14) return fd(c);  // kink
      return std::abs(c) < eps_ ? 1.0 / eps_ : 0.0;
    case SignalKind::piecewise_linear: {
      for (double b : breakpoints_)
        if (std::abs(c - b) < 1e-14) return fd(c);
      auto it = std::upper_bound(points_.begin(), points_.end(), c,
                                 [](double v, const std::array<double, 2>& p) { return v < p[0]; });
      if (it == points_.begin()) ++it;
      if (it == points_.end()) --it;
      return ((*it)[1] - (*(it - 1))[1]) / ((*it)[0] - (*(it - 1))[0]);
    }
  }
  return fd(c);
}

std::string SignalFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SignalKind::identity: os << "identity"; break;
    case SignalKind::affine: os << "affine(a=" << a_ << ",b=" << b_ << ")"; break;
    case SignalKind::tanh_gain: os << "tanh_gain(k=" << gain_ << ")"; break;
    case SignalKind::scaled_sine: os << "scaled_sine(amplitude=" << amp_ << ",frequency=" << freq_ << ")"; break;
    case SignalKind::piecewise_linear: os << "piecewise_linear(" << points_.size() << " points)"; break;
    case SignalKind::quantizer_approx: os << "quantizer_approx(epsilon=" << eps_ << ")"; break;
  }
  return os.str();
}

double SignalFunction::param(const std::string& name) const {
  if (name == "a") return a_;
  if (name == "b") return b_;
  if (name == "k") return gain_;
  if (name == "amplitude") return amp_;
  if (name == "frequency") return freq_;
  if (name == "epsilon") return eps_;
  throw signal_error("unknown signal parameter: " + name);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (valid ? "valid" : "INVALID") << " (grid " << grid_size << "): ";
  os << "range violation " << worst_range_violation << " at " << range_location;
  os << ", monotone drop " << worst_monotone_drop << " at " << monotone_location;
  os << ", max slope " << max_grid_slope << " (bound " << lipschitz_bound << ")";
  return os.str();
}

ValidationReport validate(const SignalFunction& s, const ValidationOptions& opts) {
  if (opts.grid_size < 1000) throw signal_error("validate: grid_size must be >= 1000");
  ValidationReport rep;
  rep.grid_size = opts.grid_size;
  rep.lipschitz_bound = s.lipschitz_bound();

  const auto xs = scan_grid(s, -1.0, 1.0, opts.grid_size);
  double running_max = -std::numeric_limits<double>::infinity();
  double prev_x = 0.0, prev_y = 0.0;
  bool have_prev = false;
  for (double x : xs) {
    const double y = s(x);
    const double range_excess = std::max(0.0, std::abs(y) - 1.0);
    if (range_excess > rep.worst_range_violation) {
      rep.worst_range_violation = range_excess;
      rep.range_location = x;
    }
    if (running_max - y > rep.worst_monotone_drop) {
      rep.worst_monotone_drop = running_max - y;
      rep.monotone_location = x;
    }
    running_max = std::max(running_max, y);
    if (have_prev && x > prev_x) {
      const double slope = (y - prev_y) / (x - prev_x);
      if (std::abs(slope) > rep.max_grid_slope) {
        rep.max_grid_slope = std::abs(slope);
        rep.slope_location = x;
      }
    }
    prev_x = x;
    prev_y = y;
    have_prev = true;
  }
  rep.valid = rep.worst_range_violation <= opts.range_tol &&
              rep.worst_monotone_drop <= opts.monotone_tol &&
              rep.max_grid_slope <= rep.lipschitz_bound * (1.0 + opts.slope_slack) + 1e-12;
  return rep;
}

ValidationReport validate(const SignalFunction& s, int grid_size) {
  ValidationOptions opts;
  opts.grid_size = grid_size;
  return validate(s, opts);
}

std::vector<double> FixedPointSet::isolated_locations() const {
  std::vector<double> out;
  out.reserve(isolated.size());
  for (const auto& p : isolated) out.push_back(p.location);
  return out;
}

namespace {

/// Bisection of g(x) = s(x) - x on a sign-changing bracket. Drives the
/// bracket width below refine_tol and then keeps halving while the residual
/// exceeds 10 * refine_tol (or the bracket reaches ulp width).
double bisect_fixed_point(const SignalFunction& s, double lo, double hi, double g_lo,
                          double refine_tol) {
  auto g = [&s](double x) { return s(x) - x; };
  double g_best = std::numeric_limits<double>::infinity();
  double best = lo;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // ulp-width bracket
    const double gm = g(mid);
    if (std::abs(gm) < g_best) {
      g_best = std::abs(gm);
      best = mid;
    }
    if (gm == 0.0) return mid;
    if ((hi - lo) <= refine_tol && g_best <= 10.0 * refine_tol) break;
    if ((g_lo > 0) == (gm > 0)) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
    }
  }
  return best;
}

}  // namespace

FixedPointSet find_fixed_points(const SignalFunction& s, const FixedPointOptions& opts) {
  if (opts.scan_points < 10000) throw signal_error("find_fixed_points: scan_points must be >= 10^4");
  if (!(opts.refine_tol <= 1e-10)) throw signal_error("find_fixed_points: refine_tol must be <= 1e-10");

  const auto xs = scan_grid(s, -1.0, 1.0, opts.scan_points);
  const int m = static_cast<int>(xs.size());
  std::vector<double> gs(m);
  for (int i = 0; i < m; ++i) gs[i] = s(xs[i]) - xs[i];
  const auto near = [&](int i) { return std::abs(gs[i]) <= opts.residual_tol; };

  FixedPointSet out;
  out.scan_points = opts.scan_points;
  out.residual_tol = opts.residual_tol;
  out.merge_tol = opts.merge_tol;

  std::vector<double> roots;

  // Maximal runs of near-zero residual become perfect-estimation intervals
  // when wide enough; narrow runs are tangencies or plain roots and
  // collapse to an isolated point (bisection-refined when a sign change
  // brackets the run).
  int i = 0;
  while (i < m) {
    if (!near(i)) {
      if (i + 1 < m && !near(i + 1) && (gs[i] > 0) != (gs[i + 1] > 0))
        roots.push_back(bisect_fixed_point(s, xs[i], xs[i + 1], gs[i], opts.refine_tol));
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < m && near(j + 1)) ++j;
    const double width = xs[j] - xs[i];
    if (width >= opts.min_interval_width) {
      out.intervals.push_back({xs[i], xs[j], ConsistencyLabel::ambiguous});
    } else {
      const bool bracketed = i > 0 && j + 1 < m && (gs[i - 1] > 0) != (gs[j + 1] > 0);
      if (bracketed) {
        roots.push_back(bisect_fixed_point(s, xs[i - 1], xs[j + 1], gs[i - 1], opts.refine_tol));
      } else {
        int best = i;
        for (int k = i; k <= j; ++k)
          if (std::abs(gs[k]) < std::abs(gs[best])) best = k;
        roots.push_back(xs[best]);
      }
    }
    i = j + 1;
  }

  // Merge near-duplicates, drop points covered by an interval.
  std::sort(roots.begin(), roots.end());
  for (double r : roots) {
    const bool in_interval =
        std::any_of(out.intervals.begin(), out.intervals.end(), [&](const FixedInterval& iv) {
          return r >= iv.lo - opts.merge_tol && r <= iv.hi + opts.merge_tol;
        });
    if (in_interval) continue;
    if (!out.isolated.empty() && r - out.isolated.back().location <= opts.merge_tol) {
      if (std::abs(s(r) - r) < out.isolated.back().residual) {
        out.isolated.back().location = r;
        out.isolated.back().residual = std::abs(s(r) - r);
      }
      continue;
    }
    out.isolated.push_back({r, ConsistencyLabel::ambiguous, std::abs(s(r) - r)});
  }
  return out;
}

FixedPointSet find_fixed_points(const SignalFunction& s, int scan_points, double refine_tol) {
  FixedPointOptions opts;
  opts.scan_points = scan_points;
  opts.refine_tol = refine_tol;
  return find_fixed_points(s, opts);
}

EstimationLabel classify_estimation(const SignalFunction& s, Region region, int grid) {
  const double lo = std::max(-1.0, region.lo);
  const double hi = std::min(1.0, region.hi);
  if (!(lo <= hi)) throw signal_error("classify_estimation: empty region");

  constexpr double kResidualTol = 1e-9;
  constexpr double kSlack = 1e-12;
  const auto xs = lo == hi ? std::vector<double>{lo} : scan_grid(s, lo, hi, grid);
  bool under = true, over = true, perfect = true;
  for (double x : xs) {
    const double d = s(x) - x;
    const double signed_product = x * d;
    if (signed_product > kSlack) under = false;
    if (signed_product < -kSlack) over = false;
    if (std::abs(d) > kResidualTol) perfect = false;
  }
  if (perfect) return EstimationLabel::perfect;
  if (under && over) return EstimationLabel::perfect;  // only differ below residual tol
  if (under) return EstimationLabel::underestimation;
  if (over) return EstimationLabel::overestimation;
  return EstimationLabel::mixed;
}

namespace {

enum class SideResult { holds, definite_fail, marginal };

/// Worst violation of (x-c)(s(x)-x) <= 0 over one side of c at shrinking
/// radii. `dir` = -1 probes [c-r, c), +1 probes (c, c+r].
SideResult probe_side(const SignalFunction& s, double c, int dir, const ConsistencyOptions& opts) {
  const double limit = dir < 0 ? -1.0 : 1.0;
  if ((limit - c) * dir <= 0) return SideResult::holds;  // no room: domain boundary
  bool held_somewhere = false;
  bool definite_everywhere = true;
  for (double r = opts.initial_radius; r >= opts.min_radius; r *= 0.5) {
    const double far = std::clamp(c + dir * r, -1.0, 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= opts.grid; ++k) {
      const double x = c + (far - c) * static_cast<double>(k) / opts.grid;
      worst = std::max(worst, (x - c) * (s(x) - x));
    }
    if (worst <= opts.slack) {
      held_somewhere = true;
      definite_everywhere = false;
      break;
    }
    if (worst <= opts.definite) definite_everywhere = false;
  }
  if (held_somewhere) return SideResult::holds;
  return definite_everywhere ? SideResult::definite_fail : SideResult::marginal;
}

ConsistencyLabel combine_sides(SideResult left, SideResult right) {
  if (left == SideResult::holds && right == SideResult::holds) return ConsistencyLabel::consistent;
  // Consistency needs both sides, so a definite failure on either side is
  // enough to rule it out; marginal violations stay ambiguous.
  if (left == SideResult::definite_fail || right == SideResult::definite_fail)
    return ConsistencyLabel::inconsistent;
  return ConsistencyLabel::ambiguous;
}

}  // namespace

ConsistencyLabel classify_consistency(const SignalFunction& s, double c,
                                      const ConsistencyOptions& opts) {
  if (std::abs(s(c) - c) > opts.residual_tol)
    throw not_a_fixed_point("classify_consistency: s(c) != c at c = " + std::to_string(c));
  return combine_sides(probe_side(s, c, -1, opts), probe_side(s, c, +1, opts));
}

ConsistencyLabel classify_interval_consistency(const SignalFunction& s, double lo, double hi,
                                               const ConsistencyOptions& opts) {
  const SideResult left = probe_side(s, lo, -1, opts);
  const SideResult right = probe_side(s, hi, +1, opts);
  if (left == SideResult::holds && right == SideResult::holds) return ConsistencyLabel::consistent;
  if (left == SideResult::definite_fail && right == SideResult::definite_fail)
    return ConsistencyLabel::inconsistent;
  // One bad side: the contact point between a perfect interval and an
  // inconsistent region is left unresolved (boundary-ambiguous).
  return ConsistencyLabel::ambiguous;
}

FixedPointSet analyze_fixed_points(const SignalFunction& s, const FixedPointOptions& opts,
                                   const ConsistencyOptions& copts) {
  FixedPointSet set = find_fixed_points(s, opts);
  ConsistencyOptions point_opts = copts;
  point_opts.residual_tol = std::max(copts.residual_tol, 20.0 * opts.refine_tol);
  for (auto& p : set.isolated) p.consistency = classify_consistency(s, p.location, point_opts);
  for (auto& iv : set.intervals) iv.consistency = classify_interval_consistency(s, iv.lo, iv.hi, copts);
  return set;
}

}  // namespace nlc
