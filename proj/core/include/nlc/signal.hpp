#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlc/errors.hpp"

namespace nlc {

enum class SignalKind {
  identity,
  affine,
  tanh_gain,
  scaled_sine,
  piecewise_linear,
  quantizer_approx,
};

std::string to_string(SignalKind k);

/// A signal function s : [-1,1] -> [-1,1] through which every agent
/// perceives its neighbors' states. Valid signals are non-decreasing and
/// Lipschitz; construction only checks parameter sanity, `validate` checks
/// the analytic assumptions on a grid. Immutable; all operations are pure.
class SignalFunction {
 public:
  static SignalFunction identity();
  static SignalFunction affine(double a, double b);
  static SignalFunction tanh_gain(double k);
  /// amplitude*sin(frequency*x)/sin(frequency*amplitude) on
  /// [-amplitude, amplitude], blended to the identity outside. Continuous at
  /// the seams by construction.
  static SignalFunction scaled_sine(double amplitude, double frequency);
  /// Linear interpolation of (x, y) points with strictly increasing x
  /// covering [-1, 1] exactly.
  static SignalFunction piecewise_linear(std::vector<std::array<double, 2>> points);
  /// Continuous surrogate of sign(x): slope 1/eps on [-eps, eps], +-1 outside.
  static SignalFunction quantizer_approx(double eps);

  /// Evaluates s(x). Inputs outside [-1,1] by more than 1e-12 throw
  /// signal_error; outputs beyond +-1 by round-off (<= 1e-12) are clamped.
  /// Larger output excursions are returned untouched so that `validate`
  /// can measure range violations of invalid parameterizations.
  double operator()(double x) const;

  /// Same as operator() but clamps x into [-1,1] first (constant extension).
  /// Integrator stages may poke slightly outside the box; this keeps the
  /// evaluation total without weakening the public domain contract.
  double eval_extended(double x) const;

  SignalKind kind() const { return kind_; }

  /// Analytic Lipschitz bound for the kind (exact for every kind here).
  double lipschitz_bound() const { return lipschitz_; }

  /// Derivative of s at c: analytic for smooth kinds, segment slope for
  /// piecewise kinds, central finite difference at kinks (one-sided at +-1).
  double slope_at(double c) const;

  /// Non-smooth points of s in (-1, 1), used for scan-grid insertion.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  /// e.g. "tanh_gain(k=20)".
  std::string describe() const;

  double param(const std::string& name) const;  // kind parameters by name
  const std::vector<std::array<double, 2>>& points() const { return points_; }

 private:
  SignalFunction() = default;

  SignalKind kind_ = SignalKind::identity;
  double a_ = 0, b_ = 0;     // affine
  double gain_ = 0;          // tanh_gain
  double amp_ = 0, freq_ = 0, sine_scale_ = 0;  // scaled_sine
  double eps_ = 0;           // quantizer_approx
  std::vector<std::array<double, 2>> points_;   // piecewise_linear
  double lipschitz_ = 1.0;
  std::vector<double> breakpoints_;
};

/// Grid certification of the standing assumptions on s.
struct ValidationReport {
  bool valid = false;
  int grid_size = 0;
  // Largest excursion of s(x) beyond [-1, 1] and where it happens.
  double worst_range_violation = 0.0;
  double range_location = 0.0;
  // Largest drop below the running maximum along the grid. Exactly
  // non-decreasing signals score 0; a slack (monotone_tol) absorbs
  // benign analytic dips such as the scaled-sine seam.
  double worst_monotone_drop = 0.0;
  double monotone_location = 0.0;
  // Largest finite-difference slope seen and the claimed bound.
  double max_grid_slope = 0.0;
  double slope_location = 0.0;
  double lipschitz_bound = 0.0;

  std::string summary() const;
};

struct ValidationOptions {
  int grid_size = 10000;       // >= 1000
  double range_tol = 1e-12;
  double monotone_tol = 1e-3;  // absorbs sub-resolution analytic dips
  double slope_slack = 1e-6;   // relative slack on the Lipschitz bound
};

ValidationReport validate(const SignalFunction& s, const ValidationOptions& opts = {});
ValidationReport validate(const SignalFunction& s, int grid_size);

enum class ConsistencyLabel { consistent, inconsistent, ambiguous };
std::string to_string(ConsistencyLabel l);

struct FixedPoint {
  double location = 0.0;
  ConsistencyLabel consistency = ConsistencyLabel::ambiguous;
  double residual = 0.0;  // |s(c) - c|
};

struct FixedInterval {
  double lo = 0.0, hi = 0.0;
  ConsistencyLabel consistency = ConsistencyLabel::ambiguous;
};

/// Fixed points of s. Isolated points are bisection-refined roots of
/// s(x) - x; intervals are maximal perfect-estimation ranges where s == x
/// at scan resolution. Never empty for a valid signal: s maps into [-1,1],
/// so s(x)-x changes sign (or vanishes) somewhere by the intermediate value
/// theorem.
struct FixedPointSet {
  std::vector<FixedPoint> isolated;      // ascending
  std::vector<FixedInterval> intervals;  // ascending, disjoint from points
  // Resolution caveats: labels and interval endpoints are certified only at
  // this grid and tolerance.
  int scan_points = 0;
  double residual_tol = 0.0;
  double merge_tol = 0.0;

  bool empty() const { return isolated.empty() && intervals.empty(); }
  std::vector<double> isolated_locations() const;
};

struct FixedPointOptions {
  int scan_points = 10000;       // >= 10^4
  double refine_tol = 1e-12;     // <= 1e-10
  double residual_tol = 1e-9;    // |s(x)-x| below this counts as fixed
  double merge_tol = 1e-6;       // distinct roots are separated by more
  double min_interval_width = 1e-2;  // narrower runs collapse to a point
};

FixedPointSet find_fixed_points(const SignalFunction& s, const FixedPointOptions& opts = {});
FixedPointSet find_fixed_points(const SignalFunction& s, int scan_points, double refine_tol);

enum class EstimationLabel { underestimation, overestimation, perfect, mixed };
std::string to_string(EstimationLabel l);

/// Closed subinterval of [-1, 1]; lo == hi denotes a single point.
struct Region {
  double lo = -1.0;
  double hi = 1.0;
  static Region global() { return {-1.0, 1.0}; }
  static Region point(double x) { return {x, x}; }
};

/// Sign pattern of x*(s(x)-x) on the region: underestimation pulls toward 0,
/// overestimation pushes away, perfect means s == x throughout.
EstimationLabel classify_estimation(const SignalFunction& s, Region region = Region::global(),
                                    int grid = 10000);

struct ConsistencyOptions {
  double initial_radius = 0.5;
  double min_radius = 1e-3;
  int grid = 512;
  double slack = 1e-12;        // violations below this count as holding
  double definite = 1e-9;      // violations above this count as definite
  double residual_tol = 1e-9;  // the "c is a fixed point" precondition
};

/// Tests (x-c)(s(x)-x) <= 0 around the fixed point c at shrinking radii.
/// consistent: holds for some radius; inconsistent: definitely violated at
/// every radius; ambiguous otherwise. One-sided at the domain boundary.
/// Throws not_a_fixed_point if |s(c)-c| exceeds the residual tolerance.
ConsistencyLabel classify_consistency(const SignalFunction& s, double c,
                                      const ConsistencyOptions& opts = {});

/// Interval variant: both outer sides must pull toward the interval.
/// One failing side yields ambiguous (the paper leaves boundary contact
/// between a perfect interval and an inconsistent point unresolved), both
/// failing yield inconsistent.
ConsistencyLabel classify_interval_consistency(const SignalFunction& s, double lo, double hi,
                                               const ConsistencyOptions& opts = {});

/// find_fixed_points + per-element consistency labels in one call.
FixedPointSet analyze_fixed_points(const SignalFunction& s, const FixedPointOptions& opts = {},
                                   const ConsistencyOptions& copts = {});

}  // namespace nlc
