#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlc/signal.hpp"

using namespace nlc;

namespace {

SignalFunction fig3_signal() { return SignalFunction::scaled_sine(0.8, 2.0); }

std::vector<SignalFunction> valid_signals() {
  return {
      SignalFunction::identity(),
      SignalFunction::affine(0.5, 0.25),
      SignalFunction::tanh_gain(1.0),
      SignalFunction::tanh_gain(20.0),
      fig3_signal(),
      SignalFunction::quantizer_approx(0.5),
      SignalFunction::quantizer_approx(0.1),
      SignalFunction::piecewise_linear({{-1, -1}, {-0.5, -0.5}, {0, -0.2}, {0.5, 0.5}, {1, 1}}),
  };
}

/// Independent root oracle: plain bisection of s(x) - x on a bracket.
double bisect_oracle(const SignalFunction& s, double lo, double hi) {
  double g_lo = s(lo) - lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double g_mid = s(mid) - mid;
    if (g_mid == 0.0) return mid;
    if ((g_lo > 0) == (g_mid > 0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("evaluate: pinned values") {
  CHECK(SignalFunction::tanh_gain(1.0)(0.0) == 0.0);
  CHECK(SignalFunction::identity()(0.5) == 0.5);
  // continuity of the sine branch with the identity branch makes this exact
  CHECK(fig3_signal()(0.8) == 0.8);
  CHECK(fig3_signal()(-0.8) == -0.8);
  CHECK(fig3_signal()(0.9) == 0.9);
  CHECK(SignalFunction::quantizer_approx(0.5)(0.25) == 0.5);
  CHECK(SignalFunction::quantizer_approx(0.5)(0.75) == 1.0);
}

TEST_CASE("evaluate: domain handling") {
  const auto s = SignalFunction::tanh_gain(1.0);
  CHECK_THROWS_AS(s(1.1), signal_error);
  CHECK_THROWS_AS(s(-1.0 - 1e-6), signal_error);
  CHECK(s(1.0 + 1e-13) == s(1.0));  // round-off clamp
}

TEST_CASE("constructor parameter validation") {
  CHECK_THROWS_AS(SignalFunction::tanh_gain(0.0), signal_error);
  CHECK_THROWS_AS(SignalFunction::quantizer_approx(0.0), signal_error);
  CHECK_THROWS_AS(SignalFunction::scaled_sine(1.5, 2.0), signal_error);
  CHECK_THROWS_AS(SignalFunction::scaled_sine(0.8, 4.0), signal_error);  // f*A >= pi
  CHECK_THROWS_AS(SignalFunction::piecewise_linear({{-1, -1}, {0.5, 0}, {0.4, 0.2}, {1, 1}}),
                  signal_error);
  CHECK_THROWS_AS(SignalFunction::piecewise_linear({{-0.9, -1}, {1, 1}}), signal_error);
}

TEST_CASE("validate: tanh_gain(20) is valid with Lipschitz bound 20 at x=0") {
  const auto s = SignalFunction::tanh_gain(20.0);
  const ValidationReport r = validate(s);
  CHECK(r.valid);
  CHECK(s.lipschitz_bound() == 20.0);  // max of 20 sech^2(20x) is at 0
  CHECK(r.max_grid_slope == doctest::Approx(20.0).epsilon(1e-3));
  CHECK(std::abs(r.slope_location) < 1e-3);
}

TEST_CASE("validate: affine(1.5, 0) violates the range at |x| = 1") {
  const ValidationReport r = validate(SignalFunction::affine(1.5, 0.0));
  CHECK_FALSE(r.valid);
  // |s(+-1)| = 1.5; the scan reports the first of the two symmetric hits
  CHECK(r.worst_range_violation == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(r.range_location) == doctest::Approx(1.0));
}

TEST_CASE("validate: quantizer slope is 1/eps on the ramp") {
  const ValidationReport r = validate(SignalFunction::quantizer_approx(0.5));
  CHECK(r.valid);
  CHECK(r.max_grid_slope == doctest::Approx(2.0).epsilon(1e-9));
}

// The reference sine signal dips below its running maximum near the seam:
// s'(x) = 1.6 cos(2x)/sin(1.6) < 0 for x in (pi/4, 0.8). The exact dip is
// s(pi/4) - s(0.8) = 0.8/sin(1.6) - 0.8, about 3.4e-4, which the validation
// slack absorbs (and reports).
TEST_CASE("validate: the scaled sine's sub-resolution dip is reported but tolerated") {
  const ValidationReport r = validate(fig3_signal());
  CHECK(r.valid);
  const double expected_dip = 0.8 / std::sin(1.6) - 0.8;
  CHECK(r.worst_monotone_drop == doctest::Approx(expected_dip).epsilon(1e-3));
  // the dip sits between the sine crest at pi/4 and the 0.8 seam, on
  // whichever sign the scan reaches first
  const double loc = std::abs(r.monotone_location);
  CHECK(loc > 0.78);
  CHECK(loc < 0.801);
}

TEST_CASE("validate: genuinely non-monotone signals fail") {
  const auto s = SignalFunction::piecewise_linear({{-1, -1}, {0, 0.5}, {0.2, 0.3}, {1, 1}});
  const ValidationReport r = validate(s);
  CHECK_FALSE(r.valid);
  CHECK(r.worst_monotone_drop == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("validate: grid floor is enforced") {
  CHECK_THROWS_AS(validate(SignalFunction::identity(), 10), signal_error);
}

TEST_CASE("validated signals stay in range and monotone on the grid") {
  for (const auto& s : valid_signals()) {
    CAPTURE(s.describe());
    const ValidationReport r = validate(s);
    CHECK(r.valid);
    CHECK(r.worst_range_violation == 0.0);
    CHECK(r.max_grid_slope <= s.lipschitz_bound() * (1 + 1e-6) + 1e-12);
  }
}

TEST_CASE("find_fixed_points: identity is one perfect interval") {
  const FixedPointSet set = find_fixed_points(SignalFunction::identity());
  CHECK(set.isolated.empty());
  REQUIRE(set.intervals.size() == 1);
  CHECK(set.intervals[0].lo == -1.0);
  CHECK(set.intervals[0].hi == 1.0);
}

TEST_CASE("find_fixed_points: tanh_gain(1) has the single root 0") {
  const FixedPointSet set = find_fixed_points(SignalFunction::tanh_gain(1.0));
  CHECK(set.intervals.empty());
  REQUIRE(set.isolated.size() == 1);
  CHECK(std::abs(set.isolated[0].location) <= 1e-9);
  // bisection-refined root satisfies the residual contract
  CHECK(set.isolated[0].residual <= 10 * 1e-12);
}

// Analytic solve of the piecewise-linear s_eps(x) = x: the ramp crosses at
// 0 and the saturated branches pin -1 and 1.
TEST_CASE("find_fixed_points: quantizer has exactly {-1, 0, 1}") {
  for (double eps : {0.5, 0.1, 0.01}) {
    CAPTURE(eps);
    const FixedPointSet set = find_fixed_points(SignalFunction::quantizer_approx(eps));
    CHECK(set.intervals.empty());
    REQUIRE(set.isolated.size() == 3);
    CHECK(set.isolated[0].location == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(std::abs(set.isolated[1].location) <= 1e-9);
    CHECK(set.isolated[2].location == doctest::Approx(1.0).epsilon(1e-9));
  }
}

// The outer roots of tanh(20x) = x sit within an ulp of 1: tanh(20) is
// 1 - 8.2e-18, which rounds to 1.0 in double precision.
TEST_CASE("find_fixed_points: tanh_gain(20) has three roots, outer pair hugging +-1") {
  const FixedPointSet set = find_fixed_points(SignalFunction::tanh_gain(20.0));
  CHECK(set.intervals.empty());
  REQUIRE(set.isolated.size() == 3);
  const double x_star = set.isolated[2].location;
  CHECK(x_star > 0.999);
  CHECK(x_star <= 1.0);
  CHECK(set.isolated[0].location == doctest::Approx(-x_star).epsilon(1e-12));
  CHECK(std::abs(set.isolated[1].location) <= 1e-9);
  // independent oracle: bisection of s(x)-x on [0.5 eps-free bracket]
  const auto s = SignalFunction::tanh_gain(20.0);
  const double oracle = bisect_oracle(s, 0.5, 1.0);
  CHECK(std::abs(oracle - x_star) <= 1e-9);
}

TEST_CASE("find_fixed_points: the sine signal keeps its identity wings as intervals") {
  const FixedPointSet set = find_fixed_points(fig3_signal());
  REQUIRE(set.intervals.size() == 2);
  CHECK(set.intervals[0].lo == doctest::Approx(-1.0));
  CHECK(set.intervals[0].hi == doctest::Approx(-0.8).epsilon(1e-6));
  CHECK(set.intervals[1].lo == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(set.intervals[1].hi == doctest::Approx(1.0));
  REQUIRE(set.isolated.size() == 1);
  CHECK(std::abs(set.isolated[0].location) <= 1e-9);
}

TEST_CASE("find_fixed_points: never empty for a valid signal") {
  for (const auto& s : valid_signals()) {
    CAPTURE(s.describe());
    CHECK_FALSE(find_fixed_points(s).empty());
  }
}

TEST_CASE("find_fixed_points: preconditions") {
  CHECK_THROWS_AS(find_fixed_points(SignalFunction::identity(), 100, 1e-12), signal_error);
  CHECK_THROWS_AS(find_fixed_points(SignalFunction::identity(), 10000, 1e-8), signal_error);
}

TEST_CASE("classify_estimation: global labels") {
  CHECK(classify_estimation(SignalFunction::tanh_gain(1.0)) == EstimationLabel::underestimation);
  CHECK(classify_estimation(fig3_signal()) == EstimationLabel::overestimation);
  CHECK(classify_estimation(SignalFunction::tanh_gain(20.0)) == EstimationLabel::overestimation);
  CHECK(classify_estimation(SignalFunction::identity()) == EstimationLabel::perfect);
  const auto mixed =
      SignalFunction::piecewise_linear({{-1, -1}, {-0.5, -0.5}, {0, -0.2}, {0.5, 0.5}, {1, 1}});
  CHECK(classify_estimation(mixed) == EstimationLabel::mixed);
}

TEST_CASE("classify_estimation: regions and points") {
  CHECK(classify_estimation(fig3_signal(), Region{0.8, 1.0}) == EstimationLabel::perfect);
  CHECK(classify_estimation(fig3_signal(), Region::point(0.4)) == EstimationLabel::overestimation);
  CHECK(classify_estimation(SignalFunction::tanh_gain(1.0), Region::point(0.5)) ==
        EstimationLabel::underestimation);
}

TEST_CASE("classify_consistency: pinned labels") {
  CHECK(classify_consistency(SignalFunction::tanh_gain(1.0), 0.0) == ConsistencyLabel::consistent);
  // slope 1/eps = 2 overestimates right of the origin
  CHECK(classify_consistency(SignalFunction::quantizer_approx(0.5), 0.0) ==
        ConsistencyLabel::inconsistent);
  // one-sided boundary neighborhoods at +-1
  CHECK(classify_consistency(SignalFunction::quantizer_approx(0.5), 1.0) ==
        ConsistencyLabel::consistent);
  CHECK(classify_consistency(SignalFunction::quantizer_approx(0.5), -1.0) ==
        ConsistencyLabel::consistent);
  CHECK(classify_consistency(fig3_signal(), 0.0) == ConsistencyLabel::inconsistent);
}

TEST_CASE("classify_consistency: requires a fixed point") {
  CHECK_THROWS_AS(classify_consistency(SignalFunction::tanh_gain(1.0), 0.5), not_a_fixed_point);
}

// A violation profile s(x)-x ~ 5e-9 decaying to 2e-11 keeps the product
// (x-c)(s(x)-x) between the 1e-12 slack and the 1e-9 definite threshold at
// every probed radius: neither consistent nor definitely inconsistent.
TEST_CASE("classify_consistency: marginal violations are ambiguous") {
  const auto s = SignalFunction::piecewise_linear(
      {{-1, -1}, {0, 0}, {1e-3, 1e-3 + 5e-9}, {0.5, 0.5 + 2e-11}, {1, 1}});
  CHECK(classify_consistency(s, 0.0) == ConsistencyLabel::ambiguous);
}

TEST_CASE("analyze_fixed_points labels intervals, including boundary contact") {
  // s == x on [-1,-0.5] and on [0.5,1]; in between s < x, so the left
  // interval is approached from the right (consistent) while the right
  // interval is repelled on its left (boundary-ambiguous).
  const auto s =
      SignalFunction::piecewise_linear({{-1, -1}, {-0.5, -0.5}, {0, -0.2}, {0.5, 0.5}, {1, 1}});
  const FixedPointSet set = analyze_fixed_points(s);
  REQUIRE(set.intervals.size() == 2);
  CHECK(set.intervals[0].consistency == ConsistencyLabel::consistent);
  CHECK(set.intervals[1].consistency == ConsistencyLabel::ambiguous);

  const FixedPointSet sine = analyze_fixed_points(fig3_signal());
  for (const auto& iv : sine.intervals) CHECK(iv.consistency == ConsistencyLabel::consistent);
  REQUIRE(sine.isolated.size() == 1);
  CHECK(sine.isolated[0].consistency == ConsistencyLabel::inconsistent);
}

TEST_CASE("every listed fixed point/interval satisfies the residual tolerance") {
  for (const auto& s : valid_signals()) {
    CAPTURE(s.describe());
    const FixedPointSet set = find_fixed_points(s);
    for (const auto& p : set.isolated) {
      CHECK(std::abs(s(p.location) - p.location) <= set.residual_tol);
    }
    for (const auto& iv : set.intervals) {
      for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double x = iv.lo + t * (iv.hi - iv.lo);
        CHECK(std::abs(s(x) - x) <= set.residual_tol);
      }
    }
    // separation and non-overlap invariants
    for (size_t i = 1; i < set.isolated.size(); ++i)
      CHECK(set.isolated[i].location - set.isolated[i - 1].location > set.merge_tol);
    for (const auto& p : set.isolated)
      for (const auto& iv : set.intervals) CHECK((p.location < iv.lo || p.location > iv.hi));
  }
}

TEST_CASE("slope_at matches closed forms") {
  CHECK(SignalFunction::identity().slope_at(0.3) == 1.0);
  CHECK(SignalFunction::affine(0.5, 0.25).slope_at(0.0) == 0.5);
  CHECK(SignalFunction::tanh_gain(1.0).slope_at(0.0) == 1.0);
  CHECK(SignalFunction::tanh_gain(20.0).slope_at(0.0) == 20.0);
  CHECK(SignalFunction::quantizer_approx(0.5).slope_at(0.0) == 2.0);
  CHECK(SignalFunction::quantizer_approx(0.5).slope_at(0.9) == 0.0);
  CHECK(fig3_signal().slope_at(0.0) == doctest::Approx(1.6 / std::sin(1.6)));
  CHECK(fig3_signal().slope_at(0.9) == 1.0);
}
