#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

/// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct graph_error : error {
  using error::error;
};

struct signal_error : error {
  using error::error;
};

/// Thrown when the requested value is not a fixed point of the signal.
struct not_a_fixed_point : error {
  using error::error;
};

/// Thrown by the integrator when a state leaves [-1,1]^N by more than the
/// projection tolerance. The exact flow is box invariant, so this indicates
/// a step size too large for the signal's Lipschitz constant or an invalid
/// signal function.
struct invariance_violation : error {
  invariance_violation(const std::string& msg, double excursion_)
      : error(msg), excursion(excursion_) {}
  double excursion;
};

struct config_error : error {
  using error::error;
};

}  // namespace nlc
