#pragma once

#include <span>
#include <variant>
#include <vector>

#include "gracecbf/barrier.hpp"
#include "gracecbf/plant.hpp"

namespace gracecbf {

/// u_d = -k (x - x_d) for a velocity-actuated plant.
struct ProportionalPosition {
  double k;
  double target;
};

/// u_d = -k1 (x - x_d) - k2 xdot for an acceleration-actuated plant.
struct PositionVelocityFeedback {
  double k1;
  double k2;
  double target;
};

using BaselineLaw = std::variant<ProportionalPosition, PositionVelocityFeedback>;

/// Throws InvalidArgument for nonpositive or non-finite gains.
void validate(const BaselineLaw& law);

/// Throws DimensionMismatch if the state does not match the law (1 for P,
/// 2 for PD).
double baseline_control(StateView x, const BaselineLaw& law);

/// Solution of min 1/2 |u - u_d|^2 s.t. a.u >= c.
template <typename Control>
struct BasicFilterResult {
  Control u_star;
  /// True when the safety constraint moved the command; a tie (u_d exactly on
  /// the boundary) counts as inactive.
  bool active = false;
  Control u_d;
  double u_sf = 0.0;
};

using FilterResult = BasicFilterResult<double>;
using VectorFilterResult = BasicFilterResult<std::vector<double>>;

/// u* = max(u_d, u_sf). Requires a unit scalar normal.
FilterResult filter_scalar(double u_d, const AffineControlConstraint& constraint);

/// Projection of u_d onto the half-space a.u >= c. In dimension 1 the result
/// is bit-identical to filter_scalar (with the bound c / a).
VectorFilterResult filter_projection(std::span<const double> u_d,
                                     const AffineControlConstraint& constraint);

}  // namespace gracecbf
