#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gracecbf/simulator.hpp"

namespace gracecbf {

/// V(h_g) = h_g - ln(h_g + 1). Zero only at h_g = 0, unbounded as h_g -> -1.
/// Throws DomainError for h_g <= -1.
double lyapunov_v1(double h_g);

/// V = 1/2 h_g_dot^2 (1 - step(h_g_dot)) + wn^2 (h_g - ln(h_g + 1)) with
/// step(0) = 1, so the kinetic term only counts while h_g is falling.
double lyapunov_v2(double h_g, double h_g_dot, double omega_n);

/// Time for the equality dynamics h_g' = -gamma h_g / (h_g + 1) to carry
/// h_g from start to end, both in (-1, 0) with start <= end.
double implicit_bound_time(double h_g_start, double h_g_end, double gamma);

/// Inverts implicit_bound_time for each requested time (bisection to 1e-12).
/// The result is the lower envelope any graceful1-filtered run starting at
/// h_g0 must stay above.
std::vector<double> bound_trajectory(double h_g0, std::span<const double> times, double gamma);

enum class LyapunovKind { V1, V2 };

struct DescentParams {
  LyapunovKind which = LyapunovKind::V1;
  /// Required for V2.
  double omega_n = 0.0;
  double tolerance = 1e-6;
};

struct DescentReport {
  LyapunovKind which = LyapunovKind::V1;
  /// Largest V[i+1] - V[i] over consecutive danger-zone samples, floored at 0.
  double max_increase = 0.0;
  std::optional<double> worst_time;
  std::size_t pairs_checked = 0;
  bool holds = true;
};

/// Samples count when -1 < h_g < 0 at both ends of a step. Reads h_g (and
/// h_g_dot for V2) from the recorded signals; throws MissingSignal if absent.
DescentReport check_descent(const Trajectory& trajectory, const DescentParams& params);

enum class InvariantSet {
  Safe,               // h >= 0
  SafeOrDanger,       // h_g > -1
  SafeAndSecondary,   // h >= 0 and h2 >= 0
  GracefulFirst,      // h_g >= 0 and h_g_dot + gamma1 h_g >= 0
  GracefulSecond,     // h_g >= 0 and h_g_dot + gamma2 h_g >= 0
};

std::string_view to_string(InvariantSet set);

struct InvarianceParams {
  double tolerance = 1e-6;
  /// Decay rate for the GracefulFirst / GracefulSecond margins.
  double gamma = 0.0;
};

struct InvarianceReport {
  InvariantSet set_id = InvariantSet::Safe;
  double initial_margin = 0.0;
  double min_margin = 0.0;
  bool started_outside = false;
  bool violated = false;
  std::optional<double> first_violation_time;
};

/// Margin of one state with respect to a set; negative means outside.
double set_margin(const BarrierSignals& s, InvariantSet set, const InvarianceParams& params);

InvarianceReport check_invariance(const Trajectory& trajectory, InvariantSet set,
                                  const InvarianceParams& params);

}  // namespace gracecbf
