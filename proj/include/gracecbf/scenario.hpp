#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gracecbf/barrier.hpp"
#include "gracecbf/filter.hpp"
#include "gracecbf/simulator.hpp"

namespace gracecbf {

/// Geometry of the wall-approach problems.
struct WallGeometry {
  double target = 0.0;       // x_d
  double wall = 1.0;         // x_w
  double safe_distance = 3.0;  // x_sf
};

/// Outcome a bundled scenario must reproduce for one initial position.
struct Expectation {
  double x0;
  bool collided;
  std::optional<double> peak_abs_u;
  double peak_rel_tolerance = 0.0;
};

struct Scenario {
  std::string id;
  std::string description;
  std::shared_ptr<const ControlAffineSystem> plant;
  BaselineLaw baseline;
  BarrierSpec barrier;
  WallGeometry geometry;
  /// One state per run; second-order plants carry (x, xdot).
  std::vector<Vec> initial_conditions;
  SimConfig sim;
  std::vector<Expectation> expectations;

  const Expectation* expectation_for(double x0) const;
};

/// Parameter values of the bundled experiments.
namespace params {
inline constexpr double kTarget = 0.0;
inline constexpr double kWall = 1.0;
inline constexpr double kSafeDistance = 3.0;
inline constexpr double kBaselineGain = 0.5;
inline constexpr double kZeroingGain = 3.0;
inline constexpr double kPositionGain = 1.0;
inline constexpr double kVelocityGain = 2.0;
inline constexpr double kExpGamma1 = 4.5;
inline constexpr double kExpGamma2 = 0.5;
inline constexpr double kNaturalFrequency = 2.0;
inline constexpr double kOverdampedZeta = 2.0;
inline constexpr double kUnderdampedZeta = 0.5;
inline constexpr double kInitialVelocity = -25.0;
inline constexpr double kPeakTolerance = 0.20;
}  // namespace params

/// The five bundled experiments in a fixed order.
const std::vector<Scenario>& registry();

/// Throws UnknownScenario.
const Scenario& find_scenario(const std::string& id);

/// x -> max(u_d, u_sf) for the scenario's baseline and barrier.
Controller make_controller(const Scenario& scenario);

/// Barrier series recorded per sample: h (and h2 for the exponential
/// family), h_g and h_g_dot for graceful barriers, and the matching
/// Lyapunov candidate.
SignalFn make_signals(const Scenario& scenario);

/// Builds the initial state for a scenario from a position and, for
/// second-order plants, a velocity.
Vec initial_state(const Scenario& scenario, double x0, std::optional<double> v0);

}  // namespace gracecbf
