#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "gracecbf/filter.hpp"
#include "gracecbf/plant.hpp"

namespace gracecbf {

struct SimConfig {
  double horizon = 8.0;
  double output_step = 1e-3;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double min_step = 1e-12;
  /// Upper bound on accepted steps; keeps a single step from hiding a
  /// transient between two output samples.
  double max_step = 1e-2;
  /// Collision is detected when x[0] crosses this value from above.
  std::optional<double> wall_position;

  /// Throws InvalidArgument on inconsistent settings.
  void validate() const;
};

enum class EventKind { Collision, CatastropheBoundary, Finished };

std::string_view to_string(EventKind kind);

struct Event {
  double time;
  EventKind kind;
};

/// Barrier-derived series recorded alongside the state. Unset fields do not
/// apply to the scenario.
struct BarrierSignals {
  std::optional<double> h;
  std::optional<double> h2;
  std::optional<double> h_g;
  std::optional<double> h_g_dot;
  std::optional<double> lyapunov;
};

using Controller = std::function<FilterResult(StateView)>;
using SignalFn = std::function<BarrierSignals(StateView)>;

struct IntegrationStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  /// Steps shortened to end at a filter switch.
  std::size_t switch_splits = 0;
  double smallest_step = 0.0;
  /// Extremes over accepted step endpoints, which resolve transients the
  /// output grid can step over.
  double internal_peak_abs_u = 0.0;
  std::optional<double> internal_min_wall_gap;
};

/// Uniformly sampled closed-loop run. All per-sample vectors have the same
/// length; a terminal event, if any, is the last sample.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<FilterResult> controls;
  std::vector<BarrierSignals> signals;
  std::vector<Event> events;
  bool terminated_early = false;
  IntegrationStats stats;

  std::size_t size() const noexcept { return times.size(); }
  bool has_event(EventKind kind) const;
  std::optional<Event> first_event(EventKind kind) const;
};

/// One accepted integrator step with the data for cubic Hermite
/// interpolation across it.
struct DenseStep {
  double t0;
  double t1;
  Vec y0;
  Vec y1;
  Vec f0;
  Vec f1;

  Vec evaluate(double t) const;
};

struct InternalSolution {
  std::vector<DenseStep> steps;

  bool empty() const noexcept { return steps.empty(); }
  double start() const { return steps.front().t0; }
  double end() const { return steps.back().t1; }
  /// Interpolated state; t must lie within [start(), end()].
  Vec evaluate(double t) const;
};

/// Samples t = k * output_step for every k with t inside the solution span.
/// Only times and states are filled.
Trajectory dense_sample(const InternalSolution& solution, double output_step);

/// Bisection for a sign change of event over [t_lo, t_hi]; stops once the
/// bracket is no wider than `width` or after max_iterations halvings and
/// returns the bracket midpoint. Throws NoSignChange.
double locate_event(double t_lo, double t_hi, const std::function<double(double)>& event,
                    double width = 1e-9, int max_iterations = 60);

/// Integrates xdot = f(x) + g(x) u*(x) from t = 0.
///
/// Errors: ControllerUndefined if the controller cannot be evaluated at x0,
/// StepUnderflow if error control drives the step below min_step. Collision
/// and CatastropheBoundary are terminal events, not exceptions.
Trajectory integrate(const ControlAffineSystem& system, const Controller& controller, StateView x0,
                     const SimConfig& config, const SignalFn& signals = {});

}  // namespace gracecbf
