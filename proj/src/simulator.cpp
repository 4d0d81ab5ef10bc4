#include "gracecbf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gracecbf/errors.hpp"

namespace gracecbf {
namespace {

// Dormand-Prince 5(4) tableau (autonomous, so no c_i).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI step-size controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMaxShrink = 10.0;  // h_new >= h / 10
constexpr double kMaxGrow = 5.0;     // h_new <= 5 h
constexpr double kUndefinedShrink = 0.25;

/// Closed-loop right-hand side plus the filter decision that produced it.
struct Evaluation {
  Vec f;
  FilterResult control;
};

/// Thrown internally when a stage lands where the controller is undefined.
struct StageUndefined {};

class ClosedLoop {
 public:
  ClosedLoop(const ControlAffineSystem& system, const Controller& controller)
      : system_(system), controller_(controller) {}

  Evaluation operator()(StateView y) {
    ++evaluations;
    FilterResult r;
    try {
      r = controller_(y);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CatastropheBoundary) throw StageUndefined{};
      throw;
    }
    if (!std::isfinite(r.u_star)) throw StageUndefined{};
    const double u = r.u_star;
    Vec f = system_.dynamics(y, std::span<const double>(&u, 1));
    return {std::move(f), r};
  }

  std::size_t evaluations = 0;

 private:
  const ControlAffineSystem& system_;
  const Controller& controller_;
};

struct StepAttempt {
  Vec y1;
  Evaluation end;
  double error_norm = 0.0;
};

Vec axpy_sum(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (const auto& [coef, k] : terms) acc += coef * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

double scaled_norm(const Vec& v, const Vec& y0, const Vec& y1, const SimConfig& cfg) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    sum += (v[i] / sk) * (v[i] / sk);
  }
  return std::sqrt(sum / static_cast<double>(v.size()));
}

StepAttempt dopri_step(ClosedLoop& rhs, const Vec& y0, const Vec& k1, double h, const SimConfig& cfg) {
  const Vec k2 = rhs(axpy_sum(y0, h, {{a21, &k1}})).f;
  const Vec k3 = rhs(axpy_sum(y0, h, {{a31, &k1}, {a32, &k2}})).f;
  const Vec k4 = rhs(axpy_sum(y0, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}})).f;
  const Vec k5 = rhs(axpy_sum(y0, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}})).f;
  const Vec k6 =
      rhs(axpy_sum(y0, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}})).f;
  StepAttempt out;
  out.y1 = axpy_sum(y0, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
  for (double v : out.y1) {
    if (!std::isfinite(v)) throw StageUndefined{};
  }
  out.end = rhs(out.y1);
  const Vec& k7 = out.end.f;
  Vec err(y0.size());
  for (std::size_t i = 0; i < err.size(); ++i) {
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  out.error_norm = scaled_norm(err, y0, out.y1, cfg);
  return out;
}

[[noreturn]] void throw_underflow(double t, const Vec& y) {
  throw Error(ErrorCode::StepUnderflow, "step size fell below min_step at t = " + std::to_string(t) +
                                            " (state x = " + std::to_string(y[0]) + ")");
}

double initial_step(ClosedLoop& rhs, const Vec& y0, const Vec& f0, const SimConfig& cfg) {
  const double d0 = scaled_norm(y0, y0, y0, cfg);
  const double d1 = scaled_norm(f0, y0, y0, cfg);
  double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, cfg.max_step);
  double h1 = h0;
  try {
    Vec y1 = y0;
    for (std::size_t i = 0; i < y1.size(); ++i) y1[i] += h0 * f0[i];
    const Vec f1 = rhs(y1).f;
    Vec diff(f0.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = f1[i] - f0[i];
    const double d2 = scaled_norm(diff, y0, y0, cfg) / h0;
    const double der = std::max(d2, d1);
    h1 = der <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der, 0.2);
  } catch (const StageUndefined&) {
  }
  return std::min({100.0 * h0, h1, cfg.max_step});
}

}  // namespace

void SimConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(horizon)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  if (!positive(output_step)) throw Error(ErrorCode::InvalidArgument, "output_step must be positive");
  if (!positive(rel_tol) || !positive(abs_tol)) {
    throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
  }
  if (!positive(min_step) || !(min_step < output_step)) {
    throw Error(ErrorCode::InvalidArgument, "min_step must be positive and below output_step");
  }
  if (!positive(max_step) || !(max_step > min_step)) {
    throw Error(ErrorCode::InvalidArgument, "max_step must exceed min_step");
  }
  if (wall_position && !std::isfinite(*wall_position)) {
    throw Error(ErrorCode::InvalidArgument, "wall position must be finite");
  }
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Collision: return "Collision";
    case EventKind::CatastropheBoundary: return "CatastropheBoundary";
    case EventKind::Finished: return "Finished";
  }
  return "?";
}

bool Trajectory::has_event(EventKind kind) const { return first_event(kind).has_value(); }

std::optional<Event> Trajectory::first_event(EventKind kind) const {
  for (const auto& e : events) {
    if (e.kind == kind) return e;
  }
  return std::nullopt;
}

Vec DenseStep::evaluate(double t) const {
  const double h = t1 - t0;
  if (h <= 0.0) return y0;
  const double s = (t - t0) / h;
  const double w = s * (s - 1.0);
  Vec y(y0.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dy = y1[i] - y0[i];
    y[i] = y0[i] + s * dy + w * ((1.0 - 2.0 * s) * dy + (s - 1.0) * h * f0[i] + s * h * f1[i]);
  }
  return y;
}

Vec InternalSolution::evaluate(double t) const {
  if (steps.empty()) throw Error(ErrorCode::InvalidArgument, "empty solution");
  auto it = std::lower_bound(steps.begin(), steps.end(), t,
                             [](const DenseStep& s, double v) { return s.t1 < v; });
  if (it == steps.end()) it = std::prev(steps.end());
  return it->evaluate(std::clamp(t, it->t0, it->t1));
}

Trajectory dense_sample(const InternalSolution& solution, double output_step) {
  Trajectory out;
  if (solution.empty()) return out;
  if (!(output_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "output_step must be positive");
  const double t_start = solution.start();
  const double t_end = solution.end();
  const double slack = 1e-9 * output_step;

  auto k = static_cast<long long>(std::ceil((t_start - slack) / output_step));
  std::size_t step = 0;
  for (;; ++k) {
    double t = static_cast<double>(k) * output_step;
    if (t > t_end + slack) break;
    t = std::clamp(t, t_start, t_end);
    while (step + 1 < solution.steps.size() && solution.steps[step].t1 < t) ++step;
    out.times.push_back(t);
    out.states.push_back(solution.steps[step].evaluate(t));
  }
  return out;
}

double locate_event(double t_lo, double t_hi, const std::function<double(double)>& event,
                    double width, int max_iterations) {
  double g_lo = event(t_lo);
  const double g_hi = event(t_hi);
  if (g_lo == 0.0) return t_lo;
  if (g_hi == 0.0) return t_hi;
  if ((g_lo > 0.0) == (g_hi > 0.0)) {
    throw Error(ErrorCode::NoSignChange, "event function does not change sign on the bracket");
  }
  for (int i = 0; i < max_iterations && (t_hi - t_lo) > width; ++i) {
    const double mid = 0.5 * (t_lo + t_hi);
    const double g_mid = event(mid);
    if (g_mid == 0.0) return mid;
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      t_lo = mid;
      g_lo = g_mid;
    } else {
      t_hi = mid;
    }
  }
  return 0.5 * (t_lo + t_hi);
}

Trajectory integrate(const ControlAffineSystem& system, const Controller& controller, StateView x0,
                     const SimConfig& config, const SignalFn& signals) {
  config.validate();
  if (system.input_dim() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "integrate drives single-input plants");
  }
  if (x0.size() != system.state_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "initial state does not match plant");
  }
  for (double v : x0) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "initial state is not finite");
  }

  ClosedLoop rhs(system, controller);
  Vec y(x0.begin(), x0.end());
  Evaluation current;
  try {
    current = rhs(y);
  } catch (const StageUndefined&) {
    throw Error(ErrorCode::ControllerUndefined, "controller is undefined at the initial state");
  }

  const std::optional<double> wall = config.wall_position;
  auto wall_gap = [&wall](const Vec& s) { return s[0] - *wall; };

  IntegrationStats stats;
  stats.smallest_step = std::numeric_limits<double>::infinity();
  stats.internal_peak_abs_u = std::abs(current.control.u_star);
  if (wall) stats.internal_min_wall_gap = wall_gap(y);

  InternalSolution solution;
  const double t_end = config.horizon;
  double t = 0.0;
  double h = initial_step(rhs, y, current.f, config);
  double previous_error = 1e-4;
  std::optional<Event> terminal;

  while (t < t_end && !terminal) {
    h = std::min({h, config.max_step, t_end - t});
    // Absorb a sliver of horizon left over by rounding.
    if (t_end - (t + h) < config.min_step) h = t_end - t;

    StepAttempt attempt;
    try {
      attempt = dopri_step(rhs, y, current.f, h, config);
    } catch (const StageUndefined&) {
      ++stats.rejected_steps;
      h *= kUndefinedShrink;
      if (h < config.min_step) terminal = Event{t, EventKind::CatastropheBoundary};
      continue;
    }

    if (attempt.error_norm > 1.0) {
      ++stats.rejected_steps;
      h /= std::min(kMaxGrow, std::pow(attempt.error_norm, kExpo) / kSafety);
      if (h < config.min_step) {
        throw_underflow(t, y);
      }
      continue;
    }

    double h_taken = h;
    if (attempt.end.control.active != current.control.active) {
      // End this step at the filter switch so no step straddles a kink.
      const DenseStep trial{t, t + h, y, attempt.y1, current.f, attempt.end.f};
      const bool start_flag = current.control.active;
      double lo = t;
      double hi = t + h;
      for (int i = 0; i < 60 && (hi - lo) > 1e-12 * std::max(1.0, std::abs(t)); ++i) {
        const double mid = 0.5 * (lo + hi);
        bool flag = start_flag;
        try {
          flag = rhs(trial.evaluate(mid)).control.active;
        } catch (const StageUndefined&) {
          hi = mid;
          continue;
        }
        (flag == start_flag ? lo : hi) = mid;
      }
      const double h_split = hi - t;
      if (h_split >= config.min_step && h_split < h) {
        try {
          StepAttempt split = dopri_step(rhs, y, current.f, h_split, config);
          if (split.error_norm <= 1.0) {
            attempt = std::move(split);
            h_taken = h_split;
            ++stats.switch_splits;
          }
        } catch (const StageUndefined&) {
        }
      }
    }

    DenseStep step{t, t + h_taken, y, attempt.y1, current.f, attempt.end.f};
    ++stats.accepted_steps;
    stats.smallest_step = std::min(stats.smallest_step, h_taken);
    stats.internal_peak_abs_u = std::max(stats.internal_peak_abs_u, std::abs(attempt.end.control.u_star));

    if (wall && wall_gap(step.y0) > 0.0 && wall_gap(step.y1) <= 0.0) {
      const double t_hit = locate_event(step.t0, step.t1,
                                        [&](double tau) { return wall_gap(step.evaluate(tau)); });
      step.y1 = step.evaluate(t_hit);
      step.t1 = t_hit;
      try {
        step.f1 = rhs(step.y1).f;
      } catch (const StageUndefined&) {
      }
      terminal = Event{t_hit, EventKind::Collision};
    }
    if (wall) {
      stats.internal_min_wall_gap = std::min(*stats.internal_min_wall_gap, wall_gap(step.y1));
    }
    solution.steps.push_back(step);
    if (terminal) break;

    const double fac = std::pow(attempt.error_norm, kExpo) / std::pow(previous_error, kBeta);
    previous_error = std::max(attempt.error_norm, 1e-4);
    t = step.t1;
    y = std::move(attempt.y1);
    current = std::move(attempt.end);
    // Split steps are short by construction; grow from the pre-split size.
    h = h / std::clamp(fac / kSafety, 1.0 / kMaxGrow, kMaxShrink);
    if (h < config.min_step && t_end - t > config.min_step) throw_underflow(t, y);
  }
  stats.rhs_evaluations = rhs.evaluations;
  if (!std::isfinite(stats.smallest_step)) stats.smallest_step = 0.0;

  Trajectory traj;
  if (solution.empty()) {
    traj.times.push_back(0.0);
    traj.states.push_back(y);
  } else {
    traj = dense_sample(solution, config.output_step);
  }
  const double t_last = solution.empty() ? 0.0 : solution.end();
  if (traj.times.back() < t_last) {
    // Terminal event or off-grid horizon.
    traj.times.push_back(t_last);
    traj.states.push_back(solution.steps.back().y1);
  }

  traj.controls.reserve(traj.size());
  for (const auto& s : traj.states) {
    try {
      traj.controls.push_back(controller(s));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CatastropheBoundary) throw;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      traj.controls.push_back({nan, false, nan, nan});
    }
  }
  if (signals) {
    traj.signals.reserve(traj.size());
    for (const auto& s : traj.states) traj.signals.push_back(signals(s));
  } else {
    traj.signals.resize(traj.size());
  }

  if (terminal) {
    traj.events.push_back(*terminal);
    traj.terminated_early = true;
  } else {
    traj.events.push_back({t_last, EventKind::Finished});
  }
  traj.stats = stats;
  return traj;
}

}  // namespace gracecbf
