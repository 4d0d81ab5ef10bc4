#include "gracecbf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gracecbf/errors.hpp"

namespace gracecbf {
namespace {

double require_signal(const std::optional<double>& v, const char* name) {
  if (!v) throw Error(ErrorCode::MissingSignal, std::string("trajectory has no ") + name + " series");
  return *v;
}

double bound_residual_time(double h_g_start, double h_g, double gamma) {
  return ((h_g_start - h_g) + std::log(h_g_start / h_g)) / gamma;
}

}  // namespace

double lyapunov_v1(double h_g) {
  if (!(h_g > -1.0)) throw Error(ErrorCode::DomainError, "V1 requires h_g > -1");
  // log1p keeps V accurate (and nonnegative) near h_g = 0.
  return h_g - std::log1p(h_g);
}

double lyapunov_v2(double h_g, double h_g_dot, double omega_n) {
  if (!(h_g > -1.0)) throw Error(ErrorCode::DomainError, "V2 requires h_g > -1");
  if (!(omega_n > 0.0)) throw Error(ErrorCode::InvalidArgument, "omega_n must be positive");
  const double kinetic = h_g_dot >= 0.0 ? 0.0 : 0.5 * h_g_dot * h_g_dot;
  return kinetic + omega_n * omega_n * (h_g - std::log1p(h_g));
}

double implicit_bound_time(double h_g_start, double h_g_end, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  if (!(-1.0 < h_g_start && h_g_start <= h_g_end && h_g_end < 0.0)) {
    throw Error(ErrorCode::DomainError, "need -1 < h_g_start <= h_g_end < 0");
  }
  return bound_residual_time(h_g_start, h_g_end, gamma);
}

std::vector<double> bound_trajectory(double h_g0, std::span<const double> times, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  if (!(-1.0 < h_g0 && h_g0 < 0.0)) throw Error(ErrorCode::DomainError, "need -1 < h_g0 < 0");
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0)) throw Error(ErrorCode::DomainError, "bound times must be nonnegative");
    if (t == 0.0) {
      out.push_back(h_g0);
      continue;
    }
    // Elapsed time is increasing in h on [h_g0, 0) and diverges at 0.
    double lo = h_g0;
    double hi = 0.0;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (bound_residual_time(h_g0, mid, gamma) < t ? lo : hi) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

DescentReport check_descent(const Trajectory& trajectory, const DescentParams& params) {
  DescentReport report;
  report.which = params.which;
  const auto& sig = trajectory.signals;
  auto in_danger = [](double h_g) { return h_g > -1.0 && h_g < 0.0; };
  auto value = [&](const BarrierSignals& s) {
    const double h_g = require_signal(s.h_g, "h_g");
    if (params.which == LyapunovKind::V1) return lyapunov_v1(h_g);
    return lyapunov_v2(h_g, require_signal(s.h_g_dot, "h_g_dot"), params.omega_n);
  };

  for (std::size_t i = 0; i + 1 < sig.size(); ++i) {
    const double a = require_signal(sig[i].h_g, "h_g");
    const double b = require_signal(sig[i + 1].h_g, "h_g");
    if (!in_danger(a) || !in_danger(b)) continue;
    ++report.pairs_checked;
    const double increase = value(sig[i + 1]) - value(sig[i]);
    if (increase > report.max_increase) {
      report.max_increase = increase;
      report.worst_time = trajectory.times[i + 1];
    }
  }
  report.holds = report.max_increase <= params.tolerance;
  return report;
}

std::string_view to_string(InvariantSet set) {
  switch (set) {
    case InvariantSet::Safe: return "S";
    case InvariantSet::SafeOrDanger: return "S+D";
    case InvariantSet::SafeAndSecondary: return "S&S2";
    case InvariantSet::GracefulFirst: return "Sg1";
    case InvariantSet::GracefulSecond: return "Sg2";
  }
  return "?";
}

double set_margin(const BarrierSignals& s, InvariantSet set, const InvarianceParams& params) {
  switch (set) {
    case InvariantSet::Safe:
      return s.h ? *s.h : require_signal(s.h_g, "h or h_g");
    case InvariantSet::SafeOrDanger:
      return require_signal(s.h_g, "h_g") + 1.0;
    case InvariantSet::SafeAndSecondary:
      return std::min(require_signal(s.h, "h"), require_signal(s.h2, "h2"));
    case InvariantSet::GracefulFirst:
    case InvariantSet::GracefulSecond: {
      if (!(params.gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "set needs a positive gamma");
      const double h_g = require_signal(s.h_g, "h_g");
      return std::min(h_g, require_signal(s.h_g_dot, "h_g_dot") + params.gamma * h_g);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown set");
}

InvarianceReport check_invariance(const Trajectory& trajectory, InvariantSet set,
                                  const InvarianceParams& params) {
  InvarianceReport report;
  report.set_id = set;
  if (trajectory.signals.empty()) throw Error(ErrorCode::MissingSignal, "trajectory has no signals");
  report.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trajectory.signals.size(); ++i) {
    const double m = set_margin(trajectory.signals[i], set, params);
    if (i == 0) report.initial_margin = m;
    report.min_margin = std::min(report.min_margin, m);
    if (m < -params.tolerance && !report.first_violation_time) {
      report.first_violation_time = trajectory.times[i];
    }
  }
  report.started_outside = report.initial_margin < -params.tolerance;
  report.violated = report.min_margin < -params.tolerance;
  return report;
}

}  // namespace gracecbf
