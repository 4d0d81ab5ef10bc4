#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gracecbf/analysis.hpp"
#include "gracecbf/scenario.hpp"

namespace gracecbf {

/// Per-run knobs that may replace registry defaults.
struct RunOverrides {
  std::optional<std::vector<double>> x0;
  std::optional<double> v0;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> horizon;
  std::optional<double> output_step;
  std::optional<std::filesystem::path> out_dir;

  /// Fields set in `other` win.
  void merge(const RunOverrides& other);
};

struct RunSummary {
  std::string scenario_id;
  Vec initial_state;
  bool collided = false;
  bool catastrophe = false;
  bool terminated_early = false;
  /// Over recorded samples.
  double peak_abs_u = 0.0;
  std::optional<double> min_h;
  std::optional<double> min_h2;
  std::optional<double> min_h_g;
  double final_time = 0.0;
  double final_x = 0.0;
  double wall_clock_seconds = 0.0;
  IntegrationStats stats;
};

struct ConditionRun {
  Trajectory trajectory;
  RunSummary summary;
  std::optional<std::filesystem::path> csv_path;
};

struct RunResult {
  std::string scenario_id;
  std::vector<ConditionRun> runs;
  /// Collision-flag mismatches against the bundled expectations.
  std::vector<std::string> expectation_failures;
  std::optional<std::filesystem::path> summary_path;

  bool ok() const { return expectation_failures.empty(); }
};

RunSummary summarize(const std::string& scenario_id, const Vec& x0, const Trajectory& trajectory);

/// Runs one scenario, writing one CSV per initial condition and a summary
/// report when overrides.out_dir is set. Throws UnknownScenario, or the
/// simulator's errors with the failing time in the message.
RunResult run(const std::string& scenario_id, const RunOverrides& overrides = {});
RunResult run(const Scenario& scenario, const RunOverrides& overrides = {});

/// Plain-text block per initial condition.
std::string format_summary(const RunResult& result);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::string scenario_id;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::string format() const;
};

/// Least-squares slope of xdot against x on the samples where the filter is
/// (active = true) or is not (false) overriding the baseline.
std::optional<double> phase_slope(const std::vector<Trajectory>& runs, bool active);

/// Runs the scenario at its defaults and checks every bundled expectation:
/// collision flags, peak |u|, failsafe margin and Lyapunov descent for
/// graceful runs, and phase slopes / invariance for the zeroing example.
VerifyReport verify(const std::string& scenario_id, const RunOverrides& overrides = {});

namespace thresholds {
inline constexpr double kFailsafeMargin = 1e-6;
inline constexpr double kDescentV1 = 1e-6;
inline constexpr double kDescentV2 = 1e-4;
inline constexpr double kSlope = 0.05;
inline constexpr double kInvariance = 1e-6;
inline constexpr double kConvergence = 1e-2;
}  // namespace thresholds

/// INI-style overrides: one [scenario-id] section per scenario with keys
/// x0 (comma-separated), v0, rtol, atol, horizon, output_step, out.
/// Throws ConfigError on unknown keys or bad values and UnknownScenario on
/// unknown sections.
std::map<std::string, RunOverrides> load_config(const std::filesystem::path& path);

}  // namespace gracecbf
