#include "gracecbf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gracecbf/csv.hpp"
#include "gracecbf/errors.hpp"

namespace gracecbf {
namespace {

template <typename T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

void min_into(std::optional<double>& acc, const std::optional<double>& v) {
  if (v && (!acc || *v < *acc)) acc = v;
}

std::string describe_state(const Vec& x) {
  std::string s = "x0=" + format_number(x[0]);
  if (x.size() > 1) s += " v0=" + format_number(x[1]);
  return s;
}

std::string optional_text(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("n/a");
}

double parse_config_number(const std::string& section, const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  const auto trailing = text.find_first_not_of(" \t", used);
  if (used == 0 || trailing != std::string::npos) {
    throw Error(ErrorCode::ConfigError, "[" + section + "] " + key + ": not a number: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& section, const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_config_number(section, key, item));
  if (out.empty()) throw Error(ErrorCode::ConfigError, "[" + section + "] " + key + ": empty list");
  return out;
}

CheckResult check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

}  // namespace

void RunOverrides::merge(const RunOverrides& other) {
  take(x0, other.x0);
  take(v0, other.v0);
  take(rel_tol, other.rel_tol);
  take(abs_tol, other.abs_tol);
  take(horizon, other.horizon);
  take(output_step, other.output_step);
  take(out_dir, other.out_dir);
}

RunSummary summarize(const std::string& scenario_id, const Vec& x0, const Trajectory& trajectory) {
  RunSummary s;
  s.scenario_id = scenario_id;
  s.initial_state = x0;
  s.collided = trajectory.has_event(EventKind::Collision);
  s.catastrophe = trajectory.has_event(EventKind::CatastropheBoundary);
  s.terminated_early = trajectory.terminated_early;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double u = trajectory.controls[i].u_star;
    if (std::isfinite(u)) s.peak_abs_u = std::max(s.peak_abs_u, std::abs(u));
    min_into(s.min_h, trajectory.signals[i].h);
    min_into(s.min_h2, trajectory.signals[i].h2);
    min_into(s.min_h_g, trajectory.signals[i].h_g);
  }
  s.final_time = trajectory.times.back();
  s.final_x = trajectory.states.back()[0];
  s.stats = trajectory.stats;
  return s;
}

RunResult run(const std::string& scenario_id, const RunOverrides& overrides) {
  return run(find_scenario(scenario_id), overrides);
}

RunResult run(const Scenario& scenario, const RunOverrides& overrides) {
  SimConfig sim = scenario.sim;
  if (overrides.rel_tol) sim.rel_tol = *overrides.rel_tol;
  if (overrides.abs_tol) sim.abs_tol = *overrides.abs_tol;
  if (overrides.horizon) sim.horizon = *overrides.horizon;
  if (overrides.output_step) sim.output_step = *overrides.output_step;
  sim.validate();

  std::vector<Vec> starts;
  if (overrides.x0) {
    for (double x : *overrides.x0) starts.push_back(initial_state(scenario, x, overrides.v0));
  } else {
    for (const auto& ic : scenario.initial_conditions) {
      starts.push_back(overrides.v0 ? initial_state(scenario, ic[0], overrides.v0) : ic);
    }
  }

  if (overrides.out_dir) std::filesystem::create_directories(*overrides.out_dir);

  const Controller controller = make_controller(scenario);
  const SignalFn signals = make_signals(scenario);
  RunResult result;
  result.scenario_id = scenario.id;
  for (const auto& x0 : starts) {
    ConditionRun cr;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.trajectory = integrate(*scenario.plant, controller, x0, sim, signals);
    } catch (const Error& e) {
      throw Error(e.code(), scenario.id + " (" + describe_state(x0) + "): " + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    cr.summary = summarize(scenario.id, x0, cr.trajectory);
    cr.summary.wall_clock_seconds = std::chrono::duration<double>(t1 - t0).count();

    // Expectations describe the bundled velocity only.
    const bool default_velocity = x0.size() == 1 || !overrides.v0 ||
                                  *overrides.v0 == scenario.initial_conditions.front()[1];
    if (const auto* e = scenario.expectation_for(x0[0]); e && default_velocity) {
      if (e->collided != cr.summary.collided) {
        result.expectation_failures.push_back(describe_state(x0) + ": expected collided=" +
                                              (e->collided ? "true" : "false"));
      }
    }
    if (overrides.out_dir) {
      cr.csv_path = *overrides.out_dir / (scenario.id + "_x0_" + format_number(x0[0]) + ".csv");
      emit_csv(cr.trajectory, *cr.csv_path);
    }
    result.runs.push_back(std::move(cr));
  }

  if (overrides.out_dir) {
    result.summary_path = *overrides.out_dir / (scenario.id + "_summary.txt");
    std::ofstream out(*result.summary_path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + result.summary_path->string());
    out << format_summary(result);
  }
  return result;
}

std::string format_summary(const RunResult& result) {
  std::ostringstream out;
  out << "scenario " << result.scenario_id << '\n';
  for (const auto& cr : result.runs) {
    const auto& s = cr.summary;
    out << "\n[" << describe_state(s.initial_state) << "]\n"
        << "  collided: " << (s.collided ? "true" : "false") << '\n'
        << "  catastrophe: " << (s.catastrophe ? "true" : "false") << '\n'
        << "  terminated_early: " << (s.terminated_early ? "true" : "false") << '\n'
        << "  peak_abs_u: " << format_number(s.peak_abs_u) << '\n'
        << "  min_h: " << optional_text(s.min_h) << '\n'
        << "  min_h2: " << optional_text(s.min_h2) << '\n'
        << "  min_h_g: " << optional_text(s.min_h_g) << '\n'
        << "  final_time: " << format_number(s.final_time) << '\n'
        << "  final_x: " << format_number(s.final_x) << '\n'
        << "  wall_clock_s: " << s.wall_clock_seconds << '\n'
        << "  steps: " << s.stats.accepted_steps << " accepted, " << s.stats.rejected_steps
        << " rejected, " << s.stats.switch_splits << " switch splits\n"
        << "  internal_peak_abs_u: " << format_number(s.stats.internal_peak_abs_u) << '\n'
        << "  internal_min_wall_gap: " << optional_text(s.stats.internal_min_wall_gap) << '\n';
  }
  if (!result.expectation_failures.empty()) {
    out << "\nexpectation failures:\n";
    for (const auto& f : result.expectation_failures) out << "  " << f << '\n';
  }
  return out.str();
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string VerifyReport::format() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << scenario_id << ": " << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
  }
  out << (passed() ? "PASS " : "FAIL ") << scenario_id << '\n';
  return out.str();
}

std::optional<double> phase_slope(const std::vector<Trajectory>& runs, bool active) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& traj : runs) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (traj.controls[i].active != active) continue;
      const double x = traj.states[i][0];
      const double v = traj.controls[i].u_star;
      n += 1;
      sx += x;
      sy += v;
      sxx += x * x;
      sxy += x * v;
    }
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || !(std::abs(denom) > 0.0)) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

VerifyReport verify(const std::string& scenario_id, const RunOverrides& overrides) {
  const Scenario& scenario = find_scenario(scenario_id);
  RunOverrides defaults;
  defaults.rel_tol = overrides.rel_tol;
  defaults.abs_tol = overrides.abs_tol;
  defaults.out_dir = overrides.out_dir;
  const RunResult result = run(scenario, defaults);

  VerifyReport report;
  report.scenario_id = scenario.id;
  auto& checks = report.checks;

  for (const auto& cr : result.runs) {
    const auto& s = cr.summary;
    const std::string tag = describe_state(s.initial_state);
    const Expectation* e = scenario.expectation_for(s.initial_state[0]);
    if (!e) continue;
    checks.push_back(check("collision " + tag, s.collided == e->collided,
                           std::string("expected ") + (e->collided ? "collision" : "no collision") +
                               ", got " + (s.collided ? "collision" : "no collision")));
    if (e->peak_abs_u) {
      const double target = *e->peak_abs_u;
      const double rel = std::abs(s.peak_abs_u - target) / target;
      checks.push_back(check("peak |u| " + tag, rel <= e->peak_rel_tolerance,
                             "measured " + format_number(s.peak_abs_u) + ", target " +
                                 format_number(target) + ", rel err " + format_number(rel)));
    }
  }

  const auto& spec = scenario.barrier;
  if (spec.is_graceful()) {
    const bool first_order = spec.family() == BarrierFamily::Graceful1;
    DescentParams dp;
    dp.which = first_order ? LyapunovKind::V1 : LyapunovKind::V2;
    dp.tolerance = first_order ? thresholds::kDescentV1 : thresholds::kDescentV2;
    if (!first_order) dp.omega_n = spec.damped_gains().omega_n;
    for (const auto& cr : result.runs) {
      const auto& s = cr.summary;
      const std::string tag = describe_state(s.initial_state);
      checks.push_back(check("no catastrophe " + tag, !s.catastrophe && !s.collided, ""));
      const double margin = s.min_h_g.value_or(-1.0) + 1.0;
      checks.push_back(check("failsafe margin " + tag, margin > thresholds::kFailsafeMargin,
                             "min h_g + 1 = " + format_number(margin)));
      const auto d = check_descent(cr.trajectory, dp);
      checks.push_back(check(std::string(first_order ? "V1" : "V2") + " descent " + tag, d.holds,
                             "max increase " + format_number(d.max_increase) + " over " +
                                 std::to_string(d.pairs_checked) + " steps"));
      const double h_g0 = cr.trajectory.signals.front().h_g.value();
      if (first_order && h_g0 < 0.0) {
        const double h_g_end = cr.trajectory.signals.back().h_g.value();
        checks.push_back(check("converges to primary boundary " + tag,
                               std::abs(h_g_end) < thresholds::kConvergence,
                               "h_g(end) = " + format_number(h_g_end)));
      }
    }
  }

  if (spec.family() == BarrierFamily::Zeroing) {
    std::vector<Trajectory> trajectories;
    for (const auto& cr : result.runs) trajectories.push_back(cr.trajectory);
    const double k = std::get<ProportionalPosition>(scenario.baseline).k;
    const double gamma = spec.alpha().gain();
    const auto nominal = phase_slope(trajectories, false);
    const auto safe = phase_slope(trajectories, true);
    checks.push_back(check("baseline phase slope", nominal && std::abs(*nominal + k) <= thresholds::kSlope,
                           "fitted " + optional_text(nominal) + ", expected " + format_number(-k)));
    checks.push_back(check("safe phase slope", safe && std::abs(*safe + gamma) <= thresholds::kSlope,
                           "fitted " + optional_text(safe) + ", expected " + format_number(-gamma)));
    for (const auto& cr : result.runs) {
      const std::string tag = describe_state(cr.summary.initial_state);
      const auto inv = check_invariance(cr.trajectory, InvariantSet::Safe, {thresholds::kInvariance, 0.0});
      if (!inv.started_outside) {
        checks.push_back(check("S invariant " + tag, !inv.violated, "min h = " + format_number(inv.min_margin)));
      } else {
        const double h_end = cr.trajectory.signals.back().h.value();
        checks.push_back(check("returns to S " + tag, h_end > -thresholds::kConvergence,
                               "h(end) = " + format_number(h_end)));
      }
    }
  }
  return report;
}

std::map<std::string, RunOverrides> load_config(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  std::map<std::string, RunOverrides> out;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw Error(ErrorCode::ConfigError, "key '" + section + "' outside of a [scenario] section");
    }
    find_scenario(section);
    RunOverrides o;
    for (const auto& [key, node] : body) {
      const std::string value = node.get_value<std::string>();
      if (key == "x0") {
        o.x0 = parse_list(section, key, value);
      } else if (key == "v0") {
        o.v0 = parse_config_number(section, key, value);
      } else if (key == "rtol") {
        o.rel_tol = parse_config_number(section, key, value);
      } else if (key == "atol") {
        o.abs_tol = parse_config_number(section, key, value);
      } else if (key == "horizon") {
        o.horizon = parse_config_number(section, key, value);
      } else if (key == "output_step") {
        o.output_step = parse_config_number(section, key, value);
      } else if (key == "out") {
        o.out_dir = value;
      } else {
        throw Error(ErrorCode::ConfigError, "[" + section + "] unknown key '" + key + "'");
      }
    }
    out[section] = o;
  }
  return out;
}

}  // namespace gracecbf
