#include "gracecbf/scenario.hpp"

#include <cmath>

#include "gracecbf/analysis.hpp"
#include "gracecbf/errors.hpp"

namespace gracecbf {
namespace {

using namespace params;

WallGeometry wall_geometry() { return {kTarget, kWall, kSafeDistance}; }

SimConfig wall_sim() {
  SimConfig cfg;
  cfg.wall_position = kWall;
  return cfg;
}

GracefulBarrier wall_layers(std::size_t dim) {
  // H(x) = x with catastrophe at the wall and the primary layer at x_sf.
  return GracefulBarrier(ScalarBarrier::coordinate(dim, 0, 0.0), kWall, kSafeDistance);
}

std::vector<Vec> positions(std::initializer_list<double> xs, std::optional<double> v0) {
  std::vector<Vec> out;
  for (double x : xs) out.push_back(v0 ? Vec{x, *v0} : Vec{x});
  return out;
}

std::vector<Scenario> build_registry() {
  auto first_order = std::make_shared<const FirstOrderIntegrator>();
  auto second_order = std::make_shared<const DoubleIntegrator>();
  const ProportionalPosition p_law{kBaselineGain, kTarget};
  const PositionVelocityFeedback pd_law{kPositionGain, kVelocityGain, kTarget};

  std::vector<Scenario> out;
  out.push_back(Scenario{
      "ex1-zeroing",
      "velocity-actuated wall approach with a zeroing CBF",
      first_order,
      p_law,
      BarrierSpec::zeroing(ScalarBarrier::coordinate(1, 0, kSafeDistance), ClassK::linear(kZeroingGain)),
      wall_geometry(),
      positions({2.0, 5.0, 7.0, 10.0}, std::nullopt),
      wall_sim(),
      {{2.0, false, std::nullopt}, {5.0, false, std::nullopt}, {7.0, false, std::nullopt}, {10.0, false, std::nullopt}},
  });
  out.push_back(Scenario{
      "ex2-exponential",
      "acceleration-actuated wall approach with an exponential CBF",
      second_order,
      pd_law,
      BarrierSpec::exponential(ScalarBarrier::coordinate(2, 0, kSafeDistance), kExpGamma1, kExpGamma2),
      wall_geometry(),
      positions({2.0, 5.0, 7.0, 10.0}, kInitialVelocity),
      wall_sim(),
      {{2.0, true, std::nullopt}, {5.0, true, std::nullopt}, {7.0, false, std::nullopt}, {10.0, false, std::nullopt}},
  });
  out.push_back(Scenario{
      "sc1-graceful1",
      "velocity-actuated wall approach with the first-order graceful constraint",
      first_order,
      p_law,
      BarrierSpec::graceful1(wall_layers(1), ClassK::linear(kZeroingGain)),
      wall_geometry(),
      positions({2.0, 5.0, 7.0, 10.0}, std::nullopt),
      wall_sim(),
      {{2.0, false, std::nullopt}, {5.0, false, std::nullopt}, {7.0, false, std::nullopt}, {10.0, false, std::nullopt}},
  });
  out.push_back(Scenario{
      "sc2-graceful2-over",
      "acceleration-actuated wall approach, second-order graceful constraint, zeta = 2",
      second_order,
      pd_law,
      BarrierSpec::graceful2(wall_layers(2), kOverdampedZeta, kNaturalFrequency),
      wall_geometry(),
      positions({2.0, 5.0}, kInitialVelocity),
      wall_sim(),
      {{2.0, false, 3400.0, kPeakTolerance}, {5.0, false, 200.0, kPeakTolerance}},
  });
  out.push_back(Scenario{
      "sc2-graceful2-under",
      "acceleration-actuated wall approach, second-order graceful constraint, zeta = 0.5",
      second_order,
      pd_law,
      BarrierSpec::graceful2(wall_layers(2), kUnderdampedZeta, kNaturalFrequency),
      wall_geometry(),
      positions({2.0, 5.0}, kInitialVelocity),
      wall_sim(),
      {{2.0, false, 4500.0, kPeakTolerance}, {5.0, false, 5500.0, kPeakTolerance}},
  });
  return out;
}

}  // namespace

const Expectation* Scenario::expectation_for(double x0) const {
  for (const auto& e : expectations) {
    if (e.x0 == x0) return &e;
  }
  return nullptr;
}

const std::vector<Scenario>& registry() {
  static const std::vector<Scenario> scenarios = build_registry();
  return scenarios;
}

const Scenario& find_scenario(const std::string& id) {
  for (const auto& s : registry()) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::UnknownScenario, "no scenario named '" + id + "'");
}

Controller make_controller(const Scenario& scenario) {
  return [plant = scenario.plant, law = scenario.baseline, spec = scenario.barrier](StateView x) {
    return filter_scalar(baseline_control(x, law), safety_constraint(x, spec, *plant));
  };
}

SignalFn make_signals(const Scenario& scenario) {
  return [plant = scenario.plant, spec = scenario.barrier](StateView x) {
    BarrierSignals s;
    if (!spec.is_graceful()) {
      s.h = spec.barrier().value(x);
      if (spec.family() == BarrierFamily::Exponential) {
        s.h2 = high_order_h2(x, spec.exponential_gains().gamma1, spec.barrier(), *plant);
      }
      return s;
    }
    const auto& hg = spec.graceful();
    s.h = hg.raw().value(x) - hg.primary_threshold();
    s.h_g = hg.value(x);
    const bool second_order = spec.family() == BarrierFamily::Graceful2;
    if (second_order) {
      const auto lie = lie_derivatives(
          x, [&hg](StateView v) { return hg.value(v); }, [&hg](StateView v) { return hg.gradient(v); },
          [&hg](StateView v) { return hg.hessian(v); }, *plant, false);
      s.h_g_dot = lie.lf_h;
    }
    if (*s.h_g > -1.0) {
      s.lyapunov = second_order ? lyapunov_v2(*s.h_g, *s.h_g_dot, spec.damped_gains().omega_n)
                                : lyapunov_v1(*s.h_g);
    }
    return s;
  };
}

Vec initial_state(const Scenario& scenario, double x0, std::optional<double> v0) {
  const std::size_t n = scenario.plant->state_dim();
  if (n == 1) {
    if (v0) throw Error(ErrorCode::InvalidArgument, "scenario '" + scenario.id + "' has no velocity state");
    return {x0};
  }
  const double default_v0 =
      scenario.initial_conditions.empty() ? 0.0 : scenario.initial_conditions.front().at(1);
  return {x0, v0.value_or(default_v0)};
}

}  // namespace gracecbf
