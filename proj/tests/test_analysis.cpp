#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gracecbf/analysis.hpp"
#include "gracecbf/bench.hpp"
#include "gracecbf/errors.hpp"
#include "gracecbf/scenario.hpp"

using namespace gracecbf;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

Trajectory from_signals(const std::vector<BarrierSignals>& signals) {
  Trajectory t;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    t.times.push_back(0.001 * static_cast<double>(i));
    t.states.push_back({0.0});
    t.controls.push_back({0.0, false, 0.0, 0.0});
    t.signals.push_back(signals[i]);
  }
  t.events.push_back({t.times.back(), EventKind::Finished});
  return t;
}

// Independent evaluation of the separated-variables solution.
double tau_oracle(double start, double end, double gamma) {
  return -(end + std::log(-end) - start - std::log(-start)) / gamma;
}

}  // namespace

TEST_CASE("lyapunov_v1") {
  CHECK(lyapunov_v1(0.0) == 0.0);
  CHECK(lyapunov_v1(-0.5) == doctest::Approx(0.193147).epsilon(1e-6));
  CHECK(lyapunov_v1(1.0) == doctest::Approx(0.306853).epsilon(1e-6));
  CHECK(code_of([] { lyapunov_v1(-1.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { lyapunov_v1(-2.0); }) == ErrorCode::DomainError);
}

TEST_CASE("lyapunov_v1 is positive away from zero") {
  for (int i = 1; i < 10000; ++i) {
    const double h = -1.0 + 11.0 * i / 10000.0;
    if (std::abs(h) < 1e-12) continue;
    CAPTURE(h);
    CHECK(lyapunov_v1(h) > 0.0);
  }
}

TEST_CASE("lyapunov_v1 diverges at the pole") {
  double previous = 0.0;
  for (int k = 1; k <= 12; ++k) {
    const double v = lyapunov_v1(-1.0 + std::pow(10.0, -k));
    CHECK(v > previous);
    previous = v;
  }
  CHECK(previous > 25.0);
}

TEST_CASE("lyapunov_v2") {
  CHECK(lyapunov_v2(0.0, 5.0, 2.0) == 0.0);
  CHECK(lyapunov_v2(-0.5, -1.0, 2.0) == doctest::Approx(1.272589).epsilon(1e-6));
  CHECK(lyapunov_v2(-0.5, 0.0, 2.0) == doctest::Approx(0.772589).epsilon(1e-6));
  CHECK(lyapunov_v2(-0.5, 3.0, 2.0) == lyapunov_v2(-0.5, 0.0, 2.0));
  CHECK(code_of([] { lyapunov_v2(-1.0, 0.0, 2.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { lyapunov_v2(0.0, 0.0, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("implicit_bound_time") {
  CHECK(implicit_bound_time(-0.5, -0.5, 3.0) == 0.0);
  CHECK(implicit_bound_time(-0.5, -0.25, 3.0) == doctest::Approx(0.147716).epsilon(1e-6));
  const double tau = implicit_bound_time(-0.9, -0.1, 3.0);
  CHECK(tau == doctest::Approx(tau_oracle(-0.9, -0.1, 3.0)).epsilon(1e-14));
  CHECK(std::abs(tau - 0.465735) < 1e-5);
  CHECK(code_of([] { implicit_bound_time(-0.25, -0.5, 3.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { implicit_bound_time(-1.0, -0.5, 3.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { implicit_bound_time(-0.5, 0.0, 3.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { implicit_bound_time(-0.5, -0.25, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("bound_trajectory") {
  const double t_quarter = implicit_bound_time(-0.5, -0.25, 3.0);
  const std::vector<double> times{0.0, t_quarter, 100.0 / 3.0};
  const auto b = bound_trajectory(-0.5, times, 3.0);
  CHECK(b[0] == -0.5);
  CHECK(std::abs(b[1] + 0.25) <= 1e-9);
  CHECK(std::abs(b[2]) <= 1e-6);
  CHECK(b[2] < 0.0);

  std::vector<double> grid;
  for (int i = 0; i <= 2000; ++i) grid.push_back(0.001 * i);
  const auto series = bound_trajectory(-0.9, grid, 3.0);
  for (std::size_t i = 1; i < series.size(); ++i) {
    CHECK(series[i] > series[i - 1]);
    CHECK(series[i] < 0.0);
  }
  CHECK(code_of([] { bound_trajectory(0.5, std::vector<double>{0.0}, 3.0); }) == ErrorCode::DomainError);
}

TEST_CASE("check_descent") {
  SUBCASE("constant h_g = 0") {
    std::vector<BarrierSignals> s(50);
    for (auto& x : s) x.h_g = 0.0;
    const auto r = check_descent(from_signals(s), {LyapunovKind::V1, 0.0, 1e-6});
    CHECK(r.max_increase == 0.0);
    CHECK(r.holds);
  }
  SUBCASE("an increase is reported with its time") {
    std::vector<BarrierSignals> s(3);
    s[0].h_g = -0.5;
    s[1].h_g = -0.4;
    s[2].h_g = -0.6;
    const auto r = check_descent(from_signals(s), {LyapunovKind::V1, 0.0, 1e-6});
    CHECK_FALSE(r.holds);
    CHECK(r.max_increase == doctest::Approx(lyapunov_v1(-0.6) - lyapunov_v1(-0.4)));
    REQUIRE(r.worst_time);
    CHECK(*r.worst_time == doctest::Approx(0.002));
    CHECK(r.pairs_checked == 2);
  }
  SUBCASE("V2 needs h_g_dot") {
    std::vector<BarrierSignals> s(2);
    s[0].h_g = -0.5;
    s[1].h_g = -0.4;
    CHECK(code_of([&] { check_descent(from_signals(s), {LyapunovKind::V2, 2.0, 1e-4}); }) ==
          ErrorCode::MissingSignal);
  }
  SUBCASE("sc1-graceful1 from 2 m") {
    const auto r = run("sc1-graceful1", RunOverrides{.x0 = std::vector<double>{2.0}});
    const auto d = check_descent(r.runs.at(0).trajectory, {LyapunovKind::V1, 0.0, 1e-6});
    CHECK(d.holds);
    CHECK(d.pairs_checked > 1000);
  }
  SUBCASE("sc2-graceful2-over from 2 m") {
    const auto r = run("sc2-graceful2-over", RunOverrides{.x0 = std::vector<double>{2.0}});
    const auto d = check_descent(r.runs.at(0).trajectory, {LyapunovKind::V2, 2.0, 1e-4});
    CHECK(d.holds);
    CHECK(d.pairs_checked > 0);
  }
}

TEST_CASE("sc1-graceful1 danger-zone runs stay above the bound and rise monotonically") {
  for (double x0 : {1.2, 1.5, 2.0, 2.9}) {
    CAPTURE(x0);
    const auto r = run("sc1-graceful1", RunOverrides{.x0 = std::vector<double>{x0}});
    const auto& t = r.runs.at(0).trajectory;
    const double h0 = *t.signals[0].h_g;
    REQUIRE(h0 < 0.0);
    const auto bound = bound_trajectory(h0, t.times, params::kZeroingGain);
    bool reached_zero = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double h = *t.signals[i].h_g;
      CHECK(h >= bound[i] - 1e-3);
      if (i > 0 && !reached_zero) CHECK(h >= *t.signals[i - 1].h_g - 1e-9);
      reached_zero = reached_zero || h >= 0.0;
    }
    CHECK(std::abs(*t.signals.back().h_g) < 1e-2);
  }
}

TEST_CASE("set_margin and check_invariance") {
  BarrierSignals s;
  s.h = 2.0;
  s.h2 = -1.0;
  s.h_g = -0.5;
  s.h_g_dot = 0.25;
  CHECK(set_margin(s, InvariantSet::Safe, {}) == 2.0);
  CHECK(set_margin(s, InvariantSet::SafeOrDanger, {}) == 0.5);
  CHECK(set_margin(s, InvariantSet::SafeAndSecondary, {}) == -1.0);
  CHECK(set_margin(s, InvariantSet::GracefulFirst, {1e-6, 2.0}) == -0.75);
  CHECK(code_of([&] { set_margin(s, InvariantSet::GracefulSecond, {}); }) == ErrorCode::InvalidArgument);
  BarrierSignals empty;
  CHECK(code_of([&] { set_margin(empty, InvariantSet::SafeOrDanger, {}); }) == ErrorCode::MissingSignal);
  CHECK(to_string(InvariantSet::SafeAndSecondary) == "S&S2");

  SUBCASE("ex1-zeroing from 5 m keeps S") {
    const auto r = run("ex1-zeroing", RunOverrides{.x0 = std::vector<double>{5.0}});
    const auto inv = check_invariance(r.runs.at(0).trajectory, InvariantSet::Safe, {});
    CHECK_FALSE(inv.started_outside);
    CHECK_FALSE(inv.violated);
    CHECK(inv.min_margin >= -1e-6);
  }
  SUBCASE("ex2-exponential from 5 m starts outside the secondary set") {
    const auto r = run("ex2-exponential", RunOverrides{.x0 = std::vector<double>{5.0}});
    const auto& t = r.runs.at(0).trajectory;
    CHECK(*t.signals[0].h2 == doctest::Approx(-16.0));
    const auto inv = check_invariance(t, InvariantSet::SafeAndSecondary, {});
    CHECK(inv.started_outside);
    CHECK(inv.initial_margin == doctest::Approx(-16.0));
    REQUIRE(inv.first_violation_time);
    CHECK(*inv.first_violation_time == 0.0);
  }
  SUBCASE("sc2-graceful2-over inside both root sets") {
    Scenario sc = find_scenario("sc2-graceful2-over");
    sc.initial_conditions = {{4.0, 0.0}, {6.0, -0.5}, {3.0, 1.0}};
    sc.expectations.clear();
    const auto roots = characteristic_roots(params::kOverdampedZeta, params::kNaturalFrequency);
    for (const auto& cr : run(sc).runs) {
      for (double g : {roots.gamma1, roots.gamma2}) {
        const auto inv = check_invariance(cr.trajectory, InvariantSet::GracefulSecond, {1e-6, g});
        CHECK_FALSE(inv.started_outside);
        CHECK(inv.min_margin >= -1e-6);
      }
    }
  }
}
