#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gracecbf/analysis.hpp"
#include "gracecbf/barrier.hpp"
#include "gracecbf/bench.hpp"
#include "gracecbf/errors.hpp"
#include "gracecbf/filter.hpp"
#include "gracecbf/scenario.hpp"

namespace py = pybind11;
using namespace gracecbf;

namespace {

py::handle error_type;

py::dict to_dict(const FilterResult& r) {
  py::dict d;
  d["u_star"] = r.u_star;
  d["active"] = r.active;
  d["u_d"] = r.u_d;
  d["u_sf"] = r.u_sf;
  return d;
}

py::dict to_dict(const RunSummary& s) {
  py::dict d;
  d["initial_state"] = s.initial_state;
  d["collided"] = s.collided;
  d["catastrophe"] = s.catastrophe;
  d["terminated_early"] = s.terminated_early;
  d["peak_abs_u"] = s.peak_abs_u;
  d["min_h"] = s.min_h;
  d["min_h2"] = s.min_h2;
  d["min_h_g"] = s.min_h_g;
  d["final_time"] = s.final_time;
  d["final_x"] = s.final_x;
  d["internal_peak_abs_u"] = s.stats.internal_peak_abs_u;
  d["internal_min_wall_gap"] = s.stats.internal_min_wall_gap;
  return d;
}

py::dict to_dict(const ConditionRun& cr) {
  const auto& t = cr.trajectory;
  std::vector<double> u;
  std::vector<std::optional<double>> h, h_g;
  for (std::size_t i = 0; i < t.size(); ++i) {
    u.push_back(t.controls[i].u_star);
    h.push_back(t.signals[i].h);
    h_g.push_back(t.signals[i].h_g);
  }
  std::vector<std::string> events;
  for (const auto& e : t.events) events.emplace_back(to_string(e.kind));
  py::dict d;
  d["summary"] = to_dict(cr.summary);
  d["t"] = t.times;
  d["x"] = t.states;
  d["u"] = u;
  d["h"] = h;
  d["h_g"] = h_g;
  d["events"] = events;
  d["csv_path"] = cr.csv_path;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Safety-filter core";

  static py::exception<Error> exc(m, "Error", PyExc_RuntimeError);
  error_type = exc;
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  m.def(
      "filter_scalar",
      [](double u_d, double u_sf) { return to_dict(filter_scalar(u_d, AffineControlConstraint{{1.0}, u_sf})); },
      py::arg("u_d"), py::arg("u_sf"), "Closed-form min-norm filter: u* = max(u_d, u_sf).");
  m.def(
      "filter_projection",
      [](const std::vector<double>& u_d, const std::vector<double>& normal, double offset) {
        const auto r = filter_projection(u_d, AffineControlConstraint{normal, offset});
        return py::make_tuple(r.u_star, r.active);
      },
      py::arg("u_d"), py::arg("normal"), py::arg("offset"),
      "Projection of u_d onto the half-space normal . u >= offset; returns (u_star, active).");

  m.def("layer_transform", &layer_transform, py::arg("raw"), py::arg("catastrophe"), py::arg("primary"));
  m.def("classify_region", [](double h_g) { return std::string(to_string(classify_region(h_g))); },
        py::arg("h_g"));
  m.def(
      "characteristic_roots",
      [](double zeta, double omega_n) {
        const auto r = characteristic_roots(zeta, omega_n);
        return py::make_tuple(r.gamma1, r.gamma2);
      },
      py::arg("zeta"), py::arg("omega_n"));

  m.def("lyapunov_v1", &lyapunov_v1, py::arg("h_g"));
  m.def("lyapunov_v2", &lyapunov_v2, py::arg("h_g"), py::arg("h_g_dot"), py::arg("omega_n"));
  m.def("implicit_bound_time", &implicit_bound_time, py::arg("h_g_start"), py::arg("h_g_end"), py::arg("gamma"));
  m.def(
      "bound_trajectory",
      [](double h_g0, const std::vector<double>& times, double gamma) { return bound_trajectory(h_g0, times, gamma); },
      py::arg("h_g0"), py::arg("times"), py::arg("gamma"));

  m.def("scenarios", [] {
    std::vector<std::string> ids;
    for (const auto& s : registry()) ids.push_back(s.id);
    return ids;
  });
  m.def(
      "run",
      [](const std::string& id, std::optional<std::vector<double>> x0, std::optional<double> v0,
         std::optional<double> rtol, std::optional<double> atol, std::optional<double> horizon,
         std::optional<std::filesystem::path> out) {
        RunOverrides o;
        o.x0 = std::move(x0);
        o.v0 = v0;
        o.rel_tol = rtol;
        o.abs_tol = atol;
        o.horizon = horizon;
        o.out_dir = std::move(out);
        const auto result = run(id, o);
        py::list runs;
        for (const auto& cr : result.runs) runs.append(to_dict(cr));
        return runs;
      },
      py::arg("scenario_id"), py::kw_only(), py::arg("x0") = py::none(), py::arg("v0") = py::none(),
      py::arg("rtol") = py::none(), py::arg("atol") = py::none(), py::arg("horizon") = py::none(),
      py::arg("out") = py::none(), "Simulate a bundled scenario; one dict per initial condition.");
  m.def(
      "verify",
      [](const std::string& id) {
        const auto report = verify(id);
        std::vector<std::tuple<std::string, bool, std::string>> checks;
        for (const auto& c : report.checks) checks.emplace_back(c.name, c.passed, c.detail);
        return checks;
      },
      py::arg("scenario_id"), "List of (check, passed, detail) for a bundled scenario.");
}
