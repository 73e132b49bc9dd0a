#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbrsp/error.hpp"
#include "sbrsp/instance.hpp"
#include "sbrsp/io.hpp"
#include "sbrsp/metrics.hpp"
#include "sbrsp/modechoice.hpp"
#include "sbrsp/pipeline.hpp"
#include "sbrsp/run_config.hpp"

namespace py = pybind11;
using namespace sbrsp;

namespace {

PipelineOptions options_for(const Instance& inst, const std::string& config_json) {
  const RunConfig cfg = config_json.empty() ? RunConfig{} : parse_run_config(config_json);
  return cfg.pipeline_options(inst.params);
}

std::string solve(const std::string& instance_json, const std::string& pipeline, const std::string& config_json) {
  const Instance inst = parse_instance(instance_json);
  const Scenario sc = make_scenario(inst, inst.status_quo_riders());
  const auto opts = options_for(inst, config_json);
  if (pipeline == "hracssas4") return solution_to_json(run_hracssas4(sc, opts).solution);
  if (pipeline == "full-milo") return solution_to_json(run_full_milo(sc, opts).solution);
  throw Error(ErrorKind::usage, "unknown pipeline '" + pipeline + "'");
}

std::string metrics(const std::string& instance_json, const std::string& solution_json) {
  const Instance inst = parse_instance(instance_json);
  const RouteSolution sol = parse_solution(solution_json, inst);
  std::vector<int> riders;
  for (const auto& leg : sol.legs) riders.push_back(leg.student);
  const Scenario sc = make_scenario(inst, riders);
  MetricsInputs mi;
  mi.walk_speed_mps = inst.params.walk_speed_mps;
  return metrics_to_json(compute_metrics(sc, sol, mi));
}

std::string iterate(const std::string& instance_json, const std::string& config_json) {
  const Instance inst = parse_instance(instance_json);
  const RunConfig cfg = config_json.empty() ? RunConfig{} : parse_run_config(config_json);
  Instance tuned = inst;
  cfg.apply(tuned.params);
  return equilibrium_to_json(run_fixed_point(tuned, cfg.pipeline_options(tuned.params), cfg.max_iterations), tuned);
}

}  // namespace

PYBIND11_MODULE(_sbrsp, m) {
  m.doc() = "Rural school bus routing with mixed loading: JSON in, JSON out.";

  static py::exception<Error> error_type(m, "SbrspError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      exc.attr("kind") = std::string(error_kind_name(e.kind()));
      exc.attr("subject") = e.subject();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("validate", [](const std::string& text) { return instance_to_json(parse_instance(text)); },
        py::arg("instance_json"), "Parse and validate an instance; returns it re-serialized.");
  m.def("generate", [](const std::string& spec, std::uint64_t seed) {
        return instance_to_json(generate_synthetic(parse_generator_spec(spec), seed));
      },
        py::arg("spec_json"), py::arg("seed") = 0);
  m.def("solve", &solve, py::arg("instance_json"), py::arg("pipeline") = "hracssas4", py::arg("config_json") = "",
        py::call_guard<py::gil_scoped_release>());
  m.def("metrics", &metrics, py::arg("instance_json"), py::arg("solution_json"));
  m.def("iterate", &iterate, py::arg("instance_json"), py::arg("config_json") = "",
        py::call_guard<py::gil_scoped_release>());

  m.def("choice_probability", &choice_probability, py::arg("A"), py::arg("car_s"), py::arg("bus_s"));
  m.def("calibrate_A", [](const std::vector<double>& deltas, double target) {
        const auto c = calibrate_A(deltas, target);
        return py::make_tuple(c.A, c.achieved);
      },
        py::arg("deltas"), py::arg("target"), "Returns (A, achieved sum).");
  m.def("bpr_time", &bpr_time, py::arg("freeflow_s"), py::arg("flow"), py::arg("capacity"), py::arg("alpha") = 0.15,
        py::arg("beta") = 4.0);
  m.def("percent_change", [](double a, double b) { return delta_of("value", a, b).percent; }, py::arg("a"),
        py::arg("b"), "(a - b) / a * 100.");
}
