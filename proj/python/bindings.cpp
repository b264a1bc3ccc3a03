#include "qfr/models.hpp"
#include "qfr/particle.hpp"
#include "qfr/scenarios.hpp"
#include "qfr/verifier.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qfr;

namespace {

// Parameters arrive as a JSON object encoded by the Python wrapper, so the same type
// coercion and unknown-key checks apply as for config files.
ScenarioConfig config_from(const std::string& name, const std::string& params_json, std::optional<long long> seed) {
  Json file = Json::object();
  file["params"] = Json::parse(params_json);
  return make_config(name, file, {}, seed);
}

py::dict h3_to_dict(const H3Result& r) {
  py::dict d;
  d["p_plus"] = r.p_plus;
  d["p_minus"] = r.p_minus;
  d["z_i"] = r.z_i;
  d["z_f"] = r.z_f;
  d["residual"] = r.residual;
  d["relative_residual"] = r.relative_residual;
  d["deficit_i"] = r.deficit_i;
  d["deficit_f"] = r.deficit_f;
  d["bound"] = r.bound;
  d["wall_probability"] = r.wall_probability;
  d["seconds"] = r.seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the qfr package";

  static py::exception<Error> base(m, "QfrError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config)
        PyErr_SetString(PyExc_ValueError, e.what());
      else
        base(e.what());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("scenario_names", [] {
    std::vector<std::string> out;
    for (const auto& s : scenario_registry()) out.push_back(s.name);
    return out;
  });
  m.def("scenario_defaults", [](const std::string& name) {
    Json d = Json::object();
    for (const auto& p : find_scenario(name).params) d[p.key] = p.default_value;
    return d.dump();
  });
  m.def(
      "run_scenario",
      [](const std::string& name, const std::string& params_json, std::optional<long long> seed,
         const std::string& format) {
        const ScenarioConfig c = config_from(name, params_json, seed);
        ScenarioReport r;
        {
          py::gil_scoped_release release;
          r = run_scenario(c);
        }
        return emit(r, parse_format(format));
      },
      py::arg("name"), py::arg("params_json") = "{}", py::arg("seed") = py::none(), py::arg("format") = "json");

  m.def(
      "run_h3",
      [](const std::string& scheme, int n_points, double y_min, double y_max) {
        H3Params p;
        p.model.scheme = parse_kinetic_scheme(scheme);
        p.grid = {y_min, y_max, n_points};
        H3Result r;
        {
          py::gil_scoped_release release;
          r = run_h3(p);
        }
        return h3_to_dict(r);
      },
      py::arg("scheme") = "fd5", py::arg("n_points") = 512, py::arg("y_min") = -18.0, py::arg("y_max") = 18.0);

  m.def("two_qubit_forward_00", &two_qubit_forward_00, py::arg("theta"), py::arg("beta"), py::arg("s") = 1.0);
  m.def("two_qubit_reverse_01", &two_qubit_reverse_01, py::arg("theta"), py::arg("beta"), py::arg("s") = 1.0);
  m.def(
      "two_qubit_maps",
      [](double theta, double beta, double s, const Mat& sigma) {
        TwoQubitModel q = make_two_qubit({theta, beta, s});
        return std::make_pair(Mat(q.forward.apply(sigma)), Mat(q.reverse.apply(sigma)));
      },
      py::arg("theta"), py::arg("beta"), py::arg("s"), py::arg("sigma"),
      "Forward and reverse conditional maps of the resonant qubit pair applied to sigma.");
  m.def("violation_closed_form", &violation_closed_form, py::arg("k_max"), py::arg("s"), py::arg("beta"));
}
