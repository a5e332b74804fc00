#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "obstacle_mcf/commands.hpp"
#include "obstacle_mcf/config.hpp"
#include "obstacle_mcf/errors.hpp"
#include "obstacle_mcf/initial_data.hpp"
#include "obstacle_mcf/mcf_oracle.hpp"
#include "obstacle_mcf/measures.hpp"
#include "obstacle_mcf/potential.hpp"
#include "obstacle_mcf/solver.hpp"

namespace py = pybind11;
namespace om = obstacle_mcf;

namespace {

std::vector<py::ssize_t> shape_of(const om::Grid& g) {
  std::vector<py::ssize_t> shape;
  for (int a = 0; a < g.dim(); ++a) shape.push_back(static_cast<py::ssize_t>(g.nodes(a)));
  return shape;
}

py::array_t<double> to_array(const om::ScalarField& f) {
  py::array_t<double> out(shape_of(f.grid));
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

py::dict record_dict(const om::DiagnosticsRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["total_energy"] = r.total_energy;
  d["xi_sup"] = r.xi_sup;
  d["xi_mass"] = r.xi_mass;
  d["huisken"] = r.huisken;
  d["density_ratio_max"] = r.density_ratio_max;
  d["dissipation_accum"] = r.dissipation_accum;
  d["lambda_mass"] = r.lambda_mass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_obstacle_mcf, m) {
  m.doc() = "Allen-Cahn approximation of mean curvature flow with an obstacle potential.";

  static py::exception<om::Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const om::Error& e) {
      py::set_error(error, (e.kind() + ": " + e.what()).c_str());
    }
  });

  py::class_<om::Potential>(m, "Potential")
      .def(py::init<std::optional<double>>(), py::arg("delta") = py::none())
      .def("value", &om::Potential::value)
      .def("derivative", &om::Potential::derivative)
      .def("profile", &om::Potential::profile, py::arg("r"), py::arg("epsilon"))
      .def("profile_deriv", &om::Potential::profile_deriv, py::arg("r"), py::arg("epsilon"))
      .def_property_readonly("sigma", &om::Potential::sigma)
      .def_property_readonly("saturation", &om::Potential::saturation)
      .def_property_readonly("delta", &om::Potential::delta);

  m.def("sigma_delta", [](double delta) { return om::sigma_delta(om::ObstacleParam(delta)); });
  m.def("sigma_delta_closed_form",
        [](double delta) { return om::sigma_delta_closed_form(om::ObstacleParam(delta)); });
  m.def("sphere_radius_exact", &om::sphere_radius_exact, py::arg("r0"), py::arg("n"), py::arg("t"));

  m.def(
      "parse_config", [](const std::string& text) { return om::serialize_config(om::parse_config_text(text)); },
      py::arg("text"), "Validates config text and returns its canonical form.");

  m.def(
      "stability_limit", [](const std::string& text) { return om::stability_limit(om::parse_config_text(text)); },
      py::arg("config"));

  m.def(
      "initial_field",
      [](const std::string& text) {
        const om::SolverConfig c = om::parse_config_text(text);
        return to_array(om::build_initial_field(c.grid, c.shape, c.epsilon, c.delta));
      },
      py::arg("config"), "Initial phase field of a config as an array of shape nodes.");

  m.def(
      "run",
      [](const std::string& text) {
        const om::SolverConfig c = om::parse_config_text(text);
        om::RunOutput out;
        {
          py::gil_scoped_release release;
          out = om::run(c);
        }
        py::list diagnostics;
        for (const auto& r : out.diagnostics) diagnostics.append(record_dict(r));
        py::list snapshots;
        for (const auto& s : out.snapshots) snapshots.append(py::make_tuple(s.t, to_array(s.field)));
        py::dict result;
        result["diagnostics"] = diagnostics;
        result["snapshots"] = snapshots;
        return result;
      },
      py::arg("config"),
      "Runs a config in memory. Returns {'diagnostics': [dict], 'snapshots': [(t, field)]}.");

  m.def(
      "zero_level",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> field, double extent) {
        std::vector<std::size_t> nodes;
        std::vector<double> extents;
        for (py::ssize_t a = 0; a < field.ndim(); ++a) {
          nodes.push_back(static_cast<std::size_t>(field.shape(a)));
          extents.push_back(extent);
        }
        om::ScalarField f(om::Grid(static_cast<int>(field.ndim()), nodes, extents));
        std::copy(field.data(), field.data() + field.size(), f.values.begin());
        const om::Contour c = om::extract_zero_level(f);
        py::array_t<double> vertices({static_cast<py::ssize_t>(c.vertices.size()), static_cast<py::ssize_t>(c.dim)});
        auto v = vertices.mutable_unchecked<2>();
        for (std::size_t i = 0; i < c.vertices.size(); ++i) {
          for (int a = 0; a < c.dim; ++a) v(static_cast<py::ssize_t>(i), a) = c.vertices[i][a];
        }
        return vertices;
      },
      py::arg("field"), py::arg("extent"),
      "Vertices of the zero level set of a field sampled on the cube [-extent/2, extent/2]^n.");

  m.def("profile_check", [] {
    const auto report = om::cmd_profile_check();
    return py::make_tuple(report.ok, report.json);
  });
}
