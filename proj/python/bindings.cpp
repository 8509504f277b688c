#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gdm/error.hpp"
#include "gdm/io.hpp"
#include "gdm/physics.hpp"
#include "gdm/quality.hpp"
#include "gdm/sim.hpp"

namespace py = pybind11;
using namespace gdm;

namespace {

std::pair<double, double> as_pair(Vec2 v) { return {v.x, v.y}; }

std::vector<std::pair<double, double>> as_pairs(const std::vector<Vec2>& v) {
  std::vector<std::pair<double, double>> out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(as_pair(p));
  return out;
}

py::dict diagnostics_dict(const StepDiagnostics& s) {
  py::dict d;
  d["step"] = s.step;
  d["time"] = s.time;
  d["mass_residual"] = s.mass_residual;
  d["pressure_mean"] = s.pressure_mean;
  d["pressure_rhs_norm"] = s.pressure_rhs_norm;
  d["picard_iterations"] = s.picard_iterations;
  d["nonlinear_residual"] = s.nonlinear_residual;
  d["cmin"] = s.cmin;
  d["cmax"] = s.cmax;
  d["energy_residual"] = s.energy_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gradient discretisation solver for miscible displacement";

  static py::exception<Error> base(m, "GdmError");
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<NumericalError> numerical_error(m, "NumericalError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<GradientDiscretisation>(m, "Discretisation")
      .def_readonly("scheme", &GradientDiscretisation::scheme)
      .def_readonly("ndof", &GradientDiscretisation::ndof)
      .def_readonly("mesh_size", &GradientDiscretisation::mesh_size)
      .def_readonly("recon_measures", &GradientDiscretisation::recon_measures)
      .def_property_readonly("anchors", [](const GradientDiscretisation& gd) { return as_pairs(gd.anchors); })
      .def_property_readonly("grad_count", &GradientDiscretisation::grad_count)
      .def_property_readonly("subcell_count", [](const GradientDiscretisation& gd) { return gd.subcells.size(); });

  m.def("scheme_a", [](int n, double length) { return scheme_a(build_cartesian(n, length)); }, py::arg("n"),
        py::arg("length") = 1.0, "Node-centred finite differences on an n x n grid");
  m.def(
      "scheme_b",
      [](int replication, double length, const std::string& pattern) {
        const auto mesh = build_structured_triangulation(replication, length, parse_pattern(pattern));
        return scheme_b(mesh, build_dual(mesh));
      },
      py::arg("replication"), py::arg("length") = 1.0, py::arg("pattern") = "criss_cross",
      "Mass-lumped P1 on a structured triangulation");
  m.def(
      "interpolate",
      [](const GradientDiscretisation& gd, const std::function<double(double, double)>& f) {
        return interpolate(gd, [&](Vec2 p) { return f(p.x, p.y); });
      },
      py::arg("gd"), py::arg("f"));
  m.def("norm_ell", [](const GradientDiscretisation& gd, const std::vector<double>& w) { return norm_ell(gd, w); });
  m.def("norm_para", [](const GradientDiscretisation& gd, const std::vector<double>& w) { return norm_para(gd, w); });

  m.def("psi", &psi, py::arg("z"), py::arg("n"));
  m.def("truncate", [](double s) { return gdm::truncate(s); }, py::arg("s"));
  m.def(
      "viscosity", [](double mu0, double m_ratio, double c) { return viscosity({mu0, m_ratio}, c); }, py::arg("mu0"),
      py::arg("m_ratio"), py::arg("c"));
  m.def(
      "tensor_d",
      [](double dm, double dl, double dt, double ux, double uy) {
        const auto t = tensor_D({1.0, dm, dl, dt}, {ux, uy});
        return std::vector<std::vector<double>>{{t.xx, t.xy}, {t.xy, t.yy}};
      },
      py::arg("dm"), py::arg("dl"), py::arg("dt"), py::arg("ux"), py::arg("uy"),
      "Diffusion-dispersion tensor with unit porosity");
  m.def(
      "exact_c",
      [](double dm, double x, double y, double t) { return AnalyticalRadialSolution(dm).concentration({x, y}, t); },
      py::arg("dm"), py::arg("x"), py::arg("y"), py::arg("t"));

  py::class_<RunConfig>(m, "RunConfig")
      .def_property_readonly("test", [](const RunConfig& c) { return to_string(c.test); })
      .def_property(
          "scheme", [](const RunConfig& c) { return to_string(c.scheme); },
          [](RunConfig& c, const std::string& s) { c.scheme = parse_scheme(s); })
      .def_property(
          "variant", [](const RunConfig& c) { return to_string(c.variant); },
          [](RunConfig& c, const std::string& s) { c.variant = parse_variant(s); })
      .def_readwrite("n", &RunConfig::n)
      .def_readwrite("level", &RunConfig::level)
      .def_readwrite("dt", &RunConfig::dt)
      .def_readwrite("t_final", &RunConfig::t_final)
      .def_readwrite("m_ratio", &RunConfig::m_ratio)
      .def_readwrite("dm", &RunConfig::dm)
      .def_readwrite("dl", &RunConfig::dl)
      .def_readwrite("dt_disp", &RunConfig::dt_disp)
      .def_readwrite("phi", &RunConfig::phi)
      .def_readwrite("perm", &RunConfig::perm)
      .def_readwrite("rate", &RunConfig::rate)
      .def_readwrite("c0", &RunConfig::c0)
      .def_readwrite("length", &RunConfig::length)
      .def_readwrite("mu0", &RunConfig::mu0)
      .def_readwrite("c_injected", &RunConfig::c_injected)
      .def_readwrite("mesh_file", &RunConfig::mesh_file)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("vtk_every", &RunConfig::vtk_every)
      .def_property(
          "pattern", [](const RunConfig& c) { return to_string(c.pattern); },
          [](RunConfig& c, const std::string& s) { c.pattern = parse_pattern(s); })
      .def("validate", &RunConfig::validate)
      .def("serialise", [](const RunConfig& c) { return serialise(c); })
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

  m.def("default_config", [](const std::string& test) { return default_config(parse_test_case(test)); },
        py::arg("test"));
  m.def(
      "parse_config",
      [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
      },
      py::arg("text"), "Parse key=value config text");

  m.def(
      "run",
      [](const RunConfig& config) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_coupled(config);
        }
        py::dict out;
        out["has_errors"] = r.report.has_errors;
        out["l1"] = r.report.l1;
        out["l2"] = r.report.l2;
        out["concentration"] = r.state.concentration;
        out["pressure"] = r.state.pressure;
        out["ndof"] = r.gd.ndof;
        py::list steps;
        for (const auto& s : r.report.steps) steps.append(diagnostics_dict(s));
        out["steps"] = steps;
        return out;
      },
      py::arg("config"), "Run the coupled simulation");

  m.def(
      "quality",
      [](const GradientDiscretisation& gd) {
        const auto r = quality_report(gd, "");
        py::dict out;
        out["coercivity"] = r.coercivity;
        out["consistency"] = r.consistency.begin()->second;
        out["conformity"] = r.conformity.begin()->second;
        return out;
      },
      py::arg("gd"), "C_D, S_D(sin sin) and W_D(curl bubble) on a unit-square discretisation");
}
