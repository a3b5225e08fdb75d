#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dgair/analysis.hpp"
#include "dgair/assembly.hpp"
#include "dgair/cli.hpp"
#include "dgair/config.hpp"
#include "dgair/error.hpp"
#include "dgair/norms.hpp"

namespace py = pybind11;
using namespace dgair;

namespace {

std::shared_ptr<const DGSpace> uniform_space(int n, int k) {
  return std::make_shared<const DGSpace>(std::make_shared<const Mesh>(build_uniform_mesh(n, n)), k);
}

py::dict operators(const std::string& preset, int n, int k, const std::string& scheme) {
  const auto s = parse_scheme(scheme);
  if (!s) throw InvalidArgument("unknown scheme '" + scheme + "'");
  const auto space = uniform_space(n, k);
  const ProblemSpec spec = make_preset(preset);
  py::dict d;
  d["mass"] = assemble_mass(*space).to_dense();
  d["diffusion"] = assemble_diffusion(*space, spec, PenaltyConfig::for_scheme(*s, k)).to_dense();
  d["convection"] = assemble_convection(*space, spec).to_dense();
  return d;
}

py::dict run_convergence(const std::string& preset, int k, std::vector<int> levels, double final_time) {
  ProblemSpec spec = make_preset(preset);
  if (final_time > 0.0) spec.final_time = final_time;
  ConvergenceOptions opt;
  opt.k = k;
  opt.levels = std::move(levels);
  const ConvergenceReport r = convergence_study(spec, opt);
  std::vector<double> h, l2, energy;
  for (const auto& l : r.levels) {
    h.push_back(l.h);
    l2.push_back(l.l2_error);
    energy.push_back(l.energy_error);
  }
  py::dict d;
  d["h"] = h;
  d["l2_error"] = l2;
  d["energy_error"] = energy;
  d["l2_order"] = r.l2_orders;
  d["energy_order"] = r.energy_orders;
  return d;
}

py::tuple command(const std::string& name, const std::string& config, std::optional<std::string> out,
                  std::optional<std::uint64_t> seed) {
  std::ostringstream log, err;
  const int code = run_command(name, config, {std::move(out), seed}, log, err);
  return py::make_tuple(code, log.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discontinuous Galerkin solver for the 2D advection-diffusion-reaction air pollution model";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ValueError);

  m.def("presets", &preset_names);
  m.def("n_loc", &n_loc, py::arg("k"));

  m.def(
      "evaluate",
      [](const std::string& text, double x, double y, double t, double u) {
        return expr::eval(*expr::parse(text), {x, y, t, u});
      },
      py::arg("expression"), py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("t") = 0.0, py::arg("u") = 0.0);
  m.def(
      "differentiate",
      [](const std::string& text, const std::string& var) {
        if (var.size() != 1 || std::string("xytu").find(var) == std::string::npos)
          throw InvalidArgument("variable must be one of x, y, t, u");
        const expr::Var v = var == "x" ? expr::Var::x : var == "y" ? expr::Var::y : var == "t" ? expr::Var::t : expr::Var::u;
        return expr::to_string(expr::simplify(expr::differentiate(expr::parse(text), v)));
      },
      py::arg("expression"), py::arg("var"));
  m.def(
      "canonical", [](const std::string& text) { return expr::to_string(expr::parse(text)); }, py::arg("expression"));

  m.def(
      "mesh_summary",
      [](int nx, int ny) {
        const Mesh mesh = build_uniform_mesh(nx, ny);
        py::dict d;
        d["vertices"] = mesh.num_vertices();
        d["triangles"] = mesh.num_triangles();
        d["edges"] = mesh.num_edges();
        d["interior_edges"] = mesh.num_interior_edges();
        d["h_max"] = mesh.h_max();
        d["h_min"] = mesh.h_min();
        return d;
      },
      py::arg("nx"), py::arg("ny"));

  m.def("operators", &operators, py::arg("preset"), py::arg("n"), py::arg("k"), py::arg("scheme") = "sipg",
        "Dense mass, diffusion and convection matrices on an n x n mesh.");
  m.def(
      "coercivity",
      [](const std::string& preset, int n, int k, const std::string& scheme, std::vector<double> grid,
         std::size_t samples, std::uint64_t seed) {
        const auto s = parse_scheme(scheme);
        if (!s) throw InvalidArgument("unknown scheme '" + scheme + "'");
        const CoercivityReport r = coercivity_scan(uniform_space(n, k), make_preset(preset), *s, grid, samples, seed);
        std::vector<double> ratios;
        for (const auto& e : r.entries) ratios.push_back(e.min_ratio);
        return ratios;
      },
      py::arg("preset"), py::arg("n"), py::arg("k"), py::arg("scheme"), py::arg("sigma_grid"),
      py::arg("samples") = 100, py::arg("seed") = 42, "Minimum Rayleigh ratio for each penalty in the grid.");
  m.def("convergence", &run_convergence, py::arg("preset"), py::arg("k"), py::arg("levels"),
        py::arg("final_time") = 0.0);

  m.def(
      "parse_config", [](const std::string& text) { return serialize_config(parse_config(text)); }, py::arg("text"),
      "Parses INI text and returns its canonical serialization.");
  m.def("run_command", &command, py::arg("command"), py::arg("config"), py::arg("out") = py::none(),
        py::arg("seed") = py::none(), "Runs solve, convergence or probe; returns (exit_code, log, errors).");
}
