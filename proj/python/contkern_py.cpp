#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "contkern/bench.hpp"
#include "contkern/builtin.hpp"
#include "contkern/closed_form.hpp"
#include "contkern/config.hpp"
#include "contkern/fd_kernels.hpp"
#include "contkern/kernel.hpp"
#include "contkern/kernel_eval.hpp"
#include "contkern/problem.hpp"
#include "contkern/ps_solver.hpp"
#include "contkern/simulator.hpp"

namespace py = pybind11;
using namespace contkern;

namespace {

// A solved power series plus the kernel view over it.
struct PsResult {
  PsKernelSolution sol;
  std::shared_ptr<SeriesKernel> kernel;
};

PsResult solve(const ContinuumParams& p, int order, std::optional<int> order_y, bool exact_q) {
  SolverConfig cfg;
  cfg.order = order;
  cfg.order_y = order_y;
  cfg.use_exact_q = exact_q;
  PsResult r{solve_power_series(p, cfg), nullptr};
  r.kernel = std::make_shared<SeriesKernel>(r.sol);
  return r;
}

py::dict report_dict(const SimReport& r) {
  py::dict d;
  d["t"] = r.t;
  d["U"] = r.U;
  d["norm"] = r.norm;
  d["initial_norm"] = r.initial_norm;
  d["final_norm"] = r.final_norm;
  d["diverged"] = r.diverged;
  d["stable"] = r.stable;
  return d;
}

}  // namespace

PYBIND11_MODULE(contkern, m) {
  m.doc() = "Power-series continuum backstepping kernels";
  m.attr("__version__") = CONTKERN_VERSION;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<NumericalError>(m, "NumericalError", error);
  py::register_exception<NotApplicable>(m, "NotApplicable", error);

  py::enum_<SamplePlacement>(m, "SamplePlacement")
      .value("Right", SamplePlacement::Right)
      .value("Left", SamplePlacement::Left);

  py::class_<ContinuumParams>(m, "ContinuumParams")
      .def("validate", &ContinuumParams::validate)
      .def("positivity", [](const ContinuumParams& p) {
        const auto r = check_positivity(p);
        return py::make_tuple(r.pass, r.min_lambda, r.min_mu);
      });

  py::class_<LargeScaleParams>(m, "LargeScaleParams")
      .def_readonly("n", &LargeScaleParams::n)
      .def_readonly("q", &LargeScaleParams::q)
      .def("lift", [](const LargeScaleParams& ls, std::optional<int> degree) { return lift_separable(ls, {degree}); },
           py::arg("q_fit_degree") = std::nullopt);

  py::class_<ProblemConfig>(m, "ProblemConfig")
      .def_readonly("name", &ProblemConfig::name)
      .def_readonly("q_exact", &ProblemConfig::q_exact)
      .def_property_readonly("is_large_scale", [](const ProblemConfig& c) { return c.large_scale.has_value(); })
      .def("to_continuum", &ProblemConfig::to_continuum)
      .def("to_large_scale", &ProblemConfig::to_large_scale);

  m.def("load_problem", [](const std::string& path) { return load_problem(path); }, py::arg("path"));
  m.def("parse_problem", [](const std::string& text) { return parse_problem(text); }, py::arg("text"));
  m.def("sample_continuum", &sample_continuum, py::arg("params"), py::arg("n"),
        py::arg("placement") = SamplePlacement::Right);

  auto b = m.def_submodule("builtin", "Built-in example problems");
  b.def("example1", &builtin::example1);
  b.def("example2_continuum", &builtin::example2_continuum, py::arg("q_fit_degree") = 2);
  b.def("example2_large_scale", &builtin::example2_large_scale, py::arg("n") = 10);
  b.def("zero_problem", &builtin::zero_problem);

  m.def("count_unknowns", &count_unknowns, py::arg("order"), py::arg("order_y"));
  m.def(
      "fit_q",
      [](const std::vector<double>& y, const std::vector<double>& q, int degree) {
        const FitResult f = fit_q(y, q, degree);
        return py::make_tuple(f.coeffs, f.rms_error);
      },
      py::arg("y"), py::arg("q"), py::arg("degree"));

  py::class_<ContinuumKernel, std::shared_ptr<ContinuumKernel>>(m, "ContinuumKernel")
      .def("k", &ContinuumKernel::k, py::arg("x"), py::arg("xi"), py::arg("y"))
      .def("kbar", &ContinuumKernel::kbar, py::arg("x"), py::arg("xi"))
      .def(
          "gains", [](const ContinuumKernel& k, int points) { return gains(k, points); }, py::arg("points") = 101)
      .def(
          "sample_gains", [](const ContinuumKernel& k, int n, int points) { return sample_gains(k, n, points); },
          py::arg("n"), py::arg("points") = 101)
      .def("residual", [](const ContinuumKernel& k, const ContinuumParams& p, int grid) {
        const auto r = continuum_residual(k, p, grid);
        return py::make_tuple(r.pde_k, r.pde_kbar, r.bc_diag, r.bc_left);
      }, py::arg("params"), py::arg("grid") = 21);
  py::class_<SeriesKernel, ContinuumKernel, std::shared_ptr<SeriesKernel>>(m, "SeriesKernel");
  py::class_<ClosedFormKernel, ContinuumKernel, std::shared_ptr<ClosedFormKernel>>(m, "ClosedFormKernel")
      .def_property_readonly("c_x", &ClosedFormKernel::c_x)
      .def_property_readonly("c_y", &ClosedFormKernel::c_y);

  py::class_<PsResult>(m, "PsSolution")
      .def_property_readonly("residual", [](const PsResult& r) { return r.sol.residual; })
      .def_property_readonly("rank", [](const PsResult& r) { return r.sol.rank; })
      .def_property_readonly("num_unknowns", [](const PsResult& r) { return r.sol.num_unknowns; })
      .def_property_readonly("num_equations", [](const PsResult& r) { return r.sol.num_equations; })
      .def_property_readonly("coefficients", [](const PsResult& r) { return r.sol.x; })
      .def_readonly("kernel", &PsResult::kernel);

  m.def("solve", &solve, py::arg("params"), py::arg("order"), py::arg("order_y") = std::nullopt,
        py::arg("exact_q") = false);
  m.def(
      "closed_form", [](const ContinuumParams& p) { return std::make_shared<ClosedFormKernel>(solve_closed_form(p)); },
      py::arg("params"));

  py::class_<GainTable>(m, "GainTable")
      .def_readonly("xi", &GainTable::xi)
      .def_readonly("y", &GainTable::y)
      .def_readonly("sampled", &GainTable::sampled)
      .def_readonly("k", &GainTable::k)
      .def_readonly("kbar", &GainTable::kbar)
      .def("save", &GainTable::save)
      .def_static("load", &GainTable::load);
  m.def("diff_solutions", &diff_solutions);

  m.def(
      "fd_gains",
      [](const LargeScaleParams& ls, int m_grid) { return solve_characteristics(ls, TriGrid(m_grid)).gain_table(ls.placement); },
      py::arg("params"), py::arg("m") = 256);

  m.def(
      "simulate",
      [](const LargeScaleParams& ls, std::optional<GainTable> g, int m_x, double t_final, double cfl) {
        SimConfig cfg;
        cfg.m_x = m_x;
        cfg.t_final = t_final;
        cfg.cfl = cfl;
        return report_dict(run(cfg, ls, std::move(g)));
      },
      py::arg("params"), py::arg("gains") = std::nullopt, py::arg("m_x") = 256, py::arg("t_final") = 3.0,
      py::arg("cfl") = 0.4);
}
