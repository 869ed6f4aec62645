#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "actopt/catalog.hpp"
#include "actopt/discretization.hpp"
#include "actopt/geometry.hpp"
#include "actopt/lqr.hpp"
#include "actopt/optimize.hpp"
#include "actopt/riccati.hpp"
#include "actopt/scenario.hpp"
#include "actopt/sensitivity.hpp"

namespace py = pybind11;
using namespace actopt;

PYBIND11_MODULE(actopt, m) {
  m.doc() = "Actuator placement and shape optimization for controlled diffusion";

  py::register_exception<SolverError>(m, "SolverError");

  py::class_<Interval>(m, "Interval")
      .def(py::init([](double a, double b) { return Interval{a, b}; }), py::arg("a"),
           py::arg("b"))
      .def_readonly("a", &Interval::a)
      .def_readonly("b", &Interval::b)
      .def("__repr__", [](const Interval& iv) {
        return "Interval(" + std::to_string(iv.a) + ", " + std::to_string(iv.b) + ")";
      });

  py::class_<ActuatorShape>(m, "ActuatorShape")
      .def_static("from_intervals", &ActuatorShape::from_intervals, py::arg("intervals"))
      .def_static("from_mask", &ActuatorShape::from_mask, py::arg("m"), py::arg("mask"))
      .def_readonly("is2d", &ActuatorShape::is2d)
      .def_readonly("intervals", &ActuatorShape::intervals)
      .def_readonly("grid_m", &ActuatorShape::grid_m)
      .def_readonly("mask", &ActuatorShape::mask)
      .def_readonly("clamped", &ActuatorShape::clamped)
      .def("contains", py::overload_cast<double>(&ActuatorShape::contains, py::const_),
           py::arg("x"))
      .def("contains", py::overload_cast<double, double>(&ActuatorShape::contains, py::const_),
           py::arg("x"), py::arg("y"));

  py::class_<LevelSetField>(m, "LevelSetField")
      .def(py::init<>())
      .def_readonly("is2d", &LevelSetField::is2d)
      .def_readonly("x", &LevelSetField::x)
      .def_readonly("m", &LevelSetField::m)
      .def_readwrite("psi", &LevelSetField::psi)
      .def_readonly("reinit_warning", &LevelSetField::reinit_warning)
      .def("size", &LevelSetField::size);

  m.def("measure", &measure, py::arg("shape"));
  m.def("shape_from_levelset", &shape_from_levelset, py::arg("psi"));
  m.def("reinitialize", &reinitialize, py::arg("psi"));
  m.def("symmetric_difference_measure", &symmetric_difference_measure, py::arg("a"),
        py::arg("b"));
  m.def("translate", &translate, py::arg("shape"), py::arg("v"));
  m.def("upwind_gradient_norm", &upwind_gradient_norm, py::arg("psi"));

  py::class_<BasisDescriptor>(m, "BasisDescriptor")
      .def_readonly("n_elements", &BasisDescriptor::n_elements)
      .def_readonly("nodes", &BasisDescriptor::nodes)
      .def_readonly("mode_pairs", &BasisDescriptor::mode_pairs)
      .def_readonly("sigma", &BasisDescriptor::sigma)
      .def_readonly("eval_grid_size", &BasisDescriptor::eval_grid_size);

  py::class_<SystemMatrices>(m, "SystemMatrices")
      .def_readonly("n", &SystemMatrices::n)
      .def_readonly("M", &SystemMatrices::M)
      .def_readonly("S", &SystemMatrices::S)
      .def_readonly("H1", &SystemMatrices::H1)
      .def_readonly("basis", &SystemMatrices::basis);

  m.def("assemble_fem_1d",
        py::overload_cast<int, double>(&assemble_fem_1d), py::arg("n_elements"),
        py::arg("sigma"));
  m.def("assemble_fem_1d",
        py::overload_cast<int, const std::function<double(double)>&>(&assemble_fem_1d),
        py::arg("n_elements"), py::arg("diffusion"));
  m.def("assemble_spectral_2d", &assemble_spectral_2d, py::arg("n_modes"), py::arg("sigma"),
        py::arg("eval_grid_size"));
  m.def("actuator_load", &actuator_load, py::arg("shape"), py::arg("basis"));
  m.def("project_initial_condition",
        py::overload_cast<const std::function<double(double)>&, const SystemMatrices&>(
            &project_initial_condition),
        py::arg("f"), py::arg("sys"));
  m.def("evaluate_coefficients", &evaluate_coefficients, py::arg("coeffs"), py::arg("basis"),
        py::arg("x"), py::arg("y") = 0.0);
  m.def("make_levelset_grid", &make_levelset_grid, py::arg("basis"));

  py::class_<RiccatiSolution>(m, "RiccatiSolution")
      .def_readonly("Pi", &RiccatiSolution::Pi)
      .def_readonly("residual_norm", &RiccatiSolution::residual_norm)
      .def_readonly("iterations", &RiccatiSolution::iterations);

  m.def("solve_lyapunov", &solve_lyapunov, py::arg("A"), py::arg("Q"));
  m.def(
      "solve_are",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& B, const Eigen::MatrixXd& Q,
         double gamma, double tol, int max_newton) {
        return solve_are(A, B, Q, gamma, nullptr, tol, max_newton);
      },
      py::arg("A"), py::arg("B"), py::arg("Q"), py::arg("gamma"), py::arg("tol") = 1e-9,
      py::arg("max_newton") = 50);

  py::class_<QuadratureSpec>(m, "QuadratureSpec")
      .def(py::init<>())
      .def_readwrite("T", &QuadratureSpec::T)
      .def_readwrite("dt", &QuadratureSpec::dt);

  py::class_<CostReport>(m, "CostReport")
      .def_readonly("total", &CostReport::total)
      .def_readonly("lq_part", &CostReport::lq_part)
      .def_readonly("penalty_part", &CostReport::penalty_part)
      .def_readonly("size", &CostReport::size)
      .def_readonly("iterations", &CostReport::iterations);

  py::class_<Plant>(m, "Plant")
      .def(py::init<SystemMatrices, double>(), py::arg("sys"), py::arg("gamma"))
      .def_readonly("sys", &Plant::sys)
      .def_readonly("gamma", &Plant::gamma)
      .def_readonly("A", &Plant::A)
      .def("input_matrix", &Plant::input_matrix, py::arg("shape"));

  m.def("lq_cost", &lq_cost, py::arg("pi"), py::arg("f"), py::arg("M"));
  m.def(
      "total_cost",
      [](const ActuatorShape& shape, const Eigen::VectorXd& f, double alpha, double c,
         const Plant& plant) { return total_cost(shape, f, alpha, c, plant); },
      py::arg("shape"), py::arg("f"), py::arg("alpha"), py::arg("c"), py::arg("plant"));

  py::class_<ClosedLoopTrajectory>(m, "ClosedLoopTrajectory")
      .def_readonly("times", &ClosedLoopTrajectory::times)
      .def_readonly("norm2_M", &ClosedLoopTrajectory::norm2_M)
      .def_readonly("controls", &ClosedLoopTrajectory::controls)
      .def_readonly("states", &ClosedLoopTrajectory::states)
      .def_readonly("stride", &ClosedLoopTrajectory::stride)
      .def_readonly("running_cost", &ClosedLoopTrajectory::running_cost);

  m.def(
      "simulate_closed_loop",
      [](const Plant& plant, const Eigen::VectorXd& B, const Eigen::MatrixXd& Pi,
         const Eigen::VectorXd& f, double T, double dt, int store_stride) {
        return simulate_closed_loop(plant, B, Pi, f, T, dt, store_stride);
      },
      py::arg("plant"), py::arg("B"), py::arg("Pi"), py::arg("f"), py::arg("T"), py::arg("dt"),
      py::arg("store_stride") = 100);

  py::class_<WorstCaseSet>(m, "WorstCaseSet")
      .def_readonly("lambda_max", &WorstCaseSet::lambda_max)
      .def_readonly("representatives", &WorstCaseSet::representatives);
  m.def("worst_case_initial", &worst_case_initial, py::arg("Pi"), py::arg("G"));

  py::enum_<FieldMethod>(m, "FieldMethod")
      .value("Trajectory", FieldMethod::Trajectory)
      .value("Gramian", FieldMethod::Gramian);

  py::class_<ShapeGradient>(m, "ShapeGradient")
      .def_readonly("b", &ShapeGradient::b)
      .def_readonly("per_boundary_terms", &ShapeGradient::per_boundary_terms)
      .def_readonly("clamped", &ShapeGradient::clamped);

  py::class_<SensitivityField>(m, "SensitivityField")
      .def_readonly("g", &SensitivityField::g)
      .def_readonly("alpha", &SensitivityField::alpha)
      .def_readonly("c", &SensitivityField::c)
      .def_readonly("size", &SensitivityField::size);

  m.def(
      "shape_gradient",
      [](const ActuatorShape& shape, const Eigen::VectorXd& f, const Plant& plant,
         const QuadratureSpec& quad, FieldMethod method) {
        return shape_gradient(shape, f, plant, quad, method);
      },
      py::arg("shape"), py::arg("f"), py::arg("plant"),
      py::arg("quad") = QuadratureSpec{}, py::arg("method") = FieldMethod::Gramian);
  m.def(
      "topological_field",
      [](const ActuatorShape& shape, const Eigen::VectorXd& f, const Plant& plant, double alpha,
         double c, const QuadratureSpec& quad, FieldMethod method) {
        return topological_field(shape, f, plant, alpha, c, quad, method);
      },
      py::arg("shape"), py::arg("f"), py::arg("plant"), py::arg("alpha"), py::arg("c"),
      py::arg("quad") = QuadratureSpec{}, py::arg("method") = FieldMethod::Gramian);

  py::class_<OptimizeConfig>(m, "OptimizeConfig")
      .def(py::init<>())
      .def_readwrite("beta0", &OptimizeConfig::beta0)
      .def_readwrite("beta_shrink", &OptimizeConfig::beta_shrink)
      .def_readwrite("eps_stop", &OptimizeConfig::eps_stop)
      .def_readwrite("max_iters", &OptimizeConfig::max_iters)
      .def_readwrite("reinit_period", &OptimizeConfig::reinit_period)
      .def_readwrite("alpha_schedule", &OptimizeConfig::alpha_schedule)
      .def_readwrite("quad", &OptimizeConfig::quad)
      .def_readwrite("field_method", &OptimizeConfig::field_method);

  py::class_<IterateRecord>(m, "IterateRecord")
      .def_readonly("iter", &IterateRecord::iter)
      .def_readonly("beta", &IterateRecord::beta)
      .def_readonly("accepted", &IterateRecord::accepted)
      .def_readonly("report", &IterateRecord::report);

  py::class_<AlphaRow>(m, "AlphaRow")
      .def_readonly("alpha", &AlphaRow::alpha)
      .def_readonly("report", &AlphaRow::report)
      .def_readonly("iterations", &AlphaRow::iterations);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("iterates", &RunRecord::iterates)
      .def_readonly("final_shape", &RunRecord::final_shape)
      .def_readonly("final_report", &RunRecord::final_report)
      .def_readonly("per_alpha", &RunRecord::per_alpha)
      .def_readonly("final_psi", &RunRecord::final_psi)
      .def_readonly("final_f", &RunRecord::final_f)
      .def_readonly("converged", &RunRecord::converged)
      .def_readonly("stop_reason", &RunRecord::stop_reason);

  m.def("position_descent", &position_descent, py::arg("shape0"), py::arg("f"), py::arg("plant"),
        py::arg("config"));
  m.def("levelset_design", &levelset_design, py::arg("psi0"), py::arg("f"), py::arg("plant"),
        py::arg("alpha"), py::arg("c"), py::arg("config"));
  m.def("worst_case_design", &worst_case_design, py::arg("psi0"), py::arg("plant"),
        py::arg("alpha"), py::arg("c"), py::arg("config"));
  m.def(
      "continuation",
      [](const LevelSetField& psi0, py::object f, const Plant& plant, double c,
         const OptimizeConfig& cfg) {
        if (f.is_none()) return continuation(psi0, nullptr, plant, c, cfg);
        Eigen::VectorXd fv = f.cast<Eigen::VectorXd>();
        return continuation(psi0, &fv, plant, c, cfg);
      },
      py::arg("psi0"), py::arg("f"), py::arg("plant"), py::arg("c"), py::arg("config"));

  py::class_<ScanResult>(m, "ScanResult")
      .def_readonly("entries", &ScanResult::entries)
      .def_readonly("argmin_center", &ScanResult::argmin_center);
  m.def("position_scan", &position_scan, py::arg("f"), py::arg("plant"), py::arg("width"),
        py::arg("centers"));

  m.def("list_catalog", &list_catalog);
  m.def("run_scenario", &run_scenario, py::arg("path"));
  m.def("validate_scenario", &validate_scenario, py::arg("path"));
}
