#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pbessel/hfield.hpp"
#include "pbessel/inverse.hpp"
#include "pbessel/potential.hpp"
#include "pbessel/solver.hpp"
#include "pbessel/spectrum.hpp"
#include "pbessel/uniqueness.hpp"

namespace py = pybind11;
using namespace pbessel;

PYBIND11_MODULE(_pbessel, m) {
  m.doc() = "Forward and inverse spectral toolkit for the perturbed Bessel "
            "operator -f'' + l(l+1)/x^2 f + q f on (0,1)";
  m.attr("BETA_INFINITY") = kBetaInfinity;

  py::class_<SmoothnessTag>(m, "SmoothnessTag")
      .def(py::init<>())
      .def_readwrite("k", &SmoothnessTag::k)
      .def_readwrite("p", &SmoothnessTag::p)
      .def_readwrite("delta0", &SmoothnessTag::delta0)
      .def_readwrite("vanishing", &SmoothnessTag::vanishing)
      .def_readwrite("weighted_class", &SmoothnessTag::weighted_class)
      .def("validate", &SmoothnessTag::validate, py::arg("a"));

  py::class_<Potential>(m, "Potential")
      .def_static("zero", &Potential::zero)
      .def_static("constant", &Potential::constant, py::arg("value"))
      .def_static("piecewise", &Potential::piecewise, py::arg("breakpoints"),
                  py::arg("values"))
      .def_static("cosine_basis", &Potential::cosine_basis,
                  py::arg("coefficients"), py::arg("a"),
                  py::arg("tail_breakpoints") = std::vector<double>{},
                  py::arg("tail_values") = std::vector<double>{})
      .def_static("polynomial_basis", &Potential::polynomial_basis,
                  py::arg("coefficients"), py::arg("a"),
                  py::arg("tail_breakpoints") = std::vector<double>{},
                  py::arg("tail_values") = std::vector<double>{})
      .def_static("table", &Potential::table, py::arg("x"), py::arg("y"))
      .def_static("from_function", &Potential::from_function, py::arg("f"),
                  py::arg("samples") = 4096)
      .def_static("parse", &Potential::parse, py::arg("text"))
      .def_static("load", &Potential::load, py::arg("path"))
      .def("save", &Potential::save, py::arg("path"))
      .def("__call__", [](const Potential& q, double x) { return q(x); },
           py::arg("x"))
      .def("split_point", &Potential::split_point)
      .def("set_split_point", &Potential::set_split_point, py::arg("a"))
      .def("smoothness", &Potential::smoothness,
           py::return_value_policy::copy)
      .def("set_smoothness", &Potential::set_smoothness, py::arg("tag"))
      .def("mandatory_points", &Potential::mandatory_points,
           py::return_value_policy::copy)
      .def("shifted", &Potential::shifted, py::arg("c"))
      .def("l1_norm", &Potential::l1_norm)
      .def("describe", &Potential::describe)
      .def("hash_hex", &Potential::hash_hex)
      .def("__repr__", [](const Potential& q) {
        return "<Potential " + q.hash_hex() + ">";
      });

  py::class_<Scaled>(m, "Scaled")
      .def_readonly("mantissa", &Scaled::mantissa)
      .def_readonly("log_scale", &Scaled::log_scale)
      .def("value", &Scaled::value)
      .def("log_abs", &Scaled::log_abs);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("abs_tol", &SolverOptions::abs_tol)
      .def_readwrite("rel_tol", &SolverOptions::rel_tol)
      .def_readwrite("start_x", &SolverOptions::start_x)
      .def_readwrite("max_step", &SolverOptions::max_step)
      .def_readwrite("rescale", &SolverOptions::rescale);

  py::class_<SpectrumOptions>(m, "SpectrumOptions")
      .def(py::init<>())
      .def_readwrite("solver", &SpectrumOptions::solver)
      .def_readwrite("jobs", &SpectrumOptions::jobs)
      .def_readwrite("residual_tol", &SpectrumOptions::residual_tol)
      .def_readwrite("max_bracket_doublings",
                     &SpectrumOptions::max_bracket_doublings)
      .def_readwrite("window_slack", &SpectrumOptions::window_slack);

  py::class_<SpectralPoint>(m, "SpectralPoint")
      .def_readonly("lam", &SpectralPoint::lambda)
      .def_readonly("index", &SpectralPoint::index)
      .def_readonly("beta", &SpectralPoint::beta)
      .def_readonly("zeta", &SpectralPoint::zeta)
      .def_readonly("kappa", &SpectralPoint::kappa)
      .def_readonly("residual", &SpectralPoint::residual)
      .def("__repr__", [](const SpectralPoint& p) {
        return "<SpectralPoint n=" + std::to_string(p.index) +
               " lambda=" + std::to_string(p.lambda) + ">";
      });

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("ell", &Spectrum::ell)
      .def_readonly("beta", &Spectrum::beta)
      .def_readonly("points", &Spectrum::points)
      .def_readonly("center_offset", &Spectrum::center_offset)
      .def_readonly("potential_hash", &Spectrum::potential_hash)
      .def("to_csv", &Spectrum::to_csv)
      .def("to_json", &Spectrum::to_json);

  m.def("locate_eigenvalues", &locate_eigenvalues, py::arg("ell"),
        py::arg("q"), py::arg("beta"), py::arg("count"),
        py::arg("options") = SpectrumOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("norming_constant", &norming_constant, py::arg("point"),
        py::arg("ell"), py::arg("q"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("multiplier_kappa", &multiplier_kappa, py::arg("point"),
        py::arg("ell"), py::arg("q"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("attach_norming_data", &attach_norming_data, py::arg("spectrum"),
        py::arg("ell"), py::arg("q"), py::arg("options") = SpectrumOptions{},
        py::call_guard<py::gil_scoped_release>());

  m.def("characteristic", &characteristic, py::arg("ell"), py::arg("q"),
        py::arg("lam"), py::arg("beta"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("characteristic_derivative", &characteristic_derivative,
        py::arg("ell"), py::arg("q"), py::arg("lam"), py::arg("beta"),
        py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("tau_integral", &tau_integral, py::arg("ell"), py::arg("q"),
        py::arg("lam"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("zeta_integral", &zeta_integral, py::arg("ell"), py::arg("q"),
        py::arg("lam"), py::arg("beta"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("oscillation_count", &oscillation_count, py::arg("ell"), py::arg("q"),
        py::arg("lam"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());

  m.def("h_value", &h_value, py::arg("ell"), py::arg("q"), py::arg("qhat"),
        py::arg("lam"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("h_derivative", &h_derivative, py::arg("ell"), py::arg("q"),
        py::arg("qhat"), py::arg("lam"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("h_derivative_fd", &h_derivative_fd, py::arg("ell"), py::arg("q"),
        py::arg("qhat"), py::arg("lam"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<MeanPerturbationResult>(m, "MeanPerturbationResult")
      .def_readonly("value", &MeanPerturbationResult::value)
      .def_readonly("converged", &MeanPerturbationResult::converged)
      .def_readonly("err_estimate", &MeanPerturbationResult::err_estimate);
  m.def("mean_perturbation_limit", &mean_perturbation_limit, py::arg("ell"),
        py::arg("q"), py::arg("qhat"), py::arg("lambda_grid"),
        py::arg("options") = SolverOptions{}, py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("imaginary_axis_decay_slope", &imaginary_axis_decay_slope,
        py::arg("ell"), py::arg("q"), py::arg("qhat"), py::arg("a"),
        py::arg("t_lo"), py::arg("t_hi"), py::arg("count"),
        py::arg("options") = SolverOptions{}, py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());
  py::class_<QuadratureOptions>(m, "QuadratureOptions")
      .def(py::init<>())
      .def_readwrite("rel_tol", &QuadratureOptions::rel_tol)
      .def_readwrite("abs_tol", &QuadratureOptions::abs_tol)
      .def_readwrite("max_subdivisions", &QuadratureOptions::max_subdivisions);
  m.def("cosine_transform_F", &cosine_transform_F, py::arg("f"), py::arg("a"),
        py::arg("lam"), py::arg("options") = QuadratureOptions{});
  m.def("cosine_transform_F_prime", &cosine_transform_F_prime, py::arg("f"),
        py::arg("a"), py::arg("lam"), py::arg("options") = QuadratureOptions{});
  m.def("cosine_transform_F_kth0", &cosine_transform_F_kth0, py::arg("f"),
        py::arg("a"), py::arg("k"), py::arg("options") = QuadratureOptions{});

  py::class_<EigenRecord>(m, "EigenRecord")
      .def(py::init([](double value, double beta, bool has_zeta, double zeta) {
             return EigenRecord{value, beta, has_zeta, zeta};
           }),
           py::arg("value"), py::arg("beta") = kBetaInfinity,
           py::arg("has_zeta") = false, py::arg("zeta") = 0.0)
      .def_readwrite("value", &EigenRecord::value)
      .def_readwrite("beta", &EigenRecord::beta)
      .def_readwrite("has_zeta", &EigenRecord::has_zeta)
      .def_readwrite("zeta", &EigenRecord::zeta);

  py::class_<MixedDataset>(m, "MixedDataset")
      .def(py::init<>())
      .def_readwrite("ell", &MixedDataset::ell)
      .def_readwrite("a", &MixedDataset::a)
      // Reading `lam` yields a copy; mutate through `add` or assign a whole
      // list.
      .def_readwrite("lam", &MixedDataset::lambda)
      .def_readwrite("smoothness", &MixedDataset::smoothness)
      .def(
          "add",
          [](MixedDataset& d, double value, double beta, py::object zeta) {
            EigenRecord rec{value, beta, false, 0.0};
            if (!zeta.is_none()) {
              rec.has_zeta = true;
              rec.zeta = zeta.cast<double>();
            }
            d.lambda.push_back(rec);
          },
          py::arg("value"), py::arg("beta") = kBetaInfinity,
          py::arg("zeta") = py::none())
      .def("values", &MixedDataset::values)
      .def("s_values", &MixedDataset::s_values)
      .def("validate", &MixedDataset::validate)
      .def("to_json", &MixedDataset::to_json)
      .def_static("from_json", &MixedDataset::from_json, py::arg("text"));

  py::class_<SystemFunction>(m, "SystemFunction")
      .def("__call__", &SystemFunction::operator(), py::arg("x"))
      .def("describe", &SystemFunction::describe);
  m.def("build_system", &build_system, py::arg("data"));

  py::class_<ClosednessDiagnostic>(m, "ClosednessDiagnostic")
      .def_readonly("sigma_min", &ClosednessDiagnostic::sigma_min)
      .def_readonly("worst_residual", &ClosednessDiagnostic::worst_residual)
      .def_readonly("worst_probe", &ClosednessDiagnostic::worst_probe)
      .def_readonly("system_size", &ClosednessDiagnostic::system_size)
      .def_readonly("label", &ClosednessDiagnostic::label);
  m.def("closedness_diagnostic", &closedness_diagnostic, py::arg("system"),
        py::arg("a"), py::arg("probe_count"),
        py::call_guard<py::gil_scoped_release>());

  m.def("counting_integral", &counting_integral, py::arg("lambdas"),
        py::arg("r"));

  py::class_<CountingReport>(m, "CountingReport")
      .def_readonly("r_grid", &CountingReport::r_grid)
      .def_readonly("integral", &CountingReport::integral)
      .def_readonly("margin", &CountingReport::margin)
      .def_readonly("coefficient", &CountingReport::coefficient)
      .def_readonly("tail_slope", &CountingReport::tail_slope)
      .def_readonly("verdict", &CountingReport::verdict)
      .def("to_csv", &CountingReport::to_csv)
      .def("to_json", &CountingReport::to_json);
  m.def("criterion_margin", &criterion_margin, py::arg("data"),
        py::arg("r_grid"));

  py::class_<JensenRow>(m, "JensenRow")
      .def_readonly("r", &JensenRow::r)
      .def_readonly("radius_used", &JensenRow::radius_used)
      .def_readonly("counting", &JensenRow::counting)
      .def_readonly("circle_average", &JensenRow::circle_average)
      .def_readonly("discrepancy", &JensenRow::discrepancy)
      .def_readonly("holds", &JensenRow::holds);
  py::class_<JensenAudit>(m, "JensenAudit")
      .def_readonly("rows", &JensenAudit::rows)
      .def_readonly("lambda0", &JensenAudit::lambda0)
      .def_readonly("c0", &JensenAudit::c0)
      .def_readonly("status", &JensenAudit::status)
      .def("to_csv", &JensenAudit::to_csv)
      .def("to_json", &JensenAudit::to_json);
  m.def("jensen_audit", &jensen_audit, py::arg("q"), py::arg("qhat"),
        py::arg("data"), py::arg("radii"), py::arg("nodes") = 256,
        py::arg("options") = SolverOptions{}, py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());

  py::class_<CorollaryVerdict>(m, "CorollaryVerdict")
      .def_readonly("satisfied", &CorollaryVerdict::satisfied)
      .def_readonly("margin", &CorollaryVerdict::margin)
      .def_readonly("detail", &CorollaryVerdict::detail);
  m.def("subset_density_check", &subset_density_check, py::arg("sigma"),
        py::arg("s"), py::arg("a"), py::arg("ell"), py::arg("beta"),
        py::arg("weighted_class") = true);
  m.def("eigenvalue_density_check", &eigenvalue_density_check,
        py::arg("sigma"), py::arg("s"), py::arg("a"), py::arg("ell"),
        py::arg("beta"), py::arg("weighted_class") = true);
  m.def("omission_budget", &omission_budget, py::arg("ell"), py::arg("k"),
        py::arg("beta"), py::arg("weighted_class") = true);
  m.def("omission_budget_check", &omission_budget_check, py::arg("sigma"),
        py::arg("kept"), py::arg("ell"), py::arg("k"), py::arg("beta"),
        py::arg("r_grid"), py::arg("weighted_class") = true);

  py::enum_<BasisKind>(m, "BasisKind")
      .value("Piecewise", BasisKind::Piecewise)
      .value("Cosine", BasisKind::Cosine)
      .value("Polynomial", BasisKind::Polynomial);
  m.def("basis_name", &basis_name, py::arg("kind"));
  m.def("basis_from_name", &basis_from_name, py::arg("name"));

  py::class_<ReconstructionProblem>(m, "ReconstructionProblem")
      .def(py::init<>())
      .def_readwrite("data", &ReconstructionProblem::data)
      .def_readwrite("basis", &ReconstructionProblem::basis)
      .def_readwrite("dimension", &ReconstructionProblem::dimension)
      .def_readwrite("tail_breakpoints",
                     &ReconstructionProblem::tail_breakpoints)
      .def_readwrite("tail_values", &ReconstructionProblem::tail_values)
      .def_readwrite("regularization", &ReconstructionProblem::regularization)
      .def_readwrite("max_iterations", &ReconstructionProblem::max_iterations)
      .def_readwrite("seed", &ReconstructionProblem::seed)
      .def_readwrite("initial_guess", &ReconstructionProblem::initial_guess)
      .def_readwrite("ground_truth", &ReconstructionProblem::ground_truth)
      .def_readwrite("spectrum", &ReconstructionProblem::spectrum)
      .def("materialize", &ReconstructionProblem::materialize, py::arg("theta"))
      .def("validate", &ReconstructionProblem::validate)
      .def("to_json", &ReconstructionProblem::to_json)
      .def_static("from_json", &ReconstructionProblem::from_json,
                  py::arg("text"));

  py::class_<ReconstructionResult>(m, "ReconstructionResult")
      .def_readonly("coefficients", &ReconstructionResult::coefficients)
      .def_readonly("eigenvalue_residuals",
                    &ReconstructionResult::eigenvalue_residuals)
      .def_readonly("zeta_residuals", &ReconstructionResult::zeta_residuals)
      .def_readonly("worst_residual", &ReconstructionResult::worst_residual)
      .def_readonly("l2_distance_to_truth",
                    &ReconstructionResult::l2_distance_to_truth)
      .def_readonly("trace", &ReconstructionResult::trace)
      .def_readonly("converged", &ReconstructionResult::converged)
      .def_readonly("iterations", &ReconstructionResult::iterations)
      .def_readonly("status", &ReconstructionResult::status)
      .def_readonly("recovered", &ReconstructionResult::recovered)
      .def("to_json", &ReconstructionResult::to_json);
  m.def("reconstruct", &reconstruct, py::arg("problem"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<ProbeResult>(m, "ProbeResult")
      .def_readonly("found", &ProbeResult::found)
      .def_readonly("distance", &ProbeResult::distance)
      .def_readonly("worst_residual", &ProbeResult::worst_residual)
      .def_readonly("coefficients", &ProbeResult::coefficients)
      .def_readonly("candidate", &ProbeResult::candidate)
      .def_readonly("starts_used", &ProbeResult::starts_used)
      .def_readonly("status", &ProbeResult::status)
      .def("to_json", &ProbeResult::to_json);
  m.def("nonuniqueness_probe", &nonuniqueness_probe, py::arg("problem"),
        py::arg("rho"), py::call_guard<py::gil_scoped_release>());

  m.def("l2_distance", &l2_distance, py::arg("p1"), py::arg("p2"),
        py::arg("lo"), py::arg("hi"),
        py::call_guard<py::gil_scoped_release>());
}
