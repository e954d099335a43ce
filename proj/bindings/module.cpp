#include "bqclab/experiments.hpp"
#include "bqclab/runner.hpp"
#include "bqclab/stability.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace bqclab;

PYBIND11_MODULE(_bqclab, m) {
  m.doc() = "Blended quasicontinuum models of a periodic atom chain";

  py::class_<LatticeConfig>(m, "LatticeConfig")
      .def(py::init<int>(), py::arg("n_atoms"))
      .def_readonly("n_atoms", &LatticeConfig::n_atoms)
      .def_property_readonly("spacing", &LatticeConfig::spacing)
      .def("__repr__", [](const LatticeConfig& c) {
        return "LatticeConfig(n_atoms=" + std::to_string(c.n_atoms) + ")";
      });

  py::class_<Deformation>(m, "Deformation")
      .def(py::init([](const LatticeConfig& config, double strain,
                       const Eigen::ArrayXd& displacement) {
             return Deformation(config, strain,
                                Displacement::projected(displacement));
           }),
           py::arg("config"), py::arg("strain"), py::arg("displacement"))
      .def_static("uniform", &Deformation::uniform, py::arg("config"),
                  py::arg("strain"))
      .def_property_readonly("config", &Deformation::config)
      .def_property_readonly("macroscopic_strain", &Deformation::macroscopic_strain)
      .def_property_readonly(
          "displacement",
          [](const Deformation& d) { return d.displacement().values(); })
      .def_property_readonly("positions", &Deformation::positions)
      .def_property_readonly("strains", &Deformation::strains)
      .def_property_readonly("curvatures", &Deformation::curvatures)
      .def_property_readonly("third_derivatives", &Deformation::third_derivatives)
      .def_property_readonly("min_strain", &Deformation::min_strain)
      .def_property_readonly("admissible", &Deformation::admissible)
      .def("with_strain", &Deformation::with_strain, py::arg("strain"));

  py::class_<Potential>(m, "Potential")
      .def_static("lennard_jones", &Potential::lennard_jones)
      .def_static("morse", &Potential::morse, py::arg("stiffness") = 4.0)
      .def_property_readonly("name", &Potential::name)
      .def_property_readonly("inflection", &Potential::inflection)
      .def("__call__", &Potential::operator(), py::arg("r"))
      .def("derivative", &Potential::derivative, py::arg("order"), py::arg("r"))
      .def("envelope", &Potential::envelope, py::arg("order"), py::arg("r0"));

  py::class_<BlendShape>(m, "BlendShape")
      .def_static("characteristic", &BlendShape::characteristic)
      .def_static("linear", &BlendShape::linear)
      .def_static("cubic", &BlendShape::cubic)
      .def_static("quintic", &BlendShape::quintic)
      .def_static("custom", &BlendShape::custom, py::arg("coefficients"))
      .def_property_readonly("name", &BlendShape::name)
      .def("__call__", &BlendShape::operator(), py::arg("x"))
      .def("derivative", &BlendShape::derivative, py::arg("x"))
      .def("second_derivative", &BlendShape::second_derivative, py::arg("x"))
      .def("endpoint_slopes_vanish", &BlendShape::endpoint_slopes_vanish)
      .def("derivative_lp_norm", &BlendShape::derivative_lp_norm, py::arg("p"))
      .def("second_derivative_lp_norm", &BlendShape::second_derivative_lp_norm,
           py::arg("p"));
  m.def("optimal_shape", &optimal_shape);

  py::class_<BlendFunction>(m, "BlendFunction")
      .def_readonly("config", &BlendFunction::config)
      .def_readonly("values", &BlendFunction::values)
      .def_readonly("shape", &BlendFunction::shape)
      .def_readonly("transition_width", &BlendFunction::transition_width)
      .def_readonly("atomistic_sites", &BlendFunction::atomistic_sites)
      .def_readonly("continuum_sites", &BlendFunction::continuum_sites)
      .def_readonly("interface_sites", &BlendFunction::interface_sites)
      .def_readonly("window_up", &BlendFunction::window_up)
      .def_readonly("window_down", &BlendFunction::window_down)
      .def_readonly("degenerate", &BlendFunction::degenerate)
      .def("complemented", &BlendFunction::complemented);

  m.def("build_blend", &build_blend, py::arg("config"), py::arg("shape"),
        py::arg("atomistic_center"), py::arg("atomistic_width"), py::arg("k"));
  m.def("bqce_weights", &bqce_weights, py::arg("gamma"));
  m.def("bqnl_weights", &bqnl_weights, py::arg("eta"));

  py::class_<GhostSeminorm>(m, "GhostSeminorm")
      .def_readonly("value", &GhostSeminorm::value)
      .def_readonly("per_transition_bound", &GhostSeminorm::per_transition_bound)
      .def_readonly("window_alpha", &GhostSeminorm::window_alpha)
      .def_readonly("window_gamma", &GhostSeminorm::window_gamma);
  m.def("ghost_seminorm", &ghost_seminorm, py::arg("gamma"), py::arg("p"));

  py::class_<CouplingSeminorm>(m, "CouplingSeminorm")
      .def_readonly("value", &CouplingSeminorm::value)
      .def_readonly("bound", &CouplingSeminorm::bound);
  m.def(
      "coupling_seminorm",
      [](const Eigen::ArrayXd& beta, const Deformation& y, double p) {
        return coupling_seminorm(beta, y, p);
      },
      py::arg("beta"), py::arg("y"), py::arg("p"));
  m.def(
      "coupling_seminorm_with_bound",
      [](const BlendFunction& blend, const Eigen::ArrayXd& beta,
         const Deformation& y, double p) {
        return coupling_seminorm(blend, beta, y, p);
      },
      py::arg("blend"), py::arg("beta"), py::arg("y"), py::arg("p"));

  // Periodic sequence operators and norms.
  m.def("cyclic_shift", &cyclic_shift, py::arg("s"), py::arg("offset"));
  m.def("site_mean", &site_mean, py::arg("s"));
  m.def("difference", &difference, py::arg("s"));
  m.def("second_difference", &second_difference, py::arg("s"));
  m.def(
      "lp_norm",
      [](const Eigen::ArrayXd& s, double p) { return lp_norm(s, p); },
      py::arg("s"), py::arg("p"));
  m.def(
      "lp_norm_subset",
      [](const Eigen::ArrayXd& s, double p, const std::vector<int>& subset) {
        return lp_norm(s, p, subset);
      },
      py::arg("s"), py::arg("p"), py::arg("subset"));

  py::class_<DualFunctional>(m, "DualFunctional")
      .def(py::init<Eigen::ArrayXd>(), py::arg("strain_rep"))
      .def_property_readonly("strain_rep", &DualFunctional::strain_rep)
      .def("apply", &DualFunctional::apply, py::arg("u"))
      .def(
          "__sub__",
          [](const DualFunctional& a, const DualFunctional& b) { return a - b; },
          py::is_operator());
  m.def("dual_norm", &dual_norm, py::arg("g"), py::arg("p"));
  m.def("forces_to_dual", &forces_to_dual, py::arg("f"));
  m.def("dual_to_forces", &dual_to_forces, py::arg("g"));
  m.def(
      "integrate_strain",
      [](const Eigen::ArrayXd& w) { return integrate_strain(w).values(); },
      py::arg("w"));

  py::enum_<ModelTag>(m, "ModelTag")
      .value("atomistic", ModelTag::atomistic)
      .value("cauchy_born", ModelTag::cauchy_born)
      .value("qce", ModelTag::qce)
      .value("qnl", ModelTag::qnl)
      .value("bqce", ModelTag::bqce)
      .value("bqnl", ModelTag::bqnl)
      .value("custom_bqc", ModelTag::custom_bqc);

  py::class_<EnergyModel>(m, "EnergyModel")
      .def_static("atomistic", &EnergyModel::atomistic, py::arg("potential"),
                  py::arg("config"))
      .def_static("cauchy_born", &EnergyModel::cauchy_born, py::arg("potential"),
                  py::arg("config"))
      .def_static("bqce", &EnergyModel::bqce, py::arg("potential"),
                  py::arg("gamma"))
      .def_static("bqnl", &EnergyModel::bqnl, py::arg("potential"),
                  py::arg("gamma_layout"))
      .def_static("from_bond_weights", &EnergyModel::from_bond_weights,
                  py::arg("potential"), py::arg("config"), py::arg("eta"))
      .def_static("from_site_weights", &EnergyModel::from_site_weights,
                  py::arg("potential"), py::arg("config"), py::arg("alpha"),
                  py::arg("beta"))
      .def_property_readonly("tag", &EnergyModel::tag)
      .def_property_readonly("potential", &EnergyModel::potential)
      .def_property_readonly("config", &EnergyModel::config)
      .def_property_readonly("alpha", &EnergyModel::alpha)
      .def_property_readonly("beta", &EnergyModel::beta)
      .def_property_readonly("patch_test_consistent",
                             &EnergyModel::patch_test_consistent);

  m.def("value", &value, py::arg("model"), py::arg("y"));
  m.def("first_variation", &first_variation, py::arg("model"), py::arg("y"));

  py::class_<HessianCoefficients>(m, "HessianCoefficients")
      .def_readonly("a_bar", &HessianCoefficients::a_bar)
      .def_readonly("b_bar", &HessianCoefficients::b_bar);
  m.def("second_variation", &second_variation, py::arg("model"), py::arg("y"));
  m.def("quadratic_form", &quadratic_form, py::arg("coefficients"), py::arg("u"));
  m.def("atomistic_hessian_coefficients", &atomistic_hessian_coefficients,
        py::arg("potential"), py::arg("y"));

  py::class_<CoefficientGap>(m, "CoefficientGap")
      .def_readonly("gap", &CoefficientGap::gap)
      .def_readonly("bound", &CoefficientGap::bound);
  m.def("hessian_coeff_gap", &hessian_coeff_gap, py::arg("model"), py::arg("y"));

  py::class_<StabilityReport>(m, "StabilityReport")
      .def_readonly("coercivity", &StabilityReport::coercivity)
      .def_readonly("minimizing_strain_mode",
                    &StabilityReport::minimizing_strain_mode)
      .def_readonly("bound_a_priori", &StabilityReport::bound_a_priori)
      .def_readonly("bound_a_posteriori", &StabilityReport::bound_a_posteriori)
      .def_readonly("a_underline", &StabilityReport::a_underline);
  m.def("coercivity", &coercivity, py::arg("model"), py::arg("y"),
        py::arg("dense_cap") = 4096);
  m.def("coercivity_value", &coercivity_value, py::arg("model"), py::arg("y"),
        py::arg("dense_cap") = 4096);
  m.def("a_priori_stability_bound", &a_priori_stability_bound, py::arg("model"),
        py::arg("y"));
  m.def("a_posteriori_stability_bound", &a_posteriori_stability_bound,
        py::arg("model"), py::arg("y"), py::arg("dense_cap") = 4096);
  m.def("critical_strain", &critical_strain, py::arg("model"), py::arg("f_lo"),
        py::arg("f_hi"), py::arg("tol") = 1e-8, py::arg("dense_cap") = 4096);
  m.def("cauchy_born_critical_strain", &cauchy_born_critical_strain,
        py::arg("potential"), py::arg("f_lo"), py::arg("f_hi"),
        py::arg("tol") = 1e-8);

  py::class_<DeadLoad>(m, "DeadLoad")
      .def(py::init([](const Eigen::ArrayXd& values) {
             return DeadLoad::projected(values);
           }),
           py::arg("values"))
      .def_static("zero", &DeadLoad::zero, py::arg("n"))
      .def_property_readonly("values", &DeadLoad::values);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("newton_tol", &SolveOptions::newton_tol)
      .def_readwrite("max_iter", &SolveOptions::max_iter)
      .def_readwrite("continuation_steps", &SolveOptions::continuation_steps)
      .def_readwrite("admissibility_floor", &SolveOptions::admissibility_floor)
      .def_readwrite("max_backtracks", &SolveOptions::max_backtracks)
      .def_readwrite("report_coercivity", &SolveOptions::report_coercivity);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("residual", &SolveReport::residual)
      .def_readonly("final_coercivity", &SolveReport::final_coercivity)
      .def_readonly("indefinite_steps", &SolveReport::indefinite_steps)
      .def_readonly("total_backtracks", &SolveReport::total_backtracks)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("residual_history", &SolveReport::residual_history);

  py::register_exception<SolveError>(m, "SolveError");
  py::register_exception<ConfigError>(m, "ConfigError");

  m.def("equilibrate", &equilibrate, py::arg("model"), py::arg("load"),
        py::arg("y0"), py::arg("options") = SolveOptions{});

  py::class_<ContinuationPoint>(m, "ContinuationPoint")
      .def_readonly("strain", &ContinuationPoint::strain)
      .def_readonly("state", &ContinuationPoint::state)
      .def_readonly("report", &ContinuationPoint::report);
  py::class_<ContinuationResult>(m, "ContinuationResult")
      .def_readonly("points", &ContinuationResult::points)
      .def_readonly("failure_index", &ContinuationResult::failure_index);
  m.def("continuation", &continuation, py::arg("model"), py::arg("load"),
        py::arg("strain_path"), py::arg("options") = SolveOptions{});

  py::class_<LoadProfile>(m, "LoadProfile")
      .def(py::init<>())
      .def_readwrite("sine_amplitude", &LoadProfile::sine_amplitude)
      .def_readwrite("bump_amplitude", &LoadProfile::bump_amplitude)
      .def_readwrite("bump_width", &LoadProfile::bump_width)
      .def_readwrite("bump_center", &LoadProfile::bump_center);
  m.def("sample_load", &sample_load, py::arg("profile"), py::arg("config"));
  m.def("random_smooth_state", &random_smooth_state, py::arg("config"),
        py::arg("strain"), py::arg("seed"), py::arg("relative_amplitude") = 0.05,
        py::arg("modes") = 6);

  py::class_<ModelingErrorParts>(m, "ModelingErrorParts")
      .def_readonly("ghost", &ModelingErrorParts::ghost)
      .def_readonly("coupling", &ModelingErrorParts::coupling)
      .def_readonly("cauchy_born", &ModelingErrorParts::cauchy_born);
  py::class_<ModelingErrorAudit>(m, "ModelingErrorAudit")
      .def_readonly("lhs", &ModelingErrorAudit::lhs)
      .def_readonly("rhs", &ModelingErrorAudit::rhs)
      .def_readonly("parts", &ModelingErrorAudit::parts);
  m.def("modeling_error_audit", &modeling_error_audit, py::arg("model"),
        py::arg("y"), py::arg("p"));

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("slope", &RateFit::slope)
      .def_readonly("intercept", &RateFit::intercept)
      .def_readonly("r_squared", &RateFit::r_squared)
      .def_readonly("points", &RateFit::points);
  m.def("fit_rate", &fit_rate, py::arg("points"));

  py::class_<Table>(m, "Table")
      .def_readonly("columns", &Table::columns)
      .def_readonly("rows", &Table::rows);

  py::class_<SweepSpec>(m, "SweepSpec")
      .def(py::init<>())
      .def_readwrite("model", &SweepSpec::model)
      .def_readwrite("potential", &SweepSpec::potential)
      .def_readwrite("n_list", &SweepSpec::n_list)
      .def_readwrite("k_list", &SweepSpec::k_list)
      .def_readwrite("shapes", &SweepSpec::shapes)
      .def_readwrite("strain", &SweepSpec::strain)
      .def_readwrite("load", &SweepSpec::load)
      .def_readwrite("p", &SweepSpec::p)
      .def_readwrite("atomistic_center", &SweepSpec::atomistic_center)
      .def_readwrite("atomistic_width", &SweepSpec::atomistic_width)
      .def_readwrite("f_lo", &SweepSpec::f_lo)
      .def_readwrite("f_hi", &SweepSpec::f_hi)
      .def_readwrite("bisect_tol", &SweepSpec::bisect_tol)
      .def_readwrite("solver", &SweepSpec::solver)
      .def_readwrite("seed", &SweepSpec::seed)
      .def_readwrite("threads", &SweepSpec::threads);

  py::class_<StudyResult>(m, "StudyResult")
      .def_readonly("table", &StudyResult::table)
      .def_readonly("fit", &StudyResult::fit)
      .def_readonly("fit_valid", &StudyResult::fit_valid)
      .def_readonly("error", &StudyResult::error);
  m.def("convergence_study", &convergence_study, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("critical_strain_study", &critical_strain_study, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_config",
      [](const std::string& text) {
        RunConfig config = parse_config(text);
        validate(config);
        std::ostringstream summary;
        const RunResult result = run(config, summary);
        return py::make_tuple(result.exit_code, summary.str(), result.artifacts);
      },
      py::arg("text"),
      "Parse, validate, and run a flat key=value config; returns "
      "(exit_code, summary, artifacts).");

  m.attr("__version__") = "0.1.0";
}
