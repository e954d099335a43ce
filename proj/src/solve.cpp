#include "bqclab/solve.hpp"

#include "bqclab/stability.hpp"
#include "mean_zero_projection.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace bqclab {

DeadLoad::DeadLoad(Eigen::ArrayXd site_values) : values_(std::move(site_values)) {
  const auto n = values_.size();
  const double sum = values_.sum();
  const double scale = n ? values_.abs().maxCoeff() : 0.0;
  if (std::abs(sum) > 1e-12 * static_cast<double>(n) * scale) {
    throw std::invalid_argument("DeadLoad: site forces must be mean-zero");
  }
  if (n) values_ -= values_.mean();
}

DeadLoad DeadLoad::projected(Eigen::ArrayXd raw) {
  raw -= raw.mean();
  return DeadLoad(std::move(raw));
}

namespace {

double resolve_floor(const EnergyModel& m, const SolveOptions& opts) {
  if (std::isnan(opts.admissibility_floor)) {
    return 0.5 * m.potential().inflection();
  }
  return opts.admissibility_floor;
}

}  // namespace

namespace {

// One Newton run at a fixed load; shared by the plain solve and the ramped
// continuation_steps variant.
Deformation newton_solve(const EnergyModel& m, const DualFunctional& load_dual,
                         const Deformation& y0, const SolveOptions& opts,
                         double floor, const detail::MeanZeroBasis& basis,
                         SolveReport& report) {
  Deformation y = y0;
  auto residual_of = [&](const Deformation& state) {
    return first_variation(m, state) - load_dual;
  };
  DualFunctional residual = residual_of(y);
  double res_norm = dual_norm(residual, 2.0);
  report.residual_history.push_back(res_norm);

  while (res_norm > opts.newton_tol) {
    if (report.iterations >= opts.max_iter) {
      report.residual = res_norm;
      throw SolveError("equilibrate: no convergence within max_iter", report);
    }
    ++report.iterations;

    const Eigen::MatrixXd form =
        basis.project(detail::strain_form_matrix(second_variation(m, y)));
    const Eigen::VectorXd rhs = -basis.reduce(residual.strain_rep().matrix());

    Eigen::VectorXd dz;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(form);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      dz = ldlt.solve(rhs);
    } else {
      // Shift past the most negative eigenvalue so continuation can keep
      // stepping near the stability limit.
      ++report.indefinite_steps;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form,
                                                        Eigen::EigenvaluesOnly);
      const double lambda_min = es.eigenvalues()(0);
      const double shift =
          -lambda_min + std::max(1e-8, 0.1 * std::abs(lambda_min));
      Eigen::MatrixXd shifted = form;
      shifted.diagonal().array() += shift;
      dz = Eigen::LDLT<Eigen::MatrixXd>(shifted).solve(rhs);
    }
    const Displacement step = integrate_strain(basis.lift(dz).array());

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= opts.max_backtracks; ++halving) {
      const Displacement trial_u = Displacement::projected(
          y.displacement().values() + t * step.values());
      const Deformation trial(m.config(), y.macroscopic_strain(), trial_u);
      if (trial.min_strain() > floor) {
        const DualFunctional trial_residual = residual_of(trial);
        const double trial_norm = dual_norm(trial_residual, 2.0);
        if (trial_norm < res_norm) {
          y = trial;
          residual = trial_residual;
          res_norm = trial_norm;
          report.residual_history.push_back(res_norm);
          report.total_backtracks += halving;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      report.residual = res_norm;
      throw SolveError(
          "equilibrate: step rejected after max backtracks "
          "(admissibility or residual decrease unrecoverable)",
          report);
    }
  }
  report.residual = res_norm;
  return y;
}

}  // namespace

std::pair<Deformation, SolveReport> equilibrate(const EnergyModel& m,
                                                const DeadLoad& f,
                                                const Deformation& y0,
                                                const SolveOptions& opts) {
  const int n = m.config().n_atoms;
  if (f.size() != n || y0.config().n_atoms != n) {
    throw std::invalid_argument("equilibrate: size mismatch");
  }
  if (!y0.admissible()) {
    throw std::invalid_argument("equilibrate: initial state is inadmissible");
  }
  if (opts.continuation_steps < 1) {
    throw std::invalid_argument("equilibrate: continuation_steps must be >= 1");
  }
  const double floor = resolve_floor(m, opts);
  const detail::MeanZeroBasis basis(n);

  SolveReport report;
  Deformation y = y0;
  // Ramp the load in continuation_steps warm-started increments; the last
  // increment is the full load.
  for (int step = 1; step <= opts.continuation_steps; ++step) {
    const double scale =
        static_cast<double>(step) / opts.continuation_steps;
    const DualFunctional load_dual = forces_to_dual(scale * f.values());
    y = newton_solve(m, load_dual, y, opts, floor, basis, report);
  }
  report.converged = true;
  if (opts.report_coercivity) {
    report.final_coercivity = coercivity_value(m, y, n);
  }
  return {y, report};
}

ContinuationResult continuation(const EnergyModel& m, const DeadLoad& f,
                                const std::vector<double>& strain_path,
                                const SolveOptions& opts) {
  ContinuationResult result;
  SolveOptions local = opts;
  local.report_coercivity = true;

  Displacement warm = Displacement::zero(m.config().n_atoms);
  for (int i = 0; i < static_cast<int>(strain_path.size()); ++i) {
    const Deformation start(m.config(), strain_path[i], warm);
    try {
      auto [state, report] = equilibrate(m, f, start, local);
      const bool stable = report.final_coercivity > 0.0;
      result.points.push_back({strain_path[i], state, std::move(report)});
      if (!stable) {
        result.failure_index = i;
        break;
      }
      warm = state.displacement();
    } catch (const SolveError&) {
      result.failure_index = i;
      break;
    }
  }
  return result;
}

}  // namespace bqclab
