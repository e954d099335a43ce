#include "bqclab/stability.hpp"

#include "mean_zero_projection.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bqclab {

namespace {

void check_dense_cap(int n, int dense_cap) {
  if (n > dense_cap) {
    throw std::invalid_argument("coercivity: N exceeds the dense eigensolver cap");
  }
}

}  // namespace

StabilityReport coercivity(const EnergyModel& m, const Deformation& y,
                           int dense_cap) {
  const int n = m.config().n_atoms;
  check_dense_cap(n, dense_cap);
  const double eps = m.config().spacing();

  const detail::MeanZeroBasis basis(n);
  const Eigen::MatrixXd form =
      basis.project(detail::strain_form_matrix(second_variation(m, y)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("coercivity: eigensolver failed");
  }

  StabilityReport report;
  report.coercivity = es.eigenvalues()(0);
  Eigen::VectorXd w = basis.lift(es.eigenvectors().col(0));
  w /= std::sqrt(eps) * w.norm();  // ||w||_{l2_eps} = 1
  report.minimizing_strain_mode = w.array();

  report.a_underline =
      atomistic_hessian_coefficients(m.potential(), y).a_bar.minCoeff();
  const bool bounds_apply =
      2.0 * y.min_strain() >= m.potential().inflection();
  if (bounds_apply) {
    const double correction = hessian_coeff_gap(m, y).bound;
    report.bound_a_priori = report.a_underline - correction;
    report.bound_a_posteriori = report.coercivity - correction;
  } else {
    report.bound_a_priori = std::numeric_limits<double>::quiet_NaN();
    report.bound_a_posteriori = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

double coercivity_value(const EnergyModel& m, const Deformation& y,
                        int dense_cap) {
  const int n = m.config().n_atoms;
  check_dense_cap(n, dense_cap);
  const detail::MeanZeroBasis basis(n);
  const Eigen::MatrixXd form =
      basis.project(detail::strain_form_matrix(second_variation(m, y)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("coercivity: eigensolver failed");
  }
  return es.eigenvalues()(0);
}

double a_priori_stability_bound(const EnergyModel& m, const Deformation& y) {
  if (!(2.0 * y.min_strain() >= m.potential().inflection())) {
    throw std::domain_error("a_priori_stability_bound: requires min strain >= r*/2");
  }
  const double a_underline =
      atomistic_hessian_coefficients(m.potential(), y).a_bar.minCoeff();
  return a_underline - hessian_coeff_gap(m, y).bound;
}

double a_posteriori_stability_bound(const EnergyModel& m, const Deformation& y,
                                    int dense_cap) {
  if (!(2.0 * y.min_strain() >= m.potential().inflection())) {
    throw std::domain_error(
        "a_posteriori_stability_bound: requires min strain >= r*/2");
  }
  return coercivity_value(m, y, dense_cap) - hessian_coeff_gap(m, y).bound;
}

double critical_strain(const EnergyModel& m, double f_lo, double f_hi, double tol,
                       int dense_cap) {
  if (!(f_lo > 0.0 && f_hi > f_lo)) {
    throw std::invalid_argument("critical_strain: invalid bracket");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("critical_strain: tol must be positive");
  }
  auto c_at = [&](double f) {
    return coercivity_value(m, Deformation::uniform(m.config(), f), dense_cap);
  };
  double c_lo = c_at(f_lo);
  double c_hi = c_at(f_hi);
  if (!(c_lo > 0.0 && c_hi < 0.0)) {
    throw std::invalid_argument(
        "critical_strain: no sign change of the coercivity over the bracket");
  }
  while (f_hi - f_lo > tol) {
    const double mid = 0.5 * (f_lo + f_hi);
    if (c_at(mid) > 0.0) {
      f_lo = mid;
    } else {
      f_hi = mid;
    }
  }
  return 0.5 * (f_lo + f_hi);
}

double cauchy_born_critical_strain(const Potential& pot, double f_lo, double f_hi,
                                   double tol) {
  auto a_of = [&](double f) {
    return pot.derivative(2, f) + 4.0 * pot.derivative(2, 2.0 * f);
  };
  double a_lo = a_of(f_lo);
  double a_hi = a_of(f_hi);
  if (!(a_lo > 0.0 && a_hi < 0.0)) {
    throw std::invalid_argument(
        "cauchy_born_critical_strain: no sign change over the bracket");
  }
  while (f_hi - f_lo > tol) {
    const double mid = 0.5 * (f_lo + f_hi);
    if (a_of(mid) > 0.0) {
      f_lo = mid;
    } else {
      f_hi = mid;
    }
  }
  return 0.5 * (f_lo + f_hi);
}

}  // namespace bqclab
