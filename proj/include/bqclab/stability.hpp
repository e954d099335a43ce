#pragma once

#include "bqclab/energy.hpp"

namespace bqclab {

/// Coercivity of a model Hessian over mean-zero displacements with unit
/// strain norm, with the envelope-based lower bounds evaluated at the same
/// state (NaN when min y' < r*/2, where the bounds do not apply).
struct StabilityReport {
  double coercivity = 0.0;
  Eigen::ArrayXd minimizing_strain_mode;  // w = u', mean-zero, ||w||_{l2_eps} = 1
  double bound_a_priori = 0.0;
  double bound_a_posteriori = 0.0;
  double a_underline = 0.0;  // min over sites of the atomistic A_xi at y
};

/// Smallest eigenvalue (and eigenvector) of the Hessian quadratic form on
/// the mean-zero strain subspace, via a dense symmetric eigensolve. Throws
/// for nonpositive strain or N beyond dense_cap.
StabilityReport coercivity(const EnergyModel& m, const Deformation& y,
                           int dense_cap = 4096);

/// Eigenvalue-only fast path (no mode, no bounds).
double coercivity_value(const EnergyModel& m, const Deformation& y,
                        int dense_cap = 4096);

/// Lower bound on the model's coercivity from the atomistic coefficients:
/// min_xi A_xi minus the Hessian-coefficient gap bound. Requires
/// min y' >= r*/2.
double a_priori_stability_bound(const EnergyModel& m, const Deformation& y);

/// Lower bound on the atomistic coercivity from the model's coercivity:
/// c_model(y) minus the same gap bound. Requires min y' >= r*/2.
double a_posteriori_stability_bound(const EnergyModel& m, const Deformation& y,
                                    int dense_cap = 4096);

/// First uniform strain at which the model's coercivity reaches zero,
/// located by bisection on [f_lo, f_hi] to width tol. Requires a sign
/// change over the bracket.
double critical_strain(const EnergyModel& m, double f_lo, double f_hi,
                       double tol = 1e-8, int dense_cap = 4096);

/// Critical strain of the local (Cauchy-Born) model by scalar bisection of
/// phi''(F) + 4 phi''(2F).
double cauchy_born_critical_strain(const Potential& pot, double f_lo, double f_hi,
                                   double tol = 1e-8);

}  // namespace bqclab
