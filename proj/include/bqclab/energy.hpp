#pragma once

#include "bqclab/blend.hpp"
#include "bqclab/lattice.hpp"
#include "bqclab/potential.hpp"

#include <optional>
#include <string>

namespace bqclab {

enum class ModelTag { atomistic, cauchy_born, qce, qnl, bqce, bqnl, custom_bqc };

std::string to_string(ModelTag tag);

/// One energy family covers every model in the library:
///
///   Phi(y) = eps * sum phi(y'_xi) + alpha_xi phi(2 y'_xi)
///                                 + beta_xi phi(y'_xi + y'_{xi+1}).
///
/// The named constructors only differ in how the site weight arrays
/// (alpha, beta) are derived: atomistic is (0, 1), Cauchy-Born is (1, 0),
/// the gamma-blend of per-atom energy densities gives BQCE (QCE when gamma
/// is an indicator), and the eta-blend of second-neighbor bond energies
/// gives BQNL (QNL when eta is an indicator).
class EnergyModel {
 public:
  static EnergyModel atomistic(Potential pot, LatticeConfig config);
  static EnergyModel cauchy_born(Potential pot, LatticeConfig config);
  /// Blend of per-atom energy densities; `gamma` in continuum orientation.
  static EnergyModel bqce(Potential pot, BlendFunction gamma);
  /// Blend of second-neighbor bond energies. Takes the same layout object as
  /// bqce() and uses eta = 1 - gamma internally, so the atomistic plateau of
  /// the blend is atomistic in both models.
  static EnergyModel bqnl(Potential pot, BlendFunction gamma_layout);
  /// BQNL directly from bond weights eta (1 = atomistic bond).
  static EnergyModel from_bond_weights(Potential pot, LatticeConfig config,
                                       Eigen::ArrayXd eta);
  /// Arbitrary site weights; tag becomes custom_bqc.
  static EnergyModel from_site_weights(Potential pot, LatticeConfig config,
                                       Eigen::ArrayXd alpha, Eigen::ArrayXd beta);

  ModelTag tag() const { return tag_; }
  const Potential& potential() const { return potential_; }
  const LatticeConfig& config() const { return config_; }
  const Eigen::ArrayXd& alpha() const { return alpha_; }
  const Eigen::ArrayXd& beta() const { return beta_; }
  const std::optional<BlendFunction>& provenance() const { return provenance_; }

  /// True for models whose first variation vanishes at every uniform state.
  bool patch_test_consistent() const {
    return tag_ == ModelTag::atomistic || tag_ == ModelTag::cauchy_born ||
           tag_ == ModelTag::qnl || tag_ == ModelTag::bqnl;
  }

 private:
  EnergyModel(Potential pot, LatticeConfig config, Eigen::ArrayXd alpha,
              Eigen::ArrayXd beta, ModelTag tag,
              std::optional<BlendFunction> provenance);
  void validate() const;

  Potential potential_;
  LatticeConfig config_;
  Eigen::ArrayXd alpha_;
  Eigen::ArrayXd beta_;
  ModelTag tag_;
  std::optional<BlendFunction> provenance_;
};

/// Total energy over one period. Throws on nonpositive strain.
double value(const EnergyModel& m, const Deformation& y);

/// First variation as a dual functional (mean-zero strain representation).
DualFunctional first_variation(const EnergyModel& m, const Deformation& y);

/// Coefficients of the second variation
///   d2Phi(y)[u,u] = eps * sum a_bar_xi |u'_xi|^2 + eps^2 b_bar_xi |u''_xi|^2.
struct HessianCoefficients {
  Eigen::ArrayXd a_bar;
  Eigen::ArrayXd b_bar;
};

HessianCoefficients second_variation(const EnergyModel& m, const Deformation& y);

/// Evaluates the quadratic form above on a displacement u.
double quadratic_form(const HessianCoefficients& h, const Eigen::ArrayXd& u);

/// Atomistic Hessian coefficients A_xi, B_xi at the same state (the alpha=0,
/// beta=1 specialization).
HessianCoefficients atomistic_hessian_coefficients(const Potential& pot,
                                                   const Deformation& y);

struct CoefficientGap {
  double gap;    // max_xi |a_bar_xi - A_xi|
  double bound;  // envelope bound on the gap
};

/// Uniform gap between the model's and the atomistic Hessian coefficients
/// together with its envelope bound
///   2 C2 ||d2 alpha||_inf + 2 eps C3 ||d beta y''||_inf
///   + 2 eps^2 { C3 ||(1-beta_{xi-1}) y'''||_inf + C4 ||(1-beta) (y'')^2||_inf },
/// the first term dropping for bond-blended (beta-consistent) models.
/// Requires min y' >= r*/2 so the curvature terms of both Hessians have one
/// sign.
CoefficientGap hessian_coeff_gap(const EnergyModel& m, const Deformation& y);

}  // namespace bqclab
