#pragma once

#include "bqclab/lattice.hpp"

#include <array>
#include <string>
#include <vector>

namespace bqclab {

/// Scalar transition profile g on [0,1] with g(0) = 0 and g(1) = 1, extended
/// by the constants 0 and 1 outside. Site-sampled copies of g build the
/// lattice blending functions; the L^p size of g'' controls how much ghost
/// force a transition of width k produces.
class BlendShape {
 public:
  enum class Kind { characteristic, linear, cubic, quintic, custom };

  static BlendShape characteristic();
  static BlendShape linear();
  /// 3x^2 - 2x^3, the unique cubic with vanishing endpoint slopes.
  static BlendShape cubic();
  /// 10x^3 - 15x^4 + 6x^5; one more continuous derivative than the cubic.
  static BlendShape quintic();
  /// Polynomial with coefficients in ascending powers of x.
  static BlendShape custom(std::vector<double> coefficients);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// True when both one-sided slopes vanish, so the extension is C^1 and the
  /// k^(1/p - 2) transition estimate applies.
  bool endpoint_slopes_vanish() const;

  /// ||g'||_{L^p([0,1])} and ||g''||_{L^p([0,1])}; throws for the
  /// characteristic shape, whose derivatives are not functions.
  double derivative_lp_norm(double p) const;
  double second_derivative_lp_norm(double p) const;

 private:
  BlendShape(Kind kind, std::vector<double> coefficients, std::string name);
  double polynomial(int derivative_order, double x) const;
  void validate() const;

  Kind kind_;
  std::vector<double> coefficients_;  // empty for characteristic
  std::string name_;
};

/// Returns the transition shape minimizing ||g''||_{L^2([0,1])} subject to
/// g(0) = 0, g(1) = 1, g'(0) = g'(1) = 0: the cubic 3x^2 - 2x^3.
BlendShape optimal_shape();

/// Site-sampled blending function in continuum orientation: 0 on the
/// atomistic plateau, 1 on the continuum plateau, with two sampled
/// transition windows of k+1 sites each in between.
struct BlendFunction {
  LatticeConfig config;
  Eigen::ArrayXd values;
  BlendShape shape;
  int transition_width = 1;  // k

  std::vector<int> atomistic_sites;  // plateau where values == 0
  std::vector<int> continuum_sites;  // plateau where values == 1
  std::vector<int> interface_sites;  // union of the two windows
  std::vector<int> window_up;        // 0 -> 1 transition, k+1 sites
  std::vector<int> window_down;      // 1 -> 0 transition, k+1 sites
  bool degenerate = false;           // k == 1: one-step jump

  /// 1 - values with the plateau roles swapped (atomistic orientation).
  BlendFunction complemented() const;
};

/// Lays out a symmetric periodic blend: an atomistic plateau of
/// `atomistic_width` sites centered at `atomistic_center`, one up and one
/// mirrored down transition window sampled from `shape` over k atoms, and
/// continuum elsewhere. Throws when the pieces do not fit the period.
BlendFunction build_blend(const LatticeConfig& config, const BlendShape& shape,
                          int atomistic_center, int atomistic_width, int k);

/// Site weights of the blended energy obtained by mixing per-atom atomistic
/// and continuum energy densities with weight gamma:
/// alpha_xi = (gamma_xi + gamma_{xi-1})/2,
/// beta_xi  = 1 - (gamma_{xi+1} + gamma_{xi-1})/2.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> bqce_weights(const Eigen::ArrayXd& gamma);

/// Site weights of the blended energy obtained by mixing second-neighbor
/// bond energies with weight eta (1 = atomistic bond, 0 = continuum bond):
/// alpha_xi = 1 - (eta_xi + eta_{xi-1})/2, beta_xi = eta_xi.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> bqnl_weights(const Eigen::ArrayXd& eta);

struct GhostSeminorm {
  double value = 0.0;                 // ||delta^2 alpha||_{l^p_eps}, full period
  double per_transition_bound = 0.0;  // eps^(1/p) k^(1/p-2) ||g''||_p; NaN if undefined
  std::array<double, 2> window_alpha{};  // ||delta^2 alpha||_{l^p_eps(J)} per window
  std::array<double, 2> window_gamma{};  // ||delta^2 gamma||_{l^p_eps(J)} per window
};

/// Ghost-force seminorm of the gamma-blended energy and, when the shape has
/// an L^p second derivative, the per-transition upper bound.
GhostSeminorm ghost_seminorm(const BlendFunction& gamma, double p);

struct CouplingSeminorm {
  double value = 0.0;  // eps ||delta beta_xi y''_xi||_{l^p_eps}
  double bound = 0.0;  // eps^(1+1/p) k^(1/p-1) C ||y''||_{l^inf(I)}; NaN if undefined
};

CouplingSeminorm coupling_seminorm(const Eigen::ArrayXd& beta, const Deformation& y,
                                   double p);
/// Overload that also evaluates the window bound from the blend geometry.
CouplingSeminorm coupling_seminorm(const BlendFunction& blend,
                                   const Eigen::ArrayXd& beta, const Deformation& y,
                                   double p);

}  // namespace bqclab
