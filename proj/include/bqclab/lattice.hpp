#pragma once

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <vector>

namespace bqclab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Periodic chain of N atoms with reference spacing eps = 1/N.
/// Storing N alone keeps the two exactly consistent.
struct LatticeConfig {
  int n_atoms;

  explicit LatticeConfig(int n) : n_atoms(n) {
    if (n < 5) {
      throw std::invalid_argument(
          "LatticeConfig: need at least 5 atoms for the widest stencil");
    }
  }

  double spacing() const { return 1.0 / n_atoms; }

  friend bool operator==(const LatticeConfig& a, const LatticeConfig& b) {
    return a.n_atoms == b.n_atoms;
  }
};

/// N-periodic, mean-zero site displacements. The constructor rejects inputs
/// whose mean exceeds the drift tolerance 1e-12 * N * max|u| and removes the
/// remainder exactly; use projected() to fold an arbitrary profile onto the
/// mean-zero subspace.
class Displacement {
 public:
  Displacement() = default;
  explicit Displacement(Eigen::ArrayXd values);

  static Displacement zero(int n) {
    return Displacement(Eigen::ArrayXd::Zero(n));
  }
  /// Subtracts the mean unconditionally (no drift check).
  static Displacement projected(Eigen::ArrayXd values);

  const Eigen::ArrayXd& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  Eigen::ArrayXd values_;
};

/// Deformation y_xi = F * eps * xi + u_xi of the periodic chain. Only the
/// macroscopic strain F and the periodic displacement u are stored; positions
/// and difference quotients are reconstructed on demand.
class Deformation {
 public:
  Deformation(LatticeConfig config, double macroscopic_strain,
              Displacement displacement);

  static Deformation uniform(LatticeConfig config, double strain) {
    return Deformation(config, strain, Displacement::zero(config.n_atoms));
  }

  const LatticeConfig& config() const { return config_; }
  double macroscopic_strain() const { return strain_; }
  const Displacement& displacement() const { return displacement_; }

  Eigen::ArrayXd positions() const;

  /// y'_xi = (y_xi - y_{xi-1}) / eps; constant F for the uniform state.
  Eigen::ArrayXd strains() const;
  /// y''_xi = (y_{xi+1} - 2 y_xi + y_{xi-1}) / eps^2.
  Eigen::ArrayXd curvatures() const;
  /// y'''_xi = (y_{xi+1} - 3 y_xi + 3 y_{xi-1} - y_{xi-2}) / eps^3.
  Eigen::ArrayXd third_derivatives() const;

  double min_strain() const { return strains().minCoeff(); }
  bool admissible() const { return min_strain() > 0.0; }

  /// Same displacement under a different macroscopic strain (warm starts).
  Deformation with_strain(double strain) const {
    return Deformation(config_, strain, displacement_);
  }

 private:
  LatticeConfig config_;
  double strain_;
  Displacement displacement_;
};

// Periodic sequence operators. All wrap indices modulo the length.
Eigen::ArrayXd cyclic_shift(const Eigen::ArrayXd& s, int offset);
/// sbar_xi = (s_xi + s_{xi-1}) / 2.
Eigen::ArrayXd site_mean(const Eigen::ArrayXd& s);
/// (delta s)_xi = s_xi - s_{xi-1}.
Eigen::ArrayXd difference(const Eigen::ArrayXd& s);
/// (delta^2 s)_xi = s_{xi+1} - 2 s_xi + s_{xi-1}.
Eigen::ArrayXd second_difference(const Eigen::ArrayXd& s);

/// Scaled lattice norm (eps * sum |s|^p)^(1/p) with eps = 1/len(s);
/// p = inf gives the plain max. The subset overload restricts the sum.
double lp_norm(const Eigen::ArrayXd& s, double p);
double lp_norm(const Eigen::ArrayXd& s, double p, const std::vector<int>& subset);

/// Linear functional g(u) = eps * sum T_xi u'_xi on mean-zero displacements.
/// T is defined up to an additive constant; the canonical representative is
/// mean-zero.
class DualFunctional {
 public:
  DualFunctional() = default;
  explicit DualFunctional(Eigen::ArrayXd strain_rep);

  const Eigen::ArrayXd& strain_rep() const { return strain_rep_; }
  int size() const { return static_cast<int>(strain_rep_.size()); }

  /// Pairing with the displacement u (site values).
  double apply(const Eigen::ArrayXd& u) const;

  friend DualFunctional operator-(const DualFunctional& a,
                                  const DualFunctional& b) {
    return DualFunctional(a.strain_rep_ - b.strain_rep_);
  }

 private:
  Eigen::ArrayXd strain_rep_;
};

/// Negative-order dual norm: min over constants c of ||T - c||_{l^p_eps}.
/// Closed form for p = 2 (subtract the mean) and p = inf (half the spread);
/// golden-section search in c otherwise.
double dual_norm(const DualFunctional& g, double p);

/// Converts site values f (sum f = 0 required) to the strain representation,
/// i.e. the T with eps * sum T_xi u'_xi = eps * sum f_xi u_xi for mean-zero u.
DualFunctional forces_to_dual(const Eigen::ArrayXd& f);
Eigen::ArrayXd dual_to_forces(const DualFunctional& g);

/// Mean-zero displacement with prescribed strain sequence w (sum w = 0).
Displacement integrate_strain(const Eigen::ArrayXd& w);

}  // namespace bqclab
