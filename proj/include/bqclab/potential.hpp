#pragma once

#include <string>

namespace bqclab {

/// Pair interaction potential with closed-form derivatives up to fourth
/// order, a verified inflection point r* (convex below, concave above), and
/// the tail envelopes C_i(r0) = sup_{r >= r0} |phi^(i)(r)| used by all of the
/// modeling and stability bounds.
///
/// Both shipped families are normalized to well depth 1 with the minimum at
/// r = 1, so the chain's ground state sits near macroscopic strain F = 1.
class Potential {
 public:
  enum class Family { lennard_jones, morse };

  /// phi(r) = r^-12 - 2 r^-6.
  static Potential lennard_jones();
  /// phi(r) = exp(-2a(r-1)) - 2 exp(-a(r-1)).
  static Potential morse(double stiffness = 4.0);

  const std::string& name() const { return name_; }
  Family family() const { return family_; }
  double stiffness() const { return stiffness_; }

  double operator()(double r) const { return derivative(0, r); }
  /// order in 0..4; throws for r <= 0.
  double derivative(int order, double r) const;

  /// The strain r* with phi'' > 0 on (0, r*) and phi'' < 0 on (r*, inf).
  double inflection() const { return inflection_; }

  /// C_i(r0) for i in 1..4, from the family's critical-point analysis.
  double envelope(int order, double r0) const;

 private:
  Potential(Family family, double stiffness, std::string name);

  Family family_;
  double stiffness_;
  std::string name_;
  double inflection_;
};

/// Generic envelope fallback: dense log-grid sampling of |phi^(i)| on
/// [r0, 1000 r0] (1e4 points) inflated by a 1% safety factor. Used when no
/// critical-point analysis is available and as an audit of the closed forms.
double sampled_envelope(const Potential& pot, int order, double r0);

}  // namespace bqclab
