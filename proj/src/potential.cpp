#include "bqclab/potential.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace bqclab {

namespace {

// i-th derivative coefficients of r^-12 and -2 r^-6:
// phi^(i)(r) = kLj12[i] * r^(-12-i) + kLj6[i] * r^(-6-i).
constexpr std::array<double, 6> kLj12 = {1.0, -12.0, 156.0, -2184.0, 32760.0,
                                         -524160.0};
constexpr std::array<double, 6> kLj6 = {-2.0, 12.0, -84.0, 672.0, -6048.0,
                                        60480.0};

double bisect_inflection(const Potential& pot, double lo, double hi) {
  double flo = pot.derivative(2, lo);
  double fhi = pot.derivative(2, hi);
  if (!(flo > 0.0 && fhi < 0.0)) {
    throw std::logic_error("Potential: inflection bracket lost its sign change");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (pot.derivative(2, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Potential::Potential(Family family, double stiffness, std::string name)
    : family_(family), stiffness_(stiffness), name_(std::move(name)),
      inflection_(0.0) {
  const double lo = 1.0;
  const double hi =
      family_ == Family::lennard_jones ? 1.5 : 1.0 + 2.0 * std::log(2.0) / stiffness_;
  inflection_ = bisect_inflection(*this, lo, hi);
  if (std::abs(derivative(2, inflection_)) > 1e-10) {
    throw std::logic_error("Potential: inflection point failed verification");
  }
}

Potential Potential::lennard_jones() {
  return Potential(Family::lennard_jones, 0.0, "lj");
}

Potential Potential::morse(double stiffness) {
  if (!(stiffness > 0.0)) {
    throw std::invalid_argument("Potential::morse: stiffness must be positive");
  }
  return Potential(Family::morse, stiffness, "morse");
}

double Potential::derivative(int order, double r) const {
  if (order < 0 || order > 4) {
    throw std::invalid_argument("Potential::derivative: order must be in 0..4");
  }
  if (!(r > 0.0)) {
    throw std::domain_error("Potential::derivative: r must be positive");
  }
  if (family_ == Family::lennard_jones) {
    return kLj12[order] * std::pow(r, -12.0 - order) +
           kLj6[order] * std::pow(r, -6.0 - order);
  }
  const double a = stiffness_;
  const double t = std::exp(-a * (r - 1.0));  // in (0, e^a)
  const double sa = (order % 2 == 0) ? 1.0 : -1.0;
  return sa * std::pow(a, order) * (std::pow(2.0, order) * t * t - 2.0 * t);
}

double Potential::envelope(int order, double r0) const {
  if (order < 1 || order > 4) {
    throw std::invalid_argument("Potential::envelope: order must be in 1..4");
  }
  if (!(r0 > 0.0)) {
    throw std::domain_error("Potential::envelope: r0 must be positive");
  }
  if (family_ == Family::lennard_jones) {
    // phi^(i) has a single critical point r_c (root of phi^(i+1)) and decays
    // at infinity, so the sup over [r0, inf) is attained at r0 or r_c.
    const double ratio = -kLj12[order + 1] / kLj6[order + 1];
    const double rc = std::pow(ratio, 1.0 / 6.0);
    double sup = std::abs(derivative(order, r0));
    if (rc > r0) sup = std::max(sup, std::abs(derivative(order, rc)));
    return sup;
  }
  // Morse in t = exp(-a(r-1)): |phi^(i)| = a^i * |2^i t^2 - 2 t| with its
  // interior maximum a^i 2^-i at t = 2^-i.
  const double a = stiffness_;
  const double t0 = std::exp(-a * (r0 - 1.0));
  const double tc = std::pow(2.0, -order);
  const double scale = std::pow(a, order);
  double sup = scale * std::abs(std::pow(2.0, order) * t0 * t0 - 2.0 * t0);
  if (tc < t0) sup = std::max(sup, scale * tc);
  return sup;
}

double sampled_envelope(const Potential& pot, int order, double r0) {
  if (!(r0 > 0.0)) {
    throw std::domain_error("sampled_envelope: r0 must be positive");
  }
  const int n = 10000;
  const double ratio = std::log(1e3) / (n - 1);
  double sup = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = r0 * std::exp(ratio * i);
    sup = std::max(sup, std::abs(pot.derivative(order, r)));
  }
  return 1.01 * sup;
}

}  // namespace bqclab
