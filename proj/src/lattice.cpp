#include "bqclab/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace bqclab {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

double max_abs(const Eigen::ArrayXd& v) {
  return v.size() == 0 ? 0.0 : v.abs().maxCoeff();
}

}  // namespace

Displacement::Displacement(Eigen::ArrayXd values) : values_(std::move(values)) {
  const auto n = values_.size();
  if (n == 0) return;
  const double sum = values_.sum();
  const double tol = 1e-12 * static_cast<double>(n) * max_abs(values_);
  if (std::abs(sum) > tol) {
    throw std::invalid_argument("Displacement: site values are not mean-zero");
  }
  values_ -= values_.mean();
}

Displacement Displacement::projected(Eigen::ArrayXd values) {
  values -= values.mean();
  return Displacement(std::move(values));
}

Deformation::Deformation(LatticeConfig config, double macroscopic_strain,
                         Displacement displacement)
    : config_(config), strain_(macroscopic_strain),
      displacement_(std::move(displacement)) {
  if (!(strain_ > 0.0)) {
    throw std::invalid_argument("Deformation: macroscopic strain must be positive");
  }
  if (displacement_.size() != config_.n_atoms) {
    throw std::invalid_argument("Deformation: displacement size does not match lattice");
  }
}

Eigen::ArrayXd Deformation::positions() const {
  const int n = config_.n_atoms;
  const double eps = config_.spacing();
  Eigen::ArrayXd y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = strain_ * eps * (i + 1) + displacement_.values()[i];
  }
  return y;
}

Eigen::ArrayXd Deformation::strains() const {
  // The uniform part contributes the constant F; only the periodic
  // displacement goes through the difference stencil.
  const double eps = config_.spacing();
  return strain_ + difference(displacement_.values()) / eps;
}

Eigen::ArrayXd Deformation::curvatures() const {
  const double eps = config_.spacing();
  return second_difference(displacement_.values()) / (eps * eps);
}

Eigen::ArrayXd Deformation::third_derivatives() const {
  const int n = config_.n_atoms;
  const double eps = config_.spacing();
  const Eigen::ArrayXd& u = displacement_.values();
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = (u[wrap(i + 1, n)] - 3.0 * u[i] + 3.0 * u[wrap(i - 1, n)] -
              u[wrap(i - 2, n)]) /
             (eps * eps * eps);
  }
  return out;
}

Eigen::ArrayXd cyclic_shift(const Eigen::ArrayXd& s, int offset) {
  const int n = static_cast<int>(s.size());
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) out[wrap(i + offset, n)] = s[i];
  return out;
}

Eigen::ArrayXd site_mean(const Eigen::ArrayXd& s) {
  const int n = static_cast<int>(s.size());
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) out[i] = 0.5 * (s[i] + s[wrap(i - 1, n)]);
  return out;
}

Eigen::ArrayXd difference(const Eigen::ArrayXd& s) {
  const int n = static_cast<int>(s.size());
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) out[i] = s[i] - s[wrap(i - 1, n)];
  return out;
}

Eigen::ArrayXd second_difference(const Eigen::ArrayXd& s) {
  const int n = static_cast<int>(s.size());
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = s[wrap(i + 1, n)] - 2.0 * s[i] + s[wrap(i - 1, n)];
  }
  return out;
}

double lp_norm(const Eigen::ArrayXd& s, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return max_abs(s);
  const double eps = 1.0 / static_cast<double>(s.size());
  if (p == 2.0) return std::sqrt(eps * s.square().sum());
  if (p == 1.0) return eps * s.abs().sum();
  return std::pow(eps * s.abs().pow(p).sum(), 1.0 / p);
}

double lp_norm(const Eigen::ArrayXd& s, double p, const std::vector<int>& subset) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const int n = static_cast<int>(s.size());
  if (std::isinf(p)) {
    double m = 0.0;
    for (int i : subset) m = std::max(m, std::abs(s[wrap(i, n)]));
    return m;
  }
  const double eps = 1.0 / static_cast<double>(n);
  double acc = 0.0;
  for (int i : subset) acc += std::pow(std::abs(s[wrap(i, n)]), p);
  return std::pow(eps * acc, 1.0 / p);
}

DualFunctional::DualFunctional(Eigen::ArrayXd strain_rep)
    : strain_rep_(std::move(strain_rep)) {
  strain_rep_ -= strain_rep_.mean();
}

double DualFunctional::apply(const Eigen::ArrayXd& u) const {
  // eps * sum T_xi (u_xi - u_{xi-1}) / eps = sum T_xi * (delta u)_xi
  return (strain_rep_ * difference(u)).sum();
}

namespace {

// Golden-section minimization of the convex map c -> ||T - c||_{l^p_eps}.
double offset_minimum(const Eigen::ArrayXd& t, double p) {
  double lo = t.minCoeff();
  double hi = t.maxCoeff();
  const double spread = hi - lo;
  if (spread == 0.0) return 0.0;
  const double tol = 1e-12 * spread;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double c) { return lp_norm(t - c, p); };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

}  // namespace

double dual_norm(const DualFunctional& g, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("dual_norm: p must be >= 1");
  const Eigen::ArrayXd& t = g.strain_rep();
  if (std::isinf(p)) return 0.5 * (t.maxCoeff() - t.minCoeff());
  if (p == 2.0) return lp_norm(t, 2.0);  // already mean-zero
  return offset_minimum(t, p);
}

DualFunctional forces_to_dual(const Eigen::ArrayXd& f) {
  const int n = static_cast<int>(f.size());
  const double eps = 1.0 / static_cast<double>(n);
  const double sum = f.sum();
  if (std::abs(sum) > 1e-10 * n * (f.size() ? f.abs().maxCoeff() : 0.0)) {
    throw std::invalid_argument("forces_to_dual: site forces must sum to zero");
  }
  Eigen::ArrayXd t(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    t[i] = acc;
    acc -= eps * f[i];
  }
  return DualFunctional(std::move(t));
}

Eigen::ArrayXd dual_to_forces(const DualFunctional& g) {
  const Eigen::ArrayXd& t = g.strain_rep();
  const int n = static_cast<int>(t.size());
  const double eps = 1.0 / static_cast<double>(n);
  Eigen::ArrayXd f(n);
  for (int i = 0; i < n; ++i) f[i] = (t[i] - t[wrap(i + 1, n)]) / eps;
  return f;
}

Displacement integrate_strain(const Eigen::ArrayXd& w) {
  const int n = static_cast<int>(w.size());
  const double eps = 1.0 / static_cast<double>(n);
  Eigen::ArrayXd u(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += eps * w[i];
    u[i] = acc;
  }
  return Displacement::projected(std::move(u));
}

}  // namespace bqclab
