#include "bqclab/blend.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace bqclab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

int wrap(int i, int n) { return ((i % n) + n) % n; }

// 16-point Gauss-Legendre nodes/weights on [0,1].
constexpr std::array<double, 16> kGaussNodes = {
    0.0052995325041750337, 0.0277124884633837102, 0.0671843988060841224,
    0.1222977958224984868, 0.1910618777986781147, 0.2709916111713863151,
    0.3591982246103705422, 0.4524937450811812866, 0.5475062549188187134,
    0.6408017753896294578, 0.7290083888286136849, 0.8089381222013218853,
    0.8777022041775015132, 0.9328156011939158776, 0.9722875115366162898,
    0.9947004674958249663};
constexpr std::array<double, 16> kGaussWeights = {
    0.0135762297058770482, 0.0311267619693239468, 0.0475792558412463928,
    0.0623144856277669384, 0.0747979944082883680, 0.0845782596975012679,
    0.0913017075224617918, 0.0947253052275342510, 0.0947253052275342510,
    0.0913017075224617918, 0.0845782596975012679, 0.0747979944082883680,
    0.0623144856277669384, 0.0475792558412463928, 0.0311267619693239468,
    0.0135762297058770482};

}  // namespace

BlendShape::BlendShape(Kind kind, std::vector<double> coefficients,
                       std::string name)
    : kind_(kind), coefficients_(std::move(coefficients)), name_(std::move(name)) {
  validate();
}

BlendShape BlendShape::characteristic() {
  return BlendShape(Kind::characteristic, {}, "characteristic");
}

BlendShape BlendShape::linear() {
  return BlendShape(Kind::linear, {0.0, 1.0}, "linear");
}

BlendShape BlendShape::cubic() {
  return BlendShape(Kind::cubic, {0.0, 0.0, 3.0, -2.0}, "cubic");
}

BlendShape BlendShape::quintic() {
  return BlendShape(Kind::quintic, {0.0, 0.0, 0.0, 10.0, -15.0, 6.0}, "quintic");
}

BlendShape BlendShape::custom(std::vector<double> coefficients) {
  return BlendShape(Kind::custom, std::move(coefficients), "custom");
}

double BlendShape::polynomial(int derivative_order, double x) const {
  const int n = static_cast<int>(coefficients_.size());
  double acc = 0.0;
  for (int i = n - 1; i >= derivative_order; --i) {
    double c = coefficients_[i];
    for (int d = 0; d < derivative_order; ++d) c *= (i - d);
    acc = acc * x + c;
  }
  return acc;
}

double BlendShape::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (kind_ == Kind::characteristic) return 0.0;
  return polynomial(0, x);
}

double BlendShape::derivative(double x) const {
  if (kind_ == Kind::characteristic) {
    throw std::logic_error("BlendShape: characteristic shape has no derivative");
  }
  if (x < 0.0 || x > 1.0) return 0.0;
  return polynomial(1, x);
}

double BlendShape::second_derivative(double x) const {
  if (kind_ == Kind::characteristic) {
    throw std::logic_error("BlendShape: characteristic shape has no derivative");
  }
  if (x < 0.0 || x > 1.0) return 0.0;
  return polynomial(2, x);
}

bool BlendShape::endpoint_slopes_vanish() const {
  if (kind_ == Kind::characteristic || kind_ == Kind::linear) return false;
  return std::abs(polynomial(1, 0.0)) <= 1e-12 &&
         std::abs(polynomial(1, 1.0)) <= 1e-12;
}

namespace {

double lp_norm_on_unit_interval(const std::function<double(double)>& f, double p) {
  const int cells = 64;
  if (std::isinf(p)) {
    double m = 0.0;
    const int samples = 1 << 16;
    for (int i = 0; i <= samples; ++i) {
      m = std::max(m, std::abs(f(static_cast<double>(i) / samples)));
    }
    return m;
  }
  double acc = 0.0;
  const double h = 1.0 / cells;
  for (int c = 0; c < cells; ++c) {
    for (int q = 0; q < 16; ++q) {
      const double x = (c + kGaussNodes[q]) * h;
      acc += kGaussWeights[q] * h * std::pow(std::abs(f(x)), p);
    }
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace

double BlendShape::derivative_lp_norm(double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("BlendShape: p must be >= 1");
  if (kind_ == Kind::characteristic) {
    throw std::logic_error("BlendShape: characteristic shape has no derivative");
  }
  return lp_norm_on_unit_interval([this](double x) { return polynomial(1, x); }, p);
}

double BlendShape::second_derivative_lp_norm(double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("BlendShape: p must be >= 1");
  if (kind_ == Kind::characteristic) {
    throw std::logic_error("BlendShape: characteristic shape has no derivative");
  }
  return lp_norm_on_unit_interval([this](double x) { return polynomial(2, x); }, p);
}

void BlendShape::validate() const {
  if (kind_ == Kind::characteristic) return;
  if (coefficients_.empty()) {
    throw std::invalid_argument("BlendShape: empty coefficient list");
  }
  if (std::abs(polynomial(0, 0.0)) > 1e-12 ||
      std::abs(polynomial(0, 1.0) - 1.0) > 1e-12) {
    throw std::invalid_argument("BlendShape: shape must map 0 to 0 and 1 to 1");
  }
  const int samples = 4096;
  double prev = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double v = polynomial(0, static_cast<double>(i) / samples);
    if (v < prev - 1e-12) {
      throw std::invalid_argument("BlendShape: shape must be nondecreasing on [0,1]");
    }
    prev = std::max(prev, v);
  }
  if ((kind_ == Kind::cubic || kind_ == Kind::quintic) && !endpoint_slopes_vanish()) {
    throw std::logic_error("BlendShape: smooth shapes must have flat endpoints");
  }
}

BlendShape optimal_shape() { return BlendShape::cubic(); }

BlendFunction BlendFunction::complemented() const {
  BlendFunction out = *this;
  out.values = 1.0 - values;
  std::swap(out.atomistic_sites, out.continuum_sites);
  return out;
}

BlendFunction build_blend(const LatticeConfig& config, const BlendShape& shape,
                          int atomistic_center, int atomistic_width, int k) {
  const int n = config.n_atoms;
  if (atomistic_width < 1 || k < 1) {
    throw std::invalid_argument("build_blend: width and k must be positive");
  }
  if (atomistic_width + 2 * k + 4 > n) {
    throw std::invalid_argument(
        "build_blend: atomistic_width + 2k + 4 exceeds the period");
  }

  BlendFunction out{config, Eigen::ArrayXd::Ones(n), shape, k};
  out.degenerate = (k == 1);

  // Atomistic plateau [first, last] (cyclic), then a down window ending at
  // `first` and an up window starting at `last`.
  const int first = atomistic_center - (atomistic_width - 1) / 2;
  const int last = first + atomistic_width - 1;

  for (int s = first; s <= last; ++s) out.values[wrap(s, n)] = 0.0;
  out.atomistic_sites.reserve(atomistic_width);
  for (int s = first; s <= last; ++s) out.atomistic_sites.push_back(wrap(s, n));

  for (int j = 0; j <= k; ++j) {
    const int up = wrap(last + j, n);
    const int down = wrap(first - j, n);
    const double v = shape(static_cast<double>(j) / k);
    out.values[up] = v;
    out.values[down] = v;
    out.window_up.push_back(up);
    out.window_down.push_back(down);
  }
  out.interface_sites = out.window_down;
  out.interface_sites.insert(out.interface_sites.end(), out.window_up.begin(),
                             out.window_up.end());

  for (int s = 0; s < n; ++s) {
    if (out.values[s] == 1.0) out.continuum_sites.push_back(s);
  }
  // The windows must not collide: the continuum plateau needs >= 2 sites.
  if (static_cast<int>(out.continuum_sites.size()) < 2) {
    throw std::invalid_argument("build_blend: transitions leave no continuum plateau");
  }
  return out;
}

std::pair<Eigen::ArrayXd, Eigen::ArrayXd> bqce_weights(const Eigen::ArrayXd& gamma) {
  const int n = static_cast<int>(gamma.size());
  Eigen::ArrayXd alpha(n);
  Eigen::ArrayXd beta(n);
  for (int i = 0; i < n; ++i) {
    alpha[i] = 0.5 * (gamma[i] + gamma[wrap(i - 1, n)]);
    beta[i] = 1.0 - 0.5 * (gamma[wrap(i + 1, n)] + gamma[wrap(i - 1, n)]);
  }
  return {std::move(alpha), std::move(beta)};
}

std::pair<Eigen::ArrayXd, Eigen::ArrayXd> bqnl_weights(const Eigen::ArrayXd& eta) {
  const int n = static_cast<int>(eta.size());
  Eigen::ArrayXd alpha(n);
  for (int i = 0; i < n; ++i) {
    alpha[i] = 1.0 - 0.5 * (eta[i] + eta[wrap(i - 1, n)]);
  }
  return {std::move(alpha), eta};
}

GhostSeminorm ghost_seminorm(const BlendFunction& gamma, double p) {
  GhostSeminorm out;
  const Eigen::ArrayXd alpha = bqce_weights(gamma.values).first;
  const Eigen::ArrayXd d2_alpha = second_difference(alpha);
  const Eigen::ArrayXd d2_gamma = second_difference(gamma.values);
  out.value = lp_norm(d2_alpha, p);
  out.window_alpha = {lp_norm(d2_alpha, p, gamma.window_down),
                      lp_norm(d2_alpha, p, gamma.window_up)};
  out.window_gamma = {lp_norm(d2_gamma, p, gamma.window_down),
                      lp_norm(d2_gamma, p, gamma.window_up)};
  const double k = gamma.transition_width;
  if (gamma.shape.kind() != BlendShape::Kind::characteristic &&
      gamma.shape.endpoint_slopes_vanish()) {
    const double eps = gamma.config.spacing();
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    out.per_transition_bound = std::pow(eps, inv_p) * std::pow(k, inv_p - 2.0) *
                               gamma.shape.second_derivative_lp_norm(p);
  } else {
    out.per_transition_bound = kNan;
  }
  return out;
}

CouplingSeminorm coupling_seminorm(const Eigen::ArrayXd& beta, const Deformation& y,
                                   double p) {
  CouplingSeminorm out;
  const double eps = y.config().spacing();
  out.value = eps * lp_norm(difference(beta) * y.curvatures(), p);
  out.bound = kNan;
  return out;
}

CouplingSeminorm coupling_seminorm(const BlendFunction& blend,
                                   const Eigen::ArrayXd& beta, const Deformation& y,
                                   double p) {
  CouplingSeminorm out = coupling_seminorm(beta, y, p);
  if (blend.shape.kind() == BlendShape::Kind::characteristic) return out;
  const int n = blend.config.n_atoms;
  const double eps = y.config().spacing();
  const double k = blend.transition_width;
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  // The averaged weights spread the transition one site past each window,
  // so the curvature sup is taken over the interface padded by one site;
  // the 2^(1/p) accounts for the two disjoint transitions.
  std::vector<int> padded = blend.interface_sites;
  padded.push_back(wrap(blend.window_up.front() - 1, n));
  padded.push_back(wrap(blend.window_up.back() + 1, n));
  padded.push_back(wrap(blend.window_down.front() + 1, n));
  padded.push_back(wrap(blend.window_down.back() - 1, n));
  const double curvature_sup = lp_norm(y.curvatures(), kInf, padded);
  out.bound = std::pow(2.0, inv_p) * std::pow(eps, 1.0 + inv_p) *
              std::pow(k, inv_p - 1.0) * blend.shape.derivative_lp_norm(p) *
              curvature_sup;
  return out;
}

}  // namespace bqclab
