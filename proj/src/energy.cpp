#include "bqclab/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace bqclab {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

void require_admissible(const Eigen::ArrayXd& strains, const char* op) {
  if (!(strains.minCoeff() > 0.0)) {
    throw std::domain_error(std::string(op) + ": nonpositive strain");
  }
}

bool all_zero(const Eigen::ArrayXd& v) { return (v == 0.0).all(); }
bool all_one(const Eigen::ArrayXd& v) { return (v == 1.0).all(); }
bool indicator(const Eigen::ArrayXd& v) {
  return ((v == 0.0) || (v == 1.0)).all();
}

}  // namespace

std::string to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::atomistic: return "atomistic";
    case ModelTag::cauchy_born: return "cauchy_born";
    case ModelTag::qce: return "qce";
    case ModelTag::qnl: return "qnl";
    case ModelTag::bqce: return "bqce";
    case ModelTag::bqnl: return "bqnl";
    case ModelTag::custom_bqc: return "custom_bqc";
  }
  return "unknown";
}

EnergyModel::EnergyModel(Potential pot, LatticeConfig config,
                         Eigen::ArrayXd alpha, Eigen::ArrayXd beta, ModelTag tag,
                         std::optional<BlendFunction> provenance)
    : potential_(std::move(pot)), config_(config), alpha_(std::move(alpha)),
      beta_(std::move(beta)), tag_(tag), provenance_(std::move(provenance)) {
  validate();
}

void EnergyModel::validate() const {
  const int n = config_.n_atoms;
  if (alpha_.size() != n || beta_.size() != n) {
    throw std::invalid_argument("EnergyModel: weight arrays must have length N");
  }
  if ((alpha_ < 0.0).any() || (alpha_ > 1.0).any() || (beta_ < 0.0).any() ||
      (beta_ > 1.0).any()) {
    throw std::invalid_argument("EnergyModel: weights must lie in [0,1]");
  }
  if (tag_ == ModelTag::atomistic && !(all_zero(alpha_) && all_one(beta_))) {
    throw std::logic_error("EnergyModel: atomistic tag requires alpha=0, beta=1");
  }
  if (tag_ == ModelTag::cauchy_born && !(all_one(alpha_) && all_zero(beta_))) {
    throw std::logic_error("EnergyModel: cauchy_born tag requires alpha=1, beta=0");
  }
  if (tag_ == ModelTag::bqnl || tag_ == ModelTag::qnl) {
    // Bond-blended weights satisfy mean(beta)_xi + alpha_xi = 1 site by site;
    // this is what kills the zero-order term of the modeling error.
    const Eigen::ArrayXd residue = site_mean(beta_) + alpha_ - 1.0;
    if (residue.abs().maxCoeff() > 1e-14) {
      throw std::logic_error("EnergyModel: bond-blend weight identity violated");
    }
  }
}

EnergyModel EnergyModel::atomistic(Potential pot, LatticeConfig config) {
  const int n = config.n_atoms;
  return EnergyModel(std::move(pot), config, Eigen::ArrayXd::Zero(n),
                     Eigen::ArrayXd::Ones(n), ModelTag::atomistic, std::nullopt);
}

EnergyModel EnergyModel::cauchy_born(Potential pot, LatticeConfig config) {
  const int n = config.n_atoms;
  return EnergyModel(std::move(pot), config, Eigen::ArrayXd::Ones(n),
                     Eigen::ArrayXd::Zero(n), ModelTag::cauchy_born, std::nullopt);
}

EnergyModel EnergyModel::bqce(Potential pot, BlendFunction gamma) {
  auto [alpha, beta] = bqce_weights(gamma.values);
  const ModelTag tag = indicator(gamma.values) ? ModelTag::qce : ModelTag::bqce;
  return EnergyModel(std::move(pot), gamma.config, std::move(alpha),
                     std::move(beta), tag, std::move(gamma));
}

EnergyModel EnergyModel::bqnl(Potential pot, BlendFunction gamma_layout) {
  BlendFunction eta = gamma_layout.complemented();
  auto [alpha, beta] = bqnl_weights(eta.values);
  const ModelTag tag = indicator(eta.values) ? ModelTag::qnl : ModelTag::bqnl;
  return EnergyModel(std::move(pot), eta.config, std::move(alpha), std::move(beta),
                     tag, std::move(eta));
}

EnergyModel EnergyModel::from_bond_weights(Potential pot, LatticeConfig config,
                                           Eigen::ArrayXd eta) {
  if (eta.size() != config.n_atoms) {
    throw std::invalid_argument("EnergyModel: eta must have length N");
  }
  const ModelTag tag = indicator(eta) ? ModelTag::qnl : ModelTag::bqnl;
  auto [alpha, beta] = bqnl_weights(eta);
  return EnergyModel(std::move(pot), config, std::move(alpha), std::move(beta),
                     tag, std::nullopt);
}

EnergyModel EnergyModel::from_site_weights(Potential pot, LatticeConfig config,
                                           Eigen::ArrayXd alpha,
                                           Eigen::ArrayXd beta) {
  return EnergyModel(std::move(pot), config, std::move(alpha), std::move(beta),
                     ModelTag::custom_bqc, std::nullopt);
}

double value(const EnergyModel& m, const Deformation& y) {
  const Eigen::ArrayXd w = y.strains();
  require_admissible(w, "value");
  const int n = m.config().n_atoms;
  const double eps = m.config().spacing();
  const Potential& pot = m.potential();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += pot(w[i]) + m.alpha()[i] * pot(2.0 * w[i]) +
           m.beta()[i] * pot(w[i] + w[wrap(i + 1, n)]);
  }
  return eps * acc;
}

DualFunctional first_variation(const EnergyModel& m, const Deformation& y) {
  const Eigen::ArrayXd w = y.strains();
  require_admissible(w, "first_variation");
  const int n = m.config().n_atoms;
  const Potential& pot = m.potential();
  Eigen::ArrayXd t(n);
  for (int i = 0; i < n; ++i) {
    const int prev = wrap(i - 1, n);
    const int next = wrap(i + 1, n);
    t[i] = pot.derivative(1, w[i]) +
           2.0 * m.alpha()[i] * pot.derivative(1, 2.0 * w[i]) +
           m.beta()[prev] * pot.derivative(1, w[prev] + w[i]) +
           m.beta()[i] * pot.derivative(1, w[i] + w[next]);
  }
  return DualFunctional(std::move(t));
}

HessianCoefficients second_variation(const EnergyModel& m, const Deformation& y) {
  const Eigen::ArrayXd w = y.strains();
  require_admissible(w, "second_variation");
  const int n = m.config().n_atoms;
  const Potential& pot = m.potential();
  HessianCoefficients h{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  for (int i = 0; i < n; ++i) {
    const int prev = wrap(i - 1, n);
    const int next = wrap(i + 1, n);
    const double bond_next = pot.derivative(2, w[i] + w[next]);
    const double bond_prev = pot.derivative(2, w[prev] + w[i]);
    h.a_bar[i] = pot.derivative(2, w[i]) +
                 4.0 * (0.5 * m.beta()[i] * bond_next +
                        0.5 * m.beta()[prev] * bond_prev +
                        m.alpha()[i] * pot.derivative(2, 2.0 * w[i]));
    h.b_bar[i] = -m.beta()[i] * bond_next;
  }
  return h;
}

double quadratic_form(const HessianCoefficients& h, const Eigen::ArrayXd& u) {
  const int n = static_cast<int>(u.size());
  const double eps = 1.0 / static_cast<double>(n);
  const Eigen::ArrayXd du = difference(u) / eps;           // u'
  const Eigen::ArrayXd ddu = second_difference(u) / (eps * eps);  // u''
  return eps * (h.a_bar * du.square()).sum() +
         eps * eps * eps * (h.b_bar * ddu.square()).sum();
}

HessianCoefficients atomistic_hessian_coefficients(const Potential& pot,
                                                   const Deformation& y) {
  const Eigen::ArrayXd w = y.strains();
  require_admissible(w, "atomistic_hessian_coefficients");
  const int n = y.config().n_atoms;
  HessianCoefficients h{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  for (int i = 0; i < n; ++i) {
    const int prev = wrap(i - 1, n);
    const int next = wrap(i + 1, n);
    const double bond_next = pot.derivative(2, w[i] + w[next]);
    const double bond_prev = pot.derivative(2, w[prev] + w[i]);
    h.a_bar[i] = pot.derivative(2, w[i]) + 2.0 * (bond_next + bond_prev);
    h.b_bar[i] = -bond_next;
  }
  return h;
}

CoefficientGap hessian_coeff_gap(const EnergyModel& m, const Deformation& y) {
  const Eigen::ArrayXd w = y.strains();
  const double r_min = 2.0 * w.minCoeff();
  if (!(r_min >= m.potential().inflection())) {
    throw std::domain_error("hessian_coeff_gap: requires min strain >= r*/2");
  }
  const int n = m.config().n_atoms;
  const double eps = m.config().spacing();
  const Potential& pot = m.potential();

  const HessianCoefficients model = second_variation(m, y);
  const HessianCoefficients full = atomistic_hessian_coefficients(pot, y);
  const double gap = (model.a_bar - full.a_bar).abs().maxCoeff();

  const double c2 = pot.envelope(2, r_min);
  const double c3 = pot.envelope(3, r_min);
  const double c4 = pot.envelope(4, r_min);

  const Eigen::ArrayXd curv = y.curvatures();
  const Eigen::ArrayXd third = y.third_derivatives();
  const Eigen::ArrayXd one_minus_beta = 1.0 - m.beta();
  Eigen::ArrayXd beta_prev(n);
  for (int i = 0; i < n; ++i) beta_prev[i] = m.beta()[wrap(i - 1, n)];

  double bound = 2.0 * eps * c3 * (difference(m.beta()) * curv).abs().maxCoeff() +
                 2.0 * eps * eps *
                     (c3 * ((1.0 - beta_prev) * third).abs().maxCoeff() +
                      c4 * (one_minus_beta * curv.square()).abs().maxCoeff());
  const bool beta_consistent =
      m.tag() == ModelTag::bqnl || m.tag() == ModelTag::qnl ||
      m.tag() == ModelTag::atomistic || m.tag() == ModelTag::cauchy_born;
  if (!beta_consistent) {
    const Eigen::ArrayXd d2_alpha = second_difference(m.alpha());
    bound += 2.0 * c2 * d2_alpha.abs().maxCoeff();
  }
  return {gap, bound};
}

}  // namespace bqclab
