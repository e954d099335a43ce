#include "bqclab/stability.hpp"

#include "bqclab/experiments.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bqclab;

TEST_CASE("local model coercivity at a uniform state is exactly A_F") {
  const LatticeConfig config(32);
  const Potential pot = Potential::lennard_jones();
  const EnergyModel local = EnergyModel::cauchy_born(pot, config);
  for (double f : {1.0, 1.05, 1.09}) {
    const double a_f = pot.derivative(2, f) + 4.0 * pot.derivative(2, 2.0 * f);
    const StabilityReport report =
        coercivity(local, Deformation::uniform(config, f));
    CHECK(report.coercivity == doctest::Approx(a_f).epsilon(1e-12));
    CHECK(report.a_underline == doctest::Approx(a_f).epsilon(1e-13));
  }
}

TEST_CASE("atomistic coercivity at a uniform state sits in the Fourier bracket") {
  const LatticeConfig config(64);
  const Potential pot = Potential::lennard_jones();
  const EnergyModel atom = EnergyModel::atomistic(pot, config);
  const double f = 1.05;  // 2F past the inflection point: phi''(2F) < 0
  REQUIRE(pot.derivative(2, 2.0 * f) < 0.0);
  const double a_f = pot.derivative(2, f) + 4.0 * pot.derivative(2, 2.0 * f);
  const double c = coercivity_value(atom, Deformation::uniform(config, f));
  const double eps = config.spacing();
  CHECK(c >= a_f - 1e-12);
  CHECK(c - a_f <= 8.0 * std::numbers::pi * std::numbers::pi * eps * eps *
                       std::abs(pot.derivative(2, 2.0 * f)));
  // The smallest circulant mode is A_F + 4 sin^2(pi/N) |phi''(2F)|.
  const double exact =
      a_f + 4.0 * std::pow(std::sin(std::numbers::pi / 64.0), 2) *
                std::abs(pot.derivative(2, 2.0 * f));
  CHECK(c == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("reported mode attains the coercivity and is normalized") {
  const LatticeConfig config(48);
  const Potential pot = Potential::morse(4.0);
  const BlendFunction blend = build_blend(config, BlendShape::cubic(), 24, 8, 4);
  const EnergyModel model = EnergyModel::bqce(pot, blend);
  const Deformation y = random_smooth_state(config, 1.02, 3, 0.05);
  const StabilityReport report = coercivity(model, y);

  CHECK(lp_norm(report.minimizing_strain_mode, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(report.minimizing_strain_mode.sum()) <= 1e-9);

  // Quadratic form at the mode equals the reported coercivity.
  const Displacement u = integrate_strain(report.minimizing_strain_mode);
  const double form = quadratic_form(second_variation(model, y), u.values());
  CHECK(form == doctest::Approx(report.coercivity).epsilon(1e-10));
}

TEST_CASE("eigen residual of the reported mode") {
  const LatticeConfig config(40);
  const Potential pot = Potential::lennard_jones();
  const EnergyModel atom = EnergyModel::atomistic(pot, config);
  const Deformation y = random_smooth_state(config, 1.0, 9, 0.05);
  const StabilityReport report = coercivity(atom, y);

  // Assemble K w - c w and project out the mean; the mode solves the
  // eigenproblem on the mean-zero subspace.
  const HessianCoefficients h = second_variation(atom, y);
  const int n = config.n_atoms;
  Eigen::ArrayXd kw(n);
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    const int next = (i + 1) % n;
    const Eigen::ArrayXd& w = report.minimizing_strain_mode;
    kw[i] = h.a_bar[i] * w[i] + h.b_bar[i] * (w[i] - w[next]) +
            h.b_bar[prev] * (w[i] - w[prev]);
  }
  Eigen::ArrayXd residual = kw - report.coercivity * report.minimizing_strain_mode;
  residual -= residual.mean();
  const double w_norm = std::sqrt(report.minimizing_strain_mode.square().sum());
  CHECK(std::sqrt(residual.square().sum()) <= 1e-9 * w_norm * h.a_bar.abs().maxCoeff());
}

TEST_CASE("brute-force sampling cannot beat the eigensolver") {
  const int n = 12;
  const LatticeConfig config(n);
  const Potential pot = Potential::lennard_jones();
  const EnergyModel atom = EnergyModel::atomistic(pot, config);
  // Small perturbation keeps the coefficient spread narrow enough that
  // random unit vectors can probe within a few percent of the bottom.
  const Deformation y = random_smooth_state(config, 1.0, 77, 0.002);
  const double c = coercivity_value(atom, y);
  const HessianCoefficients h = second_variation(atom, y);

  double sampled_min = kInf;
  for (int trial = 0; trial < 100000; ++trial) {
    Eigen::ArrayXd w = testing::random_mean_zero(n, 30000 + trial);
    const double norm = lp_norm(w, 2.0);
    if (norm < 1e-12) continue;
    w /= norm;
    const Displacement u = integrate_strain(w);
    const double ratio = quadratic_form(h, u.values());
    CHECK(ratio >= c - 1e-9);
    sampled_min = std::min(sampled_min, ratio);
  }
  CHECK(sampled_min >= c);
  CHECK(sampled_min - c <= 0.05 * std::abs(c));
}

TEST_CASE("a priori bound: uniform states") {
  const LatticeConfig config(64);
  const Potential pot = Potential::lennard_jones();
  const double f = 1.05;
  const Deformation y = Deformation::uniform(config, f);
  const double a_f = pot.derivative(2, f) + 4.0 * pot.derivative(2, 2.0 * f);
  const BlendFunction blend = build_blend(config, BlendShape::cubic(), 32, 12, 6);

  SUBCASE("bond-blended model: bound equals A_F and holds") {
    const EnergyModel model = EnergyModel::bqnl(pot, blend);
    const double bound = a_priori_stability_bound(model, y);
    CHECK(bound == doctest::Approx(a_f).epsilon(1e-12));
    CHECK(coercivity_value(model, y) >= bound - 1e-12);
  }

  SUBCASE("density-blended model: bound loses the ghost term") {
    const EnergyModel model = EnergyModel::bqce(pot, blend);
    const double c2 = pot.envelope(2, 2.0 * f);
    const double expected =
        a_f - 2.0 * c2 * second_difference(model.alpha()).abs().maxCoeff();
    CHECK(a_priori_stability_bound(model, y) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(coercivity_value(model, y) >= a_priori_stability_bound(model, y) - 1e-12);
  }

  SUBCASE("precondition") {
    const EnergyModel model = EnergyModel::bqce(pot, blend);
    CHECK_THROWS_AS(a_priori_stability_bound(model, Deformation::uniform(config, 0.5)),
                    std::domain_error);
  }
}

TEST_CASE("stability bounds hold on random smooth states") {
  const LatticeConfig config(64);
  for (const Potential& pot : {Potential::lennard_jones(), Potential::morse(4.0)}) {
    const BlendFunction blend = build_blend(config, BlendShape::cubic(), 32, 12, 5);
    const EnergyModel atom = EnergyModel::atomistic(pot, config);
    const std::vector<EnergyModel> models = {EnergyModel::bqce(pot, blend),
                                             EnergyModel::bqnl(pot, blend)};
    for (int trial = 0; trial < 50; ++trial) {
      const Deformation y = random_smooth_state(config, 1.0, 6000 + trial, 0.05);
      REQUIRE(2.0 * y.min_strain() >= pot.inflection());
      for (const EnergyModel& m : models) {
        const double c_model = coercivity_value(m, y);
        CHECK(c_model >= a_priori_stability_bound(m, y) - 1e-10);
        const double c_atom = coercivity_value(atom, y);
        CHECK(c_atom >= a_posteriori_stability_bound(m, y) - 1e-10);
      }
    }
  }
}

TEST_CASE("coercivity report carries both bounds") {
  const LatticeConfig config(32);
  const Potential pot = Potential::lennard_jones();
  const BlendFunction blend = build_blend(config, BlendShape::cubic(), 16, 6, 3);
  const EnergyModel model = EnergyModel::bqnl(pot, blend);
  const Deformation y = Deformation::uniform(config, 1.0);
  const StabilityReport report = coercivity(model, y);
  CHECK(report.coercivity >= report.bound_a_priori - 1e-12);
  CHECK(report.bound_a_posteriori ==
        doctest::Approx(report.coercivity).epsilon(1e-12));  // corrections vanish

  const Deformation squeezed = Deformation::uniform(config, 0.52);
  const StabilityReport shallow = coercivity(model, squeezed);
  CHECK(std::isnan(shallow.bound_a_priori));
}

TEST_CASE("critical strain of the local model matches the scalar root") {
  const LatticeConfig config(128);
  for (const Potential& pot : {Potential::lennard_jones(), Potential::morse(4.0)}) {
    const EnergyModel local = EnergyModel::cauchy_born(pot, config);
    const double by_eigen = critical_strain(local, 1.0, 1.5, 1e-10);
    const double by_scalar = cauchy_born_critical_strain(pot, 1.0, 1.5, 1e-10);
    CHECK(std::abs(by_eigen - by_scalar) <= 2e-10);
    // Root bracket sanity: A_F changes sign across the result.
    const double a_lo = pot.derivative(2, by_scalar - 1e-6) +
                        4.0 * pot.derivative(2, 2.0 * (by_scalar - 1e-6));
    const double a_hi = pot.derivative(2, by_scalar + 1e-6) +
                        4.0 * pot.derivative(2, 2.0 * (by_scalar + 1e-6));
    CHECK(a_lo > 0.0);
    CHECK(a_hi < 0.0);
  }
}

TEST_CASE("bond-blended critical strain has no blending error") {
  const LatticeConfig config(128);
  const Potential pot = Potential::lennard_jones();
  const BlendFunction blend = build_blend(config, BlendShape::cubic(), 64, 16, 8);
  const EnergyModel model = EnergyModel::bqnl(pot, blend);
  const double tol = 1e-8;
  const double f_star = critical_strain(model, 1.0, 1.5, tol);
  const double f_star_local = cauchy_born_critical_strain(pot, 1.0, 1.5, tol);
  CHECK(std::abs(f_star - f_star_local) <= 2.0 * tol);
  CHECK(f_star >= f_star_local - tol);
}

TEST_CASE("density-blended critical strain error decays like k^-2") {
  // The decay toward k^-2 is asymptotic: the per-doubling ratio is about
  // -1.32 at k = 4->8 and only reaches the k^-2 window past k = 8, for
  // every potential and admissible shape (the error scale is set entirely
  // by phi''(2F*), so the ratios are universal). Fit where the asymptote
  // is visible, and separately pin the universal small-k ratio.
  const LatticeConfig config(512);
  const Potential pot = Potential::lennard_jones();
  const double tol = 1e-9;
  const double f_star_local = cauchy_born_critical_strain(pot, 1.0, 1.5, tol);
  std::vector<std::pair<double, double>> points;
  for (int k : {4, 8, 16, 32, 64}) {
    const BlendFunction blend = build_blend(config, BlendShape::cubic(), 256, 48, k);
    const EnergyModel model = EnergyModel::bqce(pot, blend);
    const double f_star = critical_strain(model, 1.0, 1.5, tol);
    points.emplace_back(k, std::abs(f_star - f_star_local));
  }
  const std::vector<std::pair<double, double>> tail(points.begin() + 1,
                                                    points.end());
  const RateFit fit = fit_rate(tail);
  CHECK(fit.slope >= -2.3);
  CHECK(fit.slope <= -1.7);
  CHECK(std::log2(points[1].second / points[0].second) ==
        doctest::Approx(-1.32).epsilon(0.02));
}

TEST_CASE("critical strain requires a bracket") {
  const LatticeConfig config(32);
  const Potential pot = Potential::lennard_jones();
  const EnergyModel local = EnergyModel::cauchy_born(pot, config);
  CHECK_THROWS_AS(critical_strain(local, 1.0, 1.05, 1e-8), std::invalid_argument);
}

TEST_CASE("critical strain is monotone under tolerance refinement") {
  const LatticeConfig config(64);
  const Potential pot = Potential::morse(4.0);
  const EnergyModel local = EnergyModel::cauchy_born(pot, config);
  const double coarse = critical_strain(local, 1.0, 1.5, 1e-4);
  const double fine = critical_strain(local, 1.0, 1.5, 1e-10);
  CHECK(std::abs(coarse - fine) <= 1e-4);
}

TEST_CASE("dense cap is enforced") {
  const LatticeConfig config(64);
  const Potential pot = Potential::lennard_jones();
  const EnergyModel atom = EnergyModel::atomistic(pot, config);
  CHECK_THROWS_AS(coercivity_value(atom, Deformation::uniform(config, 1.0), 32),
                  std::invalid_argument);
}
