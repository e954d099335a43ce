#include "bqclab/blend.hpp"

#include "bqclab/experiments.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bqclab;

TEST_CASE("shape endpoint and slope conditions") {
  const BlendShape cubic = BlendShape::cubic();
  CHECK(cubic(0.0) == 0.0);
  CHECK(cubic(1.0) == 1.0);
  CHECK(cubic(-0.5) == 0.0);
  CHECK(cubic(2.0) == 1.0);
  CHECK(cubic.derivative(0.0) == 0.0);
  CHECK(cubic.derivative(1.0) == 0.0);
  CHECK(cubic.endpoint_slopes_vanish());

  const BlendShape quintic = BlendShape::quintic();
  CHECK(quintic.derivative(0.0) == 0.0);
  CHECK(quintic.derivative(1.0) == 0.0);
  CHECK(quintic.second_derivative(0.0) == 0.0);
  CHECK(quintic.second_derivative(1.0) == 0.0);

  CHECK_FALSE(BlendShape::linear().endpoint_slopes_vanish());
  CHECK_THROWS_AS(BlendShape::custom({0.0, 2.0}), std::invalid_argument);
}

TEST_CASE("cubic second-derivative norm is sqrt(12)") {
  const BlendShape cubic = BlendShape::cubic();
  CHECK(cubic.second_derivative_lp_norm(2.0) ==
        doctest::Approx(std::sqrt(12.0)).epsilon(1e-10));
  CHECK(cubic.second_derivative_lp_norm(1.0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(cubic.second_derivative_lp_norm(kInf) == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("cubic minimizes the L2 bending norm among admissible shapes") {
  const double best = BlendShape::cubic().second_derivative_lp_norm(2.0);
  CHECK(BlendShape::quintic().second_derivative_lp_norm(2.0) > best);

  // Random admissible smooth shapes: cubic + a bump polynomial
  // x^2 (1-x)^2 (a + b x) keeps g(0)=0, g(1)=1, g'(0)=g'(1)=0.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  int admissible = 0;
  while (admissible < 20) {
    const double a = uniform(rng);
    const double b = uniform(rng);
    if (a == 0.0 && b == 0.0) continue;
    std::vector<double> c(6, 0.0);
    c[2] = 3.0 + a;
    c[3] = -2.0 + b - 2.0 * a;
    c[4] = a - 2.0 * b;
    c[5] = b;
    try {
      const BlendShape shape = BlendShape::custom(c);
      ++admissible;
      CHECK(shape.second_derivative_lp_norm(2.0) >= best * (1.0 - 1e-12));
    } catch (const std::invalid_argument&) {
      continue;  // nonmonotone draw; try another
    }
  }
  CHECK(optimal_shape().name() == "cubic");
}

TEST_CASE("blend layout samples the shape over both windows") {
  const LatticeConfig config(32);
  const BlendFunction blend = build_blend(config, BlendShape::cubic(), 16, 8, 4);

  CHECK(blend.window_up.size() == 5);
  CHECK(blend.window_down.size() == 5);
  const double expected[] = {0.0, 5.0 / 32.0, 0.5, 27.0 / 32.0, 1.0};
  for (int j = 0; j <= 4; ++j) {
    CHECK(blend.values[blend.window_up[j]] ==
          doctest::Approx(expected[j]).epsilon(1e-15));
    CHECK(blend.values[blend.window_down[j]] ==
          doctest::Approx(expected[j]).epsilon(1e-15));
  }
  for (int site : blend.atomistic_sites) CHECK(blend.values[site] == 0.0);
  for (int site : blend.continuum_sites) CHECK(blend.values[site] == 1.0);
  CHECK((blend.values >= 0.0).all());
  CHECK((blend.values <= 1.0).all());
}

TEST_CASE("characteristic shape yields an indicator blend") {
  const LatticeConfig config(40);
  for (int k : {2, 5}) {
    const BlendFunction blend =
        build_blend(config, BlendShape::characteristic(), 20, 8, k);
    CHECK(((blend.values == 0.0) || (blend.values == 1.0)).all());
  }
}

TEST_CASE("degenerate single-step transition is flagged, not rejected") {
  const LatticeConfig config(32);
  const BlendFunction blend = build_blend(config, BlendShape::cubic(), 16, 8, 1);
  CHECK(blend.degenerate);
  for (int site : blend.window_up) {
    CHECK((blend.values[site] == 0.0 || blend.values[site] == 1.0));
  }
}

TEST_CASE("geometry that does not fit the period is rejected") {
  const LatticeConfig config(100);
  CHECK_THROWS_AS(build_blend(config, BlendShape::cubic(), 50, 8, 64),
                  std::invalid_argument);
}

TEST_CASE("site weight identities") {
  const int n = 24;

  SUBCASE("constant blends give the pure models") {
    auto [alpha1, beta1] = bqce_weights(Eigen::ArrayXd::Ones(n));
    CHECK((alpha1 == 1.0).all());
    CHECK((beta1 == 0.0).all());
    auto [alpha0, beta0] = bqce_weights(Eigen::ArrayXd::Zero(n));
    CHECK((alpha0 == 0.0).all());
    CHECK((beta0 == 1.0).all());

    auto [alpha_a, beta_a] = bqnl_weights(Eigen::ArrayXd::Ones(n));
    CHECK((alpha_a == 0.0).all());
    CHECK((beta_a == 1.0).all());
    auto [alpha_c, beta_c] = bqnl_weights(Eigen::ArrayXd::Zero(n));
    CHECK((alpha_c == 1.0).all());
    CHECK((beta_c == 0.0).all());
  }

  SUBCASE("bond-blend weights satisfy mean(beta) + alpha = 1") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::ArrayXd eta(n);
    for (int i = 0; i < n; ++i) eta[i] = uniform(rng);
    auto [alpha, beta] = bqnl_weights(eta);
    const Eigen::ArrayXd residue = site_mean(beta) + alpha - 1.0;
    CHECK(residue.abs().maxCoeff() <= 1e-15);
  }

  SUBCASE("density-blend weight defect is a second difference") {
    // 4 (mean(beta) + alpha - 1) = -2 delta^2 alpha for any gamma; this is
    // what turns the zero-order modeling term into the ghost force.
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::ArrayXd gamma(n);
    for (int i = 0; i < n; ++i) gamma[i] = uniform(rng);
    auto [alpha, beta] = bqce_weights(gamma);
    const Eigen::ArrayXd lhs = 4.0 * (site_mean(beta) + alpha - 1.0);
    const Eigen::ArrayXd rhs = -2.0 * second_difference(alpha);
    CHECK((lhs - rhs).abs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("linear shape gives the exact window seminorm") {
  const LatticeConfig config(256);
  const double eps = config.spacing();
  for (int k : {2, 3, 8, 16, 61}) {
    const BlendFunction blend =
        build_blend(config, BlendShape::linear(), 128, 32, k);
    for (double p : {1.0, 2.0, 4.0}) {
      const Eigen::ArrayXd d2 = second_difference(blend.values);
      const double window = lp_norm(d2, p, blend.window_up);
      const double exact = std::pow(2.0, 1.0 / p) * std::pow(eps, 1.0 / p) / k;
      CHECK(window == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("ghost seminorm respects the transition bound chain") {
  const LatticeConfig config(512);
  for (const BlendShape& shape : {BlendShape::cubic(), BlendShape::quintic()}) {
    for (int k : {2, 4, 8, 16, 32, 64}) {
      const BlendFunction blend = build_blend(config, shape, 256, 64, k);
      for (double p : {1.0, 2.0, kInf}) {
        const GhostSeminorm ghost = ghost_seminorm(blend, p);
        const Eigen::ArrayXd d2_gamma = second_difference(blend.values);
        const double gamma_window_sum =
            lp_norm(d2_gamma, p, blend.window_down) +
            lp_norm(d2_gamma, p, blend.window_up);
        // ||d2 alpha|| <= ||d2 gamma|| (windows) <= 2x per-transition bound.
        CHECK(ghost.value <= gamma_window_sum * (1.0 + 1e-12));
        CHECK(gamma_window_sum <= 2.0 * ghost.per_transition_bound * (1.0 + 1e-12));
        CHECK(ghost.window_alpha[0] <= ghost.per_transition_bound * (1.0 + 1e-12));
        CHECK(ghost.window_alpha[1] <= ghost.per_transition_bound * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("constant blend has zero ghost seminorm") {
  const LatticeConfig config(64);
  BlendFunction blend = build_blend(config, BlendShape::cubic(), 32, 8, 4);
  blend.values = Eigen::ArrayXd::Constant(64, 0.5);
  CHECK(ghost_seminorm(blend, 2.0).value == 0.0);
}

TEST_CASE("ghost seminorm decay rates over k = 4..64") {
  const LatticeConfig config(1024);
  auto slope_for = [&](const BlendShape& shape) {
    std::vector<std::pair<double, double>> points;
    for (int k = 4; k <= 64; ++k) {
      const BlendFunction blend = build_blend(config, shape, 512, 64, k);
      points.emplace_back(k, ghost_seminorm(blend, 2.0).value);
    }
    return fit_rate(points).slope;
  };
  for (const BlendShape& smooth : {BlendShape::cubic(), BlendShape::quintic()}) {
    const double slope = slope_for(smooth);
    CHECK(slope >= -1.6);
    CHECK(slope <= -1.4);
  }
  const double linear_slope = slope_for(BlendShape::linear());
  CHECK(linear_slope >= -1.05);
  CHECK(linear_slope <= -0.95);
}

TEST_CASE("doubling k for the cubic shape drops the p=2 seminorm by ~2^1.5") {
  const LatticeConfig config(1024);
  std::vector<double> values;
  for (int k : {8, 16, 32, 64}) {
    const BlendFunction blend = build_blend(config, BlendShape::cubic(), 512, 64, k);
    values.push_back(ghost_seminorm(blend, 2.0).value);
  }
  // The per-doubling ratio approaches -1.5 from above with an O(1/k) bias.
  std::vector<double> ratios;
  for (std::size_t i = 1; i < values.size(); ++i) {
    ratios.push_back(std::log2(values[i] / values[i - 1]));
  }
  CHECK(std::abs(ratios.back() + 1.5) <= 0.05);
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    CHECK(std::abs(ratios[i] + 1.5) <= std::abs(ratios[i - 1] + 1.5) + 1e-9);
  }
}

TEST_CASE("sharpness: window seminorm approaches the bound as k grows") {
  const LatticeConfig config(2048);
  double last_ratio = 0.0;
  for (int k : {8, 16, 32, 64}) {
    const BlendFunction blend = build_blend(config, BlendShape::cubic(), 1024, 64, k);
    const GhostSeminorm ghost = ghost_seminorm(blend, 2.0);
    const double ratio = ghost.window_alpha[1] / ghost.per_transition_bound;
    CHECK(ratio <= 1.0 + 1e-12);
    CHECK(ratio >= last_ratio - 0.02);
    last_ratio = ratio;
  }
  CHECK(last_ratio >= 0.95);  // within 5% by k = 64
}

TEST_CASE("mirrored layout gives identical window seminorms") {
  const LatticeConfig config(256);
  const BlendFunction blend = build_blend(config, BlendShape::quintic(), 64, 16, 8);
  const GhostSeminorm ghost = ghost_seminorm(blend, 2.0);
  CHECK(ghost.window_alpha[0] == doctest::Approx(ghost.window_alpha[1]).epsilon(1e-12));
  CHECK(ghost.window_gamma[0] == doctest::Approx(ghost.window_gamma[1]).epsilon(1e-12));
}

TEST_CASE("coupling seminorm vanishes for uniform states and constant weights") {
  const LatticeConfig config(128);
  const BlendFunction blend = build_blend(config, BlendShape::cubic(), 64, 16, 8);
  const Eigen::ArrayXd beta = bqce_weights(blend.values).second;

  const Deformation uniform = Deformation::uniform(config, 1.05);
  CHECK(coupling_seminorm(beta, uniform, 2.0).value == 0.0);

  const Deformation wiggly = random_smooth_state(config, 1.05, 99);
  CHECK(coupling_seminorm(Eigen::ArrayXd::Constant(128, 0.3), wiggly, 2.0).value ==
        doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("coupling seminorm k-scaling at p=2") {
  const LatticeConfig config(1024);
  const Deformation y = random_smooth_state(config, 1.0, 31, 0.04, 4);
  std::vector<std::pair<double, double>> points;
  for (int k : {8, 16, 32, 64}) {
    const BlendFunction blend = build_blend(config, BlendShape::cubic(), 512, 64, k);
    const Eigen::ArrayXd beta = bqce_weights(blend.values).second;
    const CouplingSeminorm coupling = coupling_seminorm(blend, beta, y, 2.0);
    CHECK(coupling.value <= coupling.bound * (1.0 + 1e-12));
    points.emplace_back(k, coupling.value);
  }
  CHECK(fit_rate(points).slope == doctest::Approx(-0.5).epsilon(0.2));
}
