#pragma once

#include "bqclab/blend.hpp"
#include "bqclab/energy.hpp"
#include "bqclab/solve.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bqclab {

/// Least-squares line through (log x, log y).
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (log x, log y)
};

/// Requires >= 3 points with positive coordinates.
RateFit fit_rate(const std::vector<std::pair<double, double>>& xy);

/// Canonical test load: a global sine plus a localized Gaussian bump,
/// f(x) = sine_amplitude * sin(2 pi x) + bump_amplitude * exp(-(x-x0)^2 / 2w^2),
/// sampled at the reference sites and projected to mean zero. bump_center is
/// a position in [0,1]; NaN lets callers substitute the atomistic center.
struct LoadProfile {
  double sine_amplitude = 0.1;
  double bump_amplitude = 1.0;
  double bump_width = 0.05;
  double bump_center = std::numeric_limits<double>::quiet_NaN();
};

DeadLoad sample_load(const LoadProfile& profile, const LatticeConfig& config);

/// Deterministic smooth random state: a low-frequency Fourier strain
/// perturbation of the uniform state, scaled so that
/// |y' - F| <= relative_amplitude * F everywhere.
Deformation random_smooth_state(const LatticeConfig& config, double strain,
                                std::uint64_t seed,
                                double relative_amplitude = 0.05, int modes = 6);

struct ModelingErrorParts {
  double ghost = 0.0;
  double coupling = 0.0;
  double cauchy_born = 0.0;
};

struct ModelingErrorAudit {
  double lhs = 0.0;  // dual norm of the first-variation difference
  double rhs = 0.0;  // envelope bound, sum of the three parts
  ModelingErrorParts parts;
};

/// Compares the exact modeling error of `m` against the full atomistic model
/// at the state y with the envelope bound, split into its ghost-force,
/// coupling, and Cauchy-Born parts.
ModelingErrorAudit modeling_error_audit(const EnergyModel& m, const Deformation& y,
                                        double p);

/// Column-labelled numeric table; CSV serialization lives with the CLI.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SweepSpec {
  ModelTag model = ModelTag::bqce;  // bqce or bqnl
  Potential potential = Potential::lennard_jones();
  std::vector<int> n_list = {1024};
  std::vector<int> k_list = {4, 8, 16, 32};
  std::vector<BlendShape> shapes = {BlendShape::cubic()};
  double strain = 1.0;
  LoadProfile load;
  double p = 2.0;
  int atomistic_center = -1;  // -1: N/2
  int atomistic_width = -1;   // -1: N/8
  double f_lo = 1.0;
  double f_hi = 1.5;
  double bisect_tol = 1e-8;
  SolveOptions solver;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: BQCLAB_THREADS or hardware default
};

struct StudyResult {
  Table table;
  RateFit fit;       // over k at the first (n, shape); empty points when < 3 rows
  bool fit_valid = false;
  std::optional<std::string> error;  // set when the sweep aborted early
};

/// Solves the blended and fully atomistic equilibria under the same load for
/// every k and fits the strain-error decay against k. The reference solve
/// must be elastic (min atomistic A_xi > 0) or the study aborts.
StudyResult convergence_study(const SweepSpec& spec);

/// Tabulates the model's critical strain against the local model's over k
/// and fits the error decay.
StudyResult critical_strain_study(const SweepSpec& spec);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = resolve
/// from BQCLAB_THREADS, then hardware). Rethrows the first exception.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace bqclab
