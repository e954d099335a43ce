#pragma once

#include "bqclab/energy.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bqclab {

/// Fixed external force field paired against displacements; an element of
/// the mean-zero space, like the displacements it acts on.
class DeadLoad {
 public:
  explicit DeadLoad(Eigen::ArrayXd site_values);

  static DeadLoad zero(int n) { return DeadLoad(Eigen::ArrayXd::Zero(n)); }
  /// Projects an arbitrary sampled profile onto the mean-zero subspace.
  static DeadLoad projected(Eigen::ArrayXd raw);

  const Eigen::ArrayXd& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  DualFunctional as_dual() const { return forces_to_dual(values_); }

 private:
  Eigen::ArrayXd values_;
};

struct SolveOptions {
  double newton_tol = 1e-10;  // residual dual-norm target
  int max_iter = 50;
  int continuation_steps = 1;
  /// Backtracking keeps min y' above this; NaN resolves to r*/2.
  double admissibility_floor = std::numeric_limits<double>::quiet_NaN();
  int max_backtracks = 20;
  bool report_coercivity = true;
};

struct SolveReport {
  int iterations = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double final_coercivity = std::numeric_limits<double>::quiet_NaN();
  int indefinite_steps = 0;  // iterates where the Hessian needed shifting
  int total_backtracks = 0;
  bool converged = false;
  std::vector<double> residual_history;
};

/// Thrown when the Newton iteration cannot reach the residual target.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, SolveReport report)
      : std::runtime_error(what), report(std::move(report)) {}
  SolveReport report;
};

/// Projected Newton for the equilibrium condition
///   dPhi(y)[u] = <f, u>  for all mean-zero u,
/// starting from y0. Steps solve the Hessian system on the mean-zero strain
/// subspace; indefinite iterates fall back to eigenvalue-shifted steps, and
/// steps are halved (up to max_backtracks) until the iterate stays admissible
/// and the residual decreases.
std::pair<Deformation, SolveReport> equilibrate(const EnergyModel& m,
                                                const DeadLoad& f,
                                                const Deformation& y0,
                                                const SolveOptions& opts = {});

struct ContinuationPoint {
  double strain;
  Deformation state;
  SolveReport report;
};

struct ContinuationResult {
  std::vector<ContinuationPoint> points;
  /// Index of the first strain that failed (no convergence, inadmissible, or
  /// nonpositive coercivity at the solution); empty when the path completes.
  std::optional<int> failure_index;
};

/// Warm-started equilibria along a path of macroscopic strains under a fixed
/// dead load. Stops at the first failure, a practical proxy for loss of
/// stability.
ContinuationResult continuation(const EnergyModel& m, const DeadLoad& f,
                                const std::vector<double>& strain_path,
                                const SolveOptions& opts = {});

}  // namespace bqclab
