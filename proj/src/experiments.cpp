#include "bqclab/experiments.hpp"

#include "bqclab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace bqclab {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

int resolve_threads(int requested, int count) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("BQCLAB_THREADS")) {
      t = std::atoi(env);
    }
  }
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  if (t <= 0) t = 1;
  return std::clamp(t, 1, std::max(count, 1));
}

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  const int workers = resolve_threads(threads, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex mutex;
  std::exception_ptr first_error;
  std::atomic<int> next{0};
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& xy) {
  if (xy.size() < 3) {
    throw std::invalid_argument("fit_rate: need at least 3 points");
  }
  RateFit fit;
  fit.points.reserve(xy.size());
  for (const auto& [x, y] : xy) {
    if (!(x > 0.0) || !(y > 0.0)) {
      throw std::invalid_argument("fit_rate: points must be positive");
    }
    fit.points.emplace_back(std::log(x), std::log(y));
  }
  const double n = static_cast<double>(fit.points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double var_x = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  const double cov = sxy - sx * sy / n;
  fit.slope = var_x > 0.0 ? cov / var_x : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r_squared = (var_x > 0.0 && var_y > 0.0)
                      ? std::clamp(cov * cov / (var_x * var_y), 0.0, 1.0)
                      : 1.0;
  return fit;
}

DeadLoad sample_load(const LoadProfile& profile, const LatticeConfig& config) {
  const int n = config.n_atoms;
  const double eps = config.spacing();
  const double x0 = std::isnan(profile.bump_center) ? 0.5 : profile.bump_center;
  Eigen::ArrayXd f(n);
  for (int i = 0; i < n; ++i) {
    const double x = eps * (i + 1);
    const double d = x - x0;
    f[i] = profile.sine_amplitude * std::sin(2.0 * std::numbers::pi * x) +
           profile.bump_amplitude *
               std::exp(-d * d / (2.0 * profile.bump_width * profile.bump_width));
  }
  return DeadLoad::projected(std::move(f));
}

Deformation random_smooth_state(const LatticeConfig& config, double strain,
                                std::uint64_t seed, double relative_amplitude,
                                int modes) {
  const int n = config.n_atoms;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::ArrayXd w = Eigen::ArrayXd::Zero(n);
  for (int m = 1; m <= modes; ++m) {
    const double c = gauss(rng) / (m * m);
    const double s = gauss(rng) / (m * m);
    for (int i = 0; i < n; ++i) {
      const double phase = 2.0 * std::numbers::pi * m * (i + 1) / n;
      w[i] += c * std::cos(phase) + s * std::sin(phase);
    }
  }
  const double sup = w.abs().maxCoeff();
  if (sup > 0.0) w *= relative_amplitude * strain / sup;
  w -= w.mean();
  return Deformation(config, strain, integrate_strain(w));
}

ModelingErrorAudit modeling_error_audit(const EnergyModel& m, const Deformation& y,
                                        double p) {
  const EnergyModel reference = EnergyModel::atomistic(m.potential(), m.config());
  ModelingErrorAudit audit;
  audit.lhs = dual_norm(first_variation(reference, y) - first_variation(m, y), p);

  const int n = m.config().n_atoms;
  const double eps = m.config().spacing();
  const double r_min = 2.0 * y.min_strain();
  const Potential& pot = m.potential();
  const double c1 = pot.envelope(1, r_min);
  const double c2 = pot.envelope(2, r_min);
  const double c3 = pot.envelope(3, r_min);

  const Eigen::ArrayXd curv = y.curvatures();
  const Eigen::ArrayXd third = y.third_derivatives();
  Eigen::ArrayXd beta_prev(n);
  for (int i = 0; i < n; ++i) beta_prev[i] = m.beta()[wrap(i - 1, n)];

  switch (m.tag()) {
    case ModelTag::bqce:
    case ModelTag::qce:
      audit.parts.ghost = c1 * lp_norm(second_difference(m.alpha()), p);
      break;
    case ModelTag::custom_bqc:
      audit.parts.ghost =
          c1 * lp_norm(2.0 * (1.0 - m.alpha() - site_mean(m.beta())), p);
      break;
    default:
      audit.parts.ghost = 0.0;  // bond-consistent weights
  }
  audit.parts.coupling = eps * c2 * lp_norm(difference(m.beta()) * curv, p);
  audit.parts.cauchy_born =
      eps * eps *
      (c2 * lp_norm((1.0 - beta_prev) * third, p) +
       c3 * lp_norm((1.0 - m.beta()) * curv.square(), p));
  audit.rhs = audit.parts.ghost + audit.parts.coupling + audit.parts.cauchy_born;
  return audit;
}

namespace {

EnergyModel blended_model(const SweepSpec& spec, const BlendFunction& blend) {
  switch (spec.model) {
    case ModelTag::bqce:
    case ModelTag::qce:
      return EnergyModel::bqce(spec.potential, blend);
    case ModelTag::bqnl:
    case ModelTag::qnl:
      return EnergyModel::bqnl(spec.potential, blend);
    default:
      throw std::invalid_argument("sweep: model must be a blended family");
  }
}

struct Geometry {
  int center;
  int width;
};

Geometry resolve_geometry(const SweepSpec& spec, int n) {
  Geometry g;
  g.center = spec.atomistic_center >= 0 ? spec.atomistic_center : n / 2;
  g.width = spec.atomistic_width >= 0 ? spec.atomistic_width : std::max(n / 8, 4);
  return g;
}

LoadProfile resolve_load(const SweepSpec& spec, const LatticeConfig& config,
                         int center) {
  LoadProfile load = spec.load;
  if (std::isnan(load.bump_center)) {
    load.bump_center = config.spacing() * center;
  }
  return load;
}

}  // namespace

StudyResult convergence_study(const SweepSpec& spec) {
  StudyResult result;
  result.table.columns = {"n",         "shape_index", "k",
                          "error",     "error_bound", "a_underline",
                          "delta1_lhs", "delta2_lhs", "ghost_part",
                          "coupling_part", "cauchy_born_part", "iterations"};

  for (int n : spec.n_list) {
    const LatticeConfig config(n);
    const Geometry geom = resolve_geometry(spec, n);
    const LoadProfile load_profile = resolve_load(spec, config, geom.center);
    const DeadLoad load = sample_load(load_profile, config);
    const Deformation start = Deformation::uniform(config, spec.strain);

    const EnergyModel reference_model =
        EnergyModel::atomistic(spec.potential, config);
    Deformation reference = start;
    try {
      reference = equilibrate(reference_model, load, start, spec.solver).first;
    } catch (const SolveError& e) {
      result.error = std::string("reference solve failed: ") + e.what();
      return result;
    }
    const double a_underline =
        atomistic_hessian_coefficients(spec.potential, reference)
            .a_bar.minCoeff();
    if (!(a_underline > 0.0)) {
      result.error = "reference state is not elastic (min A_xi <= 0)";
      return result;
    }

    for (std::size_t shape_index = 0; shape_index < spec.shapes.size();
         ++shape_index) {
      const BlendShape& shape = spec.shapes[shape_index];
      const int n_k = static_cast<int>(spec.k_list.size());
      std::vector<std::optional<std::vector<double>>> rows(n_k);
      std::vector<std::optional<std::string>> errors(n_k);

      parallel_for(n_k, spec.threads, [&](int idx) {
        const int k = spec.k_list[idx];
        try {
          const BlendFunction blend =
              build_blend(config, shape, geom.center, geom.width, k);
          const EnergyModel model = blended_model(spec, blend);
          auto [solution, report] = equilibrate(model, load, start, spec.solver);
          const double error =
              lp_norm(reference.strains() - solution.strains(), 2.0);
          const ModelingErrorAudit audit =
              modeling_error_audit(model, reference, 2.0);
          const double delta1 = hessian_coeff_gap(model, reference).bound;
          const double eps = config.spacing();
          const double delta2 = audit.rhs / std::sqrt(eps);
          rows[idx] = {static_cast<double>(n),
                       static_cast<double>(shape_index),
                       static_cast<double>(k),
                       error,
                       4.0 / a_underline * audit.rhs,
                       a_underline,
                       delta1,
                       delta2,
                       audit.parts.ghost,
                       audit.parts.coupling,
                       audit.parts.cauchy_born,
                       static_cast<double>(report.iterations)};
        } catch (const std::exception& e) {
          errors[idx] = e.what();
        }
      });

      for (int idx = 0; idx < n_k; ++idx) {
        if (errors[idx]) {
          result.error = "sweep aborted at k = " +
                         std::to_string(spec.k_list[idx]) + ": " + *errors[idx];
          return result;
        }
        result.table.rows.push_back(std::move(*rows[idx]));
      }
    }
  }

  std::vector<std::pair<double, double>> points;
  for (const auto& row : result.table.rows) {
    if (row[0] == spec.n_list.front() && row[1] == 0.0 && row[3] > 0.0) {
      points.emplace_back(row[2], row[3]);
    }
  }
  if (points.size() >= 3) {
    result.fit = fit_rate(points);
    result.fit_valid = true;
  }
  return result;
}

StudyResult critical_strain_study(const SweepSpec& spec) {
  StudyResult result;
  result.table.columns = {"n", "shape_index", "k", "f_star", "f_star_local",
                          "abs_error"};

  for (int n : spec.n_list) {
    const LatticeConfig config(n);
    const Geometry geom = resolve_geometry(spec, n);
    const double f_star_local = cauchy_born_critical_strain(
        spec.potential, spec.f_lo, spec.f_hi, spec.bisect_tol);

    for (std::size_t shape_index = 0; shape_index < spec.shapes.size();
         ++shape_index) {
      const BlendShape& shape = spec.shapes[shape_index];
      const int n_k = static_cast<int>(spec.k_list.size());
      std::vector<std::optional<std::vector<double>>> rows(n_k);
      std::vector<std::optional<std::string>> errors(n_k);

      parallel_for(n_k, spec.threads, [&](int idx) {
        const int k = spec.k_list[idx];
        try {
          const BlendFunction blend =
              build_blend(config, shape, geom.center, geom.width, k);
          const EnergyModel model = blended_model(spec, blend);
          const double f_star =
              critical_strain(model, spec.f_lo, spec.f_hi, spec.bisect_tol);
          rows[idx] = {static_cast<double>(n), static_cast<double>(shape_index),
                       static_cast<double>(k), f_star, f_star_local,
                       std::abs(f_star - f_star_local)};
        } catch (const std::exception& e) {
          errors[idx] = e.what();
        }
      });

      for (int idx = 0; idx < n_k; ++idx) {
        if (errors[idx]) {
          result.error = "sweep aborted at k = " +
                         std::to_string(spec.k_list[idx]) + ": " + *errors[idx];
          return result;
        }
        result.table.rows.push_back(std::move(*rows[idx]));
      }
    }
  }

  std::vector<std::pair<double, double>> points;
  for (const auto& row : result.table.rows) {
    if (row[0] == spec.n_list.front() && row[1] == 0.0 && row[5] > 0.0) {
      points.emplace_back(row[2], row[5]);
    }
  }
  if (points.size() >= 3) {
    result.fit = fit_rate(points);
    result.fit_valid = true;
  }
  return result;
}

}  // namespace bqclab
