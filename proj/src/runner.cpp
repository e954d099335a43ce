#include "bqclab/runner.hpp"

#include "bqclab/stability.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bqclab {

namespace {

std::string format_value(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

struct Workspace {
  RunConfig config;
  Potential potential;
  LatticeConfig lattice;
  int center;
  int width;

  explicit Workspace(const RunConfig& c)
      : config(c), potential(make_potential(c)), lattice(c.n),
        center(c.atomistic_center >= 0 ? c.atomistic_center : c.n / 2),
        width(c.atomistic_width >= 0 ? c.atomistic_width
                                     : std::max(c.n / 8, 4)) {}

  BlendFunction blend(int k) const {
    return build_blend(lattice, make_shape(config), center, width, k);
  }

  EnergyModel model(int k) const {
    if (config.model == "atomistic") {
      return EnergyModel::atomistic(potential, lattice);
    }
    if (config.model == "cauchy_born") {
      return EnergyModel::cauchy_born(potential, lattice);
    }
    if (config.model == "qce") {
      return EnergyModel::bqce(potential,
                               build_blend(lattice, BlendShape::characteristic(),
                                           center, width, k));
    }
    if (config.model == "qnl") {
      return EnergyModel::bqnl(potential,
                               build_blend(lattice, BlendShape::characteristic(),
                                           center, width, k));
    }
    if (config.model == "bqce") return EnergyModel::bqce(potential, blend(k));
    return EnergyModel::bqnl(potential, blend(k));
  }

  LoadProfile load_profile() const {
    LoadProfile profile;
    profile.sine_amplitude = config.load_a;
    profile.bump_amplitude = config.load_b;
    profile.bump_width = config.load_w;
    profile.bump_center = std::isnan(config.load_x0)
                              ? lattice.spacing() * center
                              : config.load_x0;
    return profile;
  }

  SolveOptions solver() const {
    SolveOptions opts;
    opts.newton_tol = config.newton_tol;
    opts.max_iter = config.max_iter;
    opts.admissibility_floor = config.admissibility_floor;
    return opts;
  }

  SweepSpec sweep() const {
    SweepSpec spec;
    spec.model = config.model == "bqnl" || config.model == "qnl"
                     ? ModelTag::bqnl
                     : ModelTag::bqce;
    spec.potential = potential;
    spec.n_list = {config.n};
    spec.k_list = effective_k_list(config);
    const bool sharp = config.model == "qce" || config.model == "qnl";
    spec.shapes = {sharp ? BlendShape::characteristic() : make_shape(config)};
    spec.strain = config.f;
    spec.load = load_profile();
    spec.p = config.p;
    spec.atomistic_center = center;
    spec.atomistic_width = width;
    spec.f_lo = config.f_lo;
    spec.f_hi = config.f_hi;
    spec.bisect_tol = config.bisect_tol;
    spec.solver = solver();
    spec.seed = config.seed.value_or(0);
    spec.threads = config.threads;
    return spec;
  }
};

std::string plot_path(const std::string& csv_path, const std::string& suffix) {
  const auto dot = csv_path.rfind('.');
  const std::string stem =
      dot == std::string::npos ? csv_path : csv_path.substr(0, dot);
  return stem + suffix + ".dat";
}

void write_plot_data(const std::string& path, const Eigen::ArrayXd& x,
                     const Eigen::ArrayXd& y) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_plot_data: cannot open " + path);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out << format_value(x[i]) << ' ' << format_value(y[i]) << '\n';
  }
}

RunResult run_energy(const Workspace& ws, std::ostream& summary) {
  const EnergyModel model = ws.model(ws.config.k);
  const Deformation state = Deformation::uniform(ws.lattice, ws.config.f);
  const double energy = value(model, state);
  const DualFunctional variation = first_variation(model, state);
  const Eigen::ArrayXd gradient = dual_to_forces(variation);
  const Eigen::ArrayXd strains = state.strains();

  Table table;
  table.columns = {"site", "x", "strain", "alpha", "beta", "gradient"};
  for (int i = 0; i < ws.config.n; ++i) {
    table.rows.push_back({static_cast<double>(i + 1),
                          ws.lattice.spacing() * (i + 1), strains[i],
                          model.alpha()[i], model.beta()[i], gradient[i]});
  }
  write_csv(ws.config.output, "energy", table);

  summary << "energy: model = " << to_string(model.tag())
          << ", potential = " << ws.potential.name() << ", n = " << ws.config.n
          << ", f = " << format_value(ws.config.f) << "\n"
          << "energy: value per period = " << format_value(energy) << "\n"
          << "energy: residual dual norm = "
          << format_value(dual_norm(variation, 2.0)) << "\n";
  return {0, {ws.config.output}};
}

RunResult run_patch_test(const Workspace& ws, std::ostream& summary) {
  const EnergyModel model = ws.model(ws.config.k);
  const Deformation state = Deformation::uniform(ws.lattice, ws.config.f);
  const double ghost = dual_norm(first_variation(model, state), 2.0);

  Table table;
  table.columns = {"n", "k", "f", "ghost_dual_norm"};
  table.rows.push_back({static_cast<double>(ws.config.n),
                        static_cast<double>(ws.config.k), ws.config.f, ghost});
  write_csv(ws.config.output, "patch-test", table);

  const bool consistent = model.patch_test_consistent();
  summary << "patch-test: model = " << to_string(model.tag())
          << ", ghost_dual_norm = " << format_value(ghost);
  if (consistent) {
    summary << (ghost <= 1e-12 ? " <= 1e-12 (patch test passed)"
                               : " > 1e-12 (patch test FAILED)");
  } else {
    summary << " (ghost force expected for this model)";
  }
  summary << "\n";
  return {0, {ws.config.output}};
}

RunResult run_ghost_force(const Workspace& ws, std::ostream& summary) {
  RunResult result;
  const Deformation state = Deformation::uniform(ws.lattice, ws.config.f);
  const double bond_slope =
      ws.potential.derivative(1, 2.0 * ws.config.f);  // phi'(2F)

  Table table;
  table.columns = {"n",
                   "k",
                   "f",
                   "ghost_dual_norm",
                   "delta2_alpha_norm",
                   "window_gamma_norm",
                   "per_transition_dual_seminorm",
                   "per_transition_bound"};
  for (int k : effective_k_list(ws.config)) {
    const BlendFunction blend = ws.blend(k);
    const EnergyModel model = EnergyModel::bqce(ws.potential, blend);
    const DualFunctional variation = first_variation(model, state);
    const GhostSeminorm seminorm = ghost_seminorm(blend, ws.config.p);
    table.rows.push_back({static_cast<double>(ws.config.n),
                          static_cast<double>(k), ws.config.f,
                          dual_norm(variation, ws.config.p), seminorm.value,
                          seminorm.window_gamma[1],
                          std::abs(bond_slope) * seminorm.window_gamma[1],
                          seminorm.per_transition_bound});
    if (ws.config.emit_plot_data) {
      const std::string path =
          plot_path(ws.config.output, "_k" + std::to_string(k));
      Eigen::ArrayXd x(ws.config.n);
      for (int i = 0; i < ws.config.n; ++i) x[i] = ws.lattice.spacing() * (i + 1);
      write_plot_data(path, x, variation.strain_rep());
      result.artifacts.push_back(path);
    }
  }
  write_csv(ws.config.output, "ghost-force", table);
  result.artifacts.insert(result.artifacts.begin(), ws.config.output);

  summary << "ghost-force: model = bqce, shape = " << ws.config.blend_shape
          << ", p = " << format_value(ws.config.p) << "\n";
  for (const auto& row : table.rows) {
    summary << "ghost-force: k = " << static_cast<int>(row[1])
            << ", ghost_dual_norm = " << format_value(row[3]) << "\n";
  }
  return result;
}

RunResult run_critical_strain(const Workspace& ws, std::ostream& summary) {
  if (ws.config.model == "atomistic" || ws.config.model == "cauchy_born") {
    const EnergyModel model = ws.model(ws.config.k);
    const double f_star = critical_strain(model, ws.config.f_lo, ws.config.f_hi,
                                          ws.config.bisect_tol);
    const double f_star_local = cauchy_born_critical_strain(
        ws.potential, ws.config.f_lo, ws.config.f_hi, ws.config.bisect_tol);
    Table table;
    table.columns = {"n", "f_star", "f_star_local", "abs_error"};
    table.rows.push_back({static_cast<double>(ws.config.n), f_star, f_star_local,
                          std::abs(f_star - f_star_local)});
    write_csv(ws.config.output, "critical-strain", table);
    summary << "critical-strain: model = " << ws.config.model
            << ", f_star = " << format_value(f_star) << "\n";
    return {0, {ws.config.output}};
  }

  const StudyResult study = critical_strain_study(ws.sweep());
  if (study.error) {
    throw std::runtime_error("critical_strain_study: " + *study.error);
  }
  write_csv(ws.config.output, "critical-strain", study.table);
  summary << "critical-strain: model = " << ws.config.model << ", rows = "
          << study.table.rows.size() << "\n";
  for (const auto& row : study.table.rows) {
    summary << "critical-strain: k = " << static_cast<int>(row[2])
            << ", f_star = " << format_value(row[3])
            << ", abs_error = " << format_value(row[5]) << "\n";
  }
  if (study.fit_valid) {
    summary << "critical-strain: fitted slope vs k = "
            << format_value(study.fit.slope)
            << " (r^2 = " << format_value(study.fit.r_squared) << ")\n";
  }
  return {0, {ws.config.output}};
}

RunResult run_modeling_audit(const Workspace& ws, std::ostream& summary) {
  const std::uint64_t seed = ws.config.seed.value();
  Table table;
  table.columns = {"sample", "state_seed", "p",        "lhs",   "rhs",
                   "ghost",  "coupling",   "cauchy_born", "margin"};
  int violations = 0;
  double worst_margin = kInf;
  const EnergyModel model = ws.model(ws.config.k);
  for (int s = 0; s < ws.config.samples; ++s) {
    const std::uint64_t state_seed = seed + static_cast<std::uint64_t>(s);
    const Deformation y =
        random_smooth_state(ws.lattice, ws.config.f, state_seed);
    const ModelingErrorAudit audit = modeling_error_audit(model, y, ws.config.p);
    const double margin = audit.rhs - audit.lhs;
    if (margin < 0.0) ++violations;
    worst_margin = std::min(worst_margin, margin);
    table.rows.push_back({static_cast<double>(s),
                          static_cast<double>(state_seed), ws.config.p,
                          audit.lhs, audit.rhs, audit.parts.ghost,
                          audit.parts.coupling, audit.parts.cauchy_born, margin});
  }
  write_csv(ws.config.output, "modeling-audit", table);
  summary << "modeling-audit: model = " << ws.config.model << ", samples = "
          << ws.config.samples << ", p = " << format_value(ws.config.p) << "\n"
          << "modeling-audit: violations = " << violations
          << ", smallest margin = " << format_value(worst_margin) << "\n";
  return {0, {ws.config.output}};
}

RunResult run_convergence(const Workspace& ws, std::ostream& summary) {
  const StudyResult study = convergence_study(ws.sweep());
  if (study.error) {
    throw std::runtime_error("convergence_study: " + *study.error);
  }
  write_csv(ws.config.output, "convergence", study.table);
  summary << "convergence: model = " << ws.config.model
          << ", rows = " << study.table.rows.size() << "\n";
  if (study.fit_valid) {
    summary << "convergence: fitted error slope vs k = "
            << format_value(study.fit.slope)
            << " (r^2 = " << format_value(study.fit.r_squared) << ")\n";
  }
  RunResult result{0, {ws.config.output}};
  if (ws.config.emit_plot_data) {
    const std::string path = plot_path(ws.config.output, "");
    Eigen::ArrayXd k_values(study.table.rows.size());
    Eigen::ArrayXd errors(study.table.rows.size());
    for (std::size_t i = 0; i < study.table.rows.size(); ++i) {
      k_values[static_cast<Eigen::Index>(i)] = study.table.rows[i][2];
      errors[static_cast<Eigen::Index>(i)] = study.table.rows[i][3];
    }
    write_plot_data(path, k_values, errors);
    result.artifacts.push_back(path);
  }
  return result;
}

RunResult run_equilibrate(const Workspace& ws, std::ostream& summary) {
  const EnergyModel model = ws.model(ws.config.k);
  const DeadLoad load = sample_load(ws.load_profile(), ws.lattice);
  const Deformation start = Deformation::uniform(ws.lattice, ws.config.f);
  auto [state, report] = equilibrate(model, load, start, ws.solver());

  Table table;
  table.columns = {"site", "x", "load", "displacement", "strain"};
  const Eigen::ArrayXd strains = state.strains();
  for (int i = 0; i < ws.config.n; ++i) {
    table.rows.push_back({static_cast<double>(i + 1),
                          ws.lattice.spacing() * (i + 1), load.values()[i],
                          state.displacement().values()[i], strains[i]});
  }
  write_csv(ws.config.output, "equilibrate", table);

  summary << "equilibrate: model = " << to_string(model.tag())
          << ", iterations = " << report.iterations
          << ", residual = " << format_value(report.residual) << "\n"
          << "equilibrate: energy = " << format_value(value(model, state))
          << ", coercivity = " << format_value(report.final_coercivity) << "\n";
  return {0, {ws.config.output}};
}

}  // namespace

void write_csv(const std::string& path, const std::string& schema,
               const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "# bqclab csv schema v1: " << schema << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::logic_error("write_csv: row width does not match header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_value(row[i]);
    }
    out << "\n";
  }
}

RunResult run(const RunConfig& config, std::ostream& summary) {
  const Workspace ws(config);
  if (config.subcommand == "energy") return run_energy(ws, summary);
  if (config.subcommand == "patch-test") return run_patch_test(ws, summary);
  if (config.subcommand == "ghost-force") return run_ghost_force(ws, summary);
  if (config.subcommand == "critical-strain") {
    return run_critical_strain(ws, summary);
  }
  if (config.subcommand == "modeling-audit") {
    return run_modeling_audit(ws, summary);
  }
  if (config.subcommand == "convergence") return run_convergence(ws, summary);
  if (config.subcommand == "equilibrate") return run_equilibrate(ws, summary);
  throw ConfigError("run: unknown subcommand '" + config.subcommand + "'");
}

}  // namespace bqclab
