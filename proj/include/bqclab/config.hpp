#pragma once

#include "bqclab/experiments.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bqclab {

/// Parse or validation failure; the message names the offending line or key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a batch run needs, read from a flat `key = value` file plus
/// repeatable `key=value` overrides. Unknown keys are errors.
struct RunConfig {
  std::string subcommand;

  std::string potential = "lj";
  double morse_stiffness = 4.0;

  int n = 256;
  double f = 1.0;

  std::string model = "bqce";
  std::string blend_shape = "cubic";
  std::vector<double> custom_shape_coeffs;
  int k = 8;
  std::vector<int> k_list;
  int atomistic_width = -1;   // -1: N/8
  int atomistic_center = -1;  // -1: N/2

  double p = 2.0;

  double newton_tol = 1e-10;
  int max_iter = 50;
  double admissibility_floor = std::numeric_limits<double>::quiet_NaN();

  double f_lo = 1.0;
  double f_hi = 1.5;
  double bisect_tol = 1e-8;

  double load_a = 0.1;
  double load_b = 1.0;
  double load_w = 0.05;
  double load_x0 = std::numeric_limits<double>::quiet_NaN();  // NaN: atomistic center

  std::optional<std::uint64_t> seed;
  int samples = 200;  // states per randomized audit

  std::string output;  // CSV path; empty: "<subcommand>.csv"
  bool emit_plot_data = false;
  int threads = 0;
};

extern const std::vector<std::string> kKnownSubcommands;

/// Parses the flat key=value format (# comments, comma-separated lists).
RunConfig parse_config(const std::string& text);

/// Applies one `key=value` override on top of a parsed config.
void apply_override(RunConfig& config, const std::string& assignment);

/// Cross-field checks: known names, geometry fits the period, seed present
/// for randomized subcommands. Fills the default output path.
void validate(RunConfig& config);

// Helpers shared with the runner.
Potential make_potential(const RunConfig& config);
BlendShape make_shape(const RunConfig& config);
std::vector<int> effective_k_list(const RunConfig& config);

}  // namespace bqclab
