#include "bqclab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace bqclab {

const std::vector<std::string> kKnownSubcommands = {
    "energy",          "equilibrate", "ghost-force", "critical-strain",
    "modeling-audit",  "convergence", "patch-test"};

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "Inf" || v == "INF") return kInf;
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("invalid real for key '" + key + "': '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for key '" + key + "': '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for key '" + key + "': '" + v + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          Parse parse) {
  std::vector<T> out;
  std::stringstream stream(v);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("empty list element for key '" + key + "'");
    }
    out.push_back(parse(key, item));
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"subcommand",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.subcommand = v;
       }},
      {"potential",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.potential = v;
       }},
      {"morse_a",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.morse_stiffness = parse_real(k, v);
       }},
      {"n",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.n = static_cast<int>(parse_int(k, v));
       }},
      {"f",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.f = parse_real(k, v);
       }},
      {"model",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.model = v;
       }},
      {"blend_shape",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.blend_shape = v;
       }},
      {"custom_shape_coeffs",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.custom_shape_coeffs = parse_list<double>(k, v, parse_real);
       }},
      {"k",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.k = static_cast<int>(parse_int(k, v));
       }},
      {"k_list",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.k_list = parse_list<int>(k, v, [](const std::string& key,
                                             const std::string& item) {
           return static_cast<int>(parse_int(key, item));
         });
       }},
      {"atomistic_width",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.atomistic_width = static_cast<int>(parse_int(k, v));
       }},
      {"atomistic_center",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.atomistic_center = static_cast<int>(parse_int(k, v));
       }},
      {"p",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.p = parse_real(k, v);
       }},
      {"newton_tol",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.newton_tol = parse_real(k, v);
       }},
      {"max_iter",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.max_iter = static_cast<int>(parse_int(k, v));
       }},
      {"admissibility_floor",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.admissibility_floor = parse_real(k, v);
       }},
      {"f_lo",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.f_lo = parse_real(k, v);
       }},
      {"f_hi",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.f_hi = parse_real(k, v);
       }},
      {"bisect_tol",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bisect_tol = parse_real(k, v);
       }},
      {"load_a",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.load_a = parse_real(k, v);
       }},
      {"load_b",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.load_b = parse_real(k, v);
       }},
      {"load_w",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.load_w = parse_real(k, v);
       }},
      {"load_x0",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.load_x0 = parse_real(k, v);
       }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = static_cast<std::uint64_t>(parse_int(k, v));
       }},
      {"samples",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.samples = static_cast<int>(parse_int(k, v));
       }},
      {"output",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.output = v;
       }},
      {"emit_plot_data",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.emit_plot_data = parse_bool(k, v);
       }},
      {"threads",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.threads = static_cast<int>(parse_int(k, v));
       }},
  };
  return table;
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1);
  std::vector<int> curr(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    curr[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

std::string suggestion_for(const std::string& key) {
  int best = std::numeric_limits<int>::max();
  std::string candidate;
  for (const auto& [known, setter] : key_table()) {
    const int d = edit_distance(key, known);
    if (d < best) {
      best = d;
      candidate = known;
    }
  }
  if (best <= std::max<int>(2, static_cast<int>(key.size()) / 3)) {
    return " (did you mean '" + candidate + "'?)";
  }
  return "";
}

void assign(RunConfig& config, const std::string& key, const std::string& value,
            int line) {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) {
    std::string where = line > 0 ? " at line " + std::to_string(line) : "";
    throw ConfigError("unknown key '" + key + "'" + where + suggestion_for(key));
  }
  it->second(config, key, value);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::stringstream stream(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("parse error at line " + std::to_string(line_number) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("parse error at line " + std::to_string(line_number) +
                        ": empty key or value");
    }
    assign(config, key, value, line_number);
  }
  return config;
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override must have the form key=value: '" + assignment +
                      "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty() || value.empty()) {
    throw ConfigError("override must have the form key=value: '" + assignment +
                      "'");
  }
  assign(config, key, value, 0);
}

Potential make_potential(const RunConfig& config) {
  if (config.potential == "lj") return Potential::lennard_jones();
  if (config.potential == "morse") return Potential::morse(config.morse_stiffness);
  throw ConfigError("key 'potential': unknown family '" + config.potential +
                    "' (expected lj or morse)");
}

BlendShape make_shape(const RunConfig& config) {
  if (config.blend_shape == "characteristic") return BlendShape::characteristic();
  if (config.blend_shape == "linear") return BlendShape::linear();
  if (config.blend_shape == "cubic") return BlendShape::cubic();
  if (config.blend_shape == "quintic") return BlendShape::quintic();
  if (config.blend_shape == "custom") {
    if (config.custom_shape_coeffs.empty()) {
      throw ConfigError("key 'custom_shape_coeffs': required for blend_shape = custom");
    }
    return BlendShape::custom(config.custom_shape_coeffs);
  }
  throw ConfigError("key 'blend_shape': unknown shape '" + config.blend_shape + "'");
}

std::vector<int> effective_k_list(const RunConfig& config) {
  return config.k_list.empty() ? std::vector<int>{config.k} : config.k_list;
}

void validate(RunConfig& config) {
  if (std::find(kKnownSubcommands.begin(), kKnownSubcommands.end(),
                config.subcommand) == kKnownSubcommands.end()) {
    throw ConfigError("key 'subcommand': unknown subcommand '" +
                      config.subcommand + "'");
  }
  make_potential(config);
  const BlendShape shape = make_shape(config);
  (void)shape;
  if (config.model != "atomistic" && config.model != "cauchy_born" &&
      config.model != "qce" && config.model != "qnl" && config.model != "bqce" &&
      config.model != "bqnl") {
    throw ConfigError("key 'model': unknown model '" + config.model + "'");
  }
  if (config.n < 5) throw ConfigError("key 'n': need n >= 5");
  if (!(config.f > 0.0)) throw ConfigError("key 'f': strain must be positive");
  if (!(config.p >= 1.0)) throw ConfigError("key 'p': norm order must be >= 1");
  if (!(config.newton_tol > 0.0)) {
    throw ConfigError("key 'newton_tol': must be positive");
  }
  if (config.max_iter < 1) throw ConfigError("key 'max_iter': must be >= 1");
  if (!(config.bisect_tol > 0.0)) {
    throw ConfigError("key 'bisect_tol': must be positive");
  }
  if (config.samples < 1) throw ConfigError("key 'samples': must be >= 1");

  const bool blended = config.model == "bqce" || config.model == "bqnl" ||
                       config.model == "qce" || config.model == "qnl";
  if (blended) {
    const int width =
        config.atomistic_width >= 0 ? config.atomistic_width
                                    : std::max(config.n / 8, 4);
    for (int k : effective_k_list(config)) {
      if (k < 1) throw ConfigError("key 'k': transition width must be >= 1");
      if (width + 2 * k + 4 > config.n) {
        throw ConfigError("key 'k': geometry does not fit the period (width " +
                          std::to_string(width) + " + 2*" + std::to_string(k) +
                          " + 4 > n = " + std::to_string(config.n) + ")");
      }
    }
  }
  if (config.subcommand == "modeling-audit" && !config.seed.has_value()) {
    throw ConfigError("key 'seed': required for randomized subcommand '" +
                      config.subcommand + "'");
  }
  if (config.output.empty()) config.output = config.subcommand + ".csv";
}

}  // namespace bqclab
