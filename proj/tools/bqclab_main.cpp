#include "bqclab/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bqclab::ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bqclab: blended quasicontinuum models of a periodic atom chain"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  for (const std::string& name : bqclab::kKnownSubcommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--set", overrides,
                    "override a config key (repeatable, applied after the file)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    bqclab::RunConfig config;
    if (!config_path.empty()) {
      config = bqclab::parse_config(read_file(config_path));
    }
    if (!config.subcommand.empty() && config.subcommand != subcommand) {
      throw bqclab::ConfigError("config names subcommand '" + config.subcommand +
                                "' but '" + subcommand + "' was requested");
    }
    config.subcommand = subcommand;
    for (const std::string& assignment : overrides) {
      bqclab::apply_override(config, assignment);
    }
    bqclab::validate(config);

    const bqclab::RunResult result = bqclab::run(config, std::cout);
    for (const std::string& artifact : result.artifacts) {
      std::cout << "wrote " << artifact << "\n";
    }
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "bqclab " << subcommand << ": error: " << e.what() << "\n";
    return 1;
  }
}
