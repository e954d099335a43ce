#include "bqclab/runner.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace bqclab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("bqclab_cli_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_cli(const std::string& args) {
  const std::string command = std::string(BQCLAB_CLI_PATH) + " " + args;
  return std::system(command.c_str());
}

}  // namespace

TEST_CASE("runner: patch test on a consistent model") {
  TempDir dir;
  RunConfig config = parse_config(
      "subcommand = patch-test\n"
      "model = bqnl\n"
      "blend_shape = cubic\n"
      "k = 8\n"
      "n = 256\n"
      "f = 1.0\n");
  config.output = (dir.path / "patch.csv").string();
  validate(config);
  std::ostringstream summary;
  const RunResult result = run(config, summary);
  CHECK(result.exit_code == 0);
  CHECK(summary.str().find("patch test passed") != std::string::npos);

  const std::string csv = slurp(config.output);
  CHECK(csv.rfind("# bqclab csv schema v1: patch-test", 0) == 0);
  CHECK(csv.find("ghost_dual_norm") != std::string::npos);
}

TEST_CASE("runner: ghost-force table carries the exact linear-shape value") {
  TempDir dir;
  RunConfig config = parse_config(
      "subcommand = ghost-force\n"
      "model = bqce\n"
      "blend_shape = linear\n"
      "k = 8\n"
      "n = 256\n"
      "f = 1.0\n"
      "p = 2\n");
  config.output = (dir.path / "ghost.csv").string();
  validate(config);
  std::ostringstream summary;
  run(config, summary);

  // Parse the data row and check the per-transition column against
  // 2^(1/2) eps^(1/2) k^-1 |phi'(2F)|.
  std::istringstream csv(slurp(config.output));
  std::string line;
  std::getline(csv, line);  // schema
  std::getline(csv, line);  // header
  REQUIRE(std::getline(csv, line));
  std::vector<double> cells;
  std::stringstream row(line);
  std::string cell;
  while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
  REQUIRE(cells.size() == 8);
  const double eps = 1.0 / 256.0;
  const Potential pot = Potential::lennard_jones();
  const double expected = std::sqrt(2.0 * eps) / 8.0 *
                          std::abs(pot.derivative(1, 2.0));
  CHECK(cells[6] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("runner: deterministic CSV bytes for a seeded audit") {
  TempDir dir;
  RunConfig config = parse_config(
      "subcommand = modeling-audit\n"
      "model = bqce\n"
      "seed = 12345\n"
      "samples = 10\n"
      "n = 64\n"
      "k = 4\n"
      "atomistic_width = 8\n");
  config.output = (dir.path / "a.csv").string();
  validate(config);
  std::ostringstream s1;
  run(config, s1);
  const std::string first = slurp(config.output);

  config.output = (dir.path / "b.csv").string();
  std::ostringstream s2;
  run(config, s2);
  const std::string second = slurp(config.output);
  CHECK(first == second);
  CHECK(s1.str().find("violations = 0") != std::string::npos);
}

TEST_CASE("cli binary: end-to-end subcommand with overrides") {
  TempDir dir;
  const fs::path config_path = dir.path / "run.cfg";
  {
    std::ofstream out(config_path);
    out << "model = bqnl\nblend_shape = cubic\nk = 8\nn = 128\nf = 1.0\n";
  }
  const fs::path csv_path = dir.path / "out.csv";
  const int status = run_cli("patch-test --config " + config_path.string() +
                             " --set output=" + csv_path.string() +
                             " > " + (dir.path / "stdout.txt").string());
  CHECK(status == 0);
  CHECK(fs::exists(csv_path));
  CHECK(slurp(dir.path / "stdout.txt").find("wrote " + csv_path.string()) !=
        std::string::npos);
}

TEST_CASE("cli binary: errors exit nonzero and name the problem") {
  TempDir dir;
  const fs::path config_path = dir.path / "bad.cfg";
  {
    std::ofstream out(config_path);
    out << "blendshape = cubic\n";  // unknown key
  }
  const int status = run_cli("patch-test --config " + config_path.string() +
                             " 2> " + (dir.path / "stderr.txt").string());
  CHECK(status != 0);
  const std::string err = slurp(dir.path / "stderr.txt");
  CHECK(err.find("blendshape") != std::string::npos);
  CHECK(err.find("blend_shape") != std::string::npos);
}

TEST_CASE("cli binary: subcommand mismatch with the config is an error") {
  TempDir dir;
  const fs::path config_path = dir.path / "mismatch.cfg";
  {
    std::ofstream out(config_path);
    out << "subcommand = energy\n";
  }
  const int status = run_cli("patch-test --config " + config_path.string() +
                             " 2> /dev/null");
  CHECK(status != 0);
}

TEST_CASE("runner: energy summary reports the uniform-state value") {
  TempDir dir;
  RunConfig config = parse_config(
      "subcommand = energy\n"
      "model = atomistic\n"
      "n = 32\n"
      "f = 1.0\n");
  config.output = (dir.path / "energy.csv").string();
  validate(config);
  std::ostringstream summary;
  run(config, summary);
  const Potential pot = Potential::lennard_jones();
  char expected[64];
  std::snprintf(expected, sizeof(expected), "%.17g", pot(1.0) + pot(2.0));
  CHECK(summary.str().find(expected) != std::string::npos);
}

TEST_CASE("runner: equilibrate writes per-site columns") {
  TempDir dir;
  RunConfig config = parse_config(
      "subcommand = equilibrate\n"
      "model = atomistic\n"
      "n = 64\n"
      "f = 1.0\n"
      "load_b = 0.5\n");
  config.output = (dir.path / "eq.csv").string();
  validate(config);
  std::ostringstream summary;
  run(config, summary);
  std::istringstream csv(slurp(config.output));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  CHECK(line == "site,x,load,displacement,strain");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 64);
  CHECK(summary.str().find("residual") != std::string::npos);
}
