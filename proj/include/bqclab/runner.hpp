#pragma once

#include "bqclab/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bqclab {

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> artifacts;  // files written
};

/// Executes a validated config: runs the subcommand, writes its CSV (plus
/// optional .dat plot files), and prints a plain-text summary. Throws on any
/// module error; the caller maps that to a nonzero exit.
RunResult run(const RunConfig& config, std::ostream& summary);

/// Serializes a table as CSV: a schema comment line, a header row, then one
/// row per entry with every value printed to 17 significant digits.
void write_csv(const std::string& path, const std::string& schema,
               const Table& table);

}  // namespace bqclab
