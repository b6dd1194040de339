#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cramsnn {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitSweepValues = 4,
  kExitRouting = 5,
  kExitInvariant = 6,
  kExitOutput = 7,
};

struct ExperimentSpec {
  std::string command;  // simulate | sweep | verify | report | rmse | calibrate
  std::string profile = "SHE-F";
  std::string config;
  std::string axis;
  std::string values;
  std::string out;
  std::string weights_out;
  std::optional<std::uint64_t> seed;
  bool learning = false;
  bool noise = false;
  unsigned threads = 1;
  double neurons = 1e9;  // report: network size for the closed-form aggregate
  std::size_t configs = 1000;  // verify: random configurations
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Shortest round-trip decimal, independent of the C locale.
std::string format_double(double v);
std::string to_csv(const CsvTable& table);
/// Writes to `path`, or to `fallback` when the path is empty.
void emit_csv(const CsvTable& table, const std::string& path, std::ostream& fallback);

/// Parses a sweep value list: comma-separated entries, each a number or an
/// inclusive range a..b. Throws ErrorKind::OutOfRange on malformed input.
std::vector<double> parse_values(const std::string& text);

/// Runs one command. Errors are reported on `err` and mapped to exit codes.
int run_experiment(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

/// Command-line entry point.
int cli_main(int argc, char** argv);

}  // namespace cramsnn
