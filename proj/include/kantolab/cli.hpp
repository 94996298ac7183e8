#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kantolab {

enum ExitCode : int {
  kExitPass = 0,
  kExitBoundFailure = 1,
  kExitHypothesis = 2,
  kExitUsage = 3,
  kExitNumeric = 4,
};

struct RunConfig {
  std::string command;
  std::string phi = "power:p=2";
  std::string kernel = "logistic";
  std::string function;
  std::vector<int> ns;
  std::vector<double> deltas;
  std::vector<double> hs;
  std::vector<double> lambda_grid;
  std::optional<double> lambda;
  std::string kind;
  std::string mode = "strong";
  std::string which;
  std::vector<double> ts;
  double p = 2.0;
  /// Cutoffs as ln(1/eps); `cutoffs=` takes eps values, `log_cutoffs=` takes ln(1/eps).
  std::vector<double> log_cutoffs;
  double nu = 0.0;
  std::optional<double> mu;
  double tol = 1e-6;
  double max_spread = 4.0;
  std::string output_path;
  std::string dump_path;
  int points = 101;
  int threads = 1;
  std::uint64_t seed = 12345;
  /// Every key as given (file first, then flags), for restating in summaries.
  std::map<std::string, std::string> raw;
};

std::vector<std::string> commands();

/// Parses `command [--key value | --key=value]...`.  `--config path` reads a
/// flat `key = value` file; flags override file values.  Throws UsageError.
RunConfig parse_config(std::span<const std::string> args);

/// Parses "4,16,64" or the ranges "4:512:x2", "0.5:0.01:/2", "1:10:+1".
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
double parse_real(const std::string& text);

/// Runs the command; results and the summary go to `out`, diagnostics to
/// `err`.  Returns an ExitCode.  Library exceptions propagate.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + run with exceptions mapped to exit codes.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace kantolab
