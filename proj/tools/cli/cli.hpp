#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ridgeshift/problem.hpp"
#include "ridgeshift/table.hpp"

namespace ridgeshift::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumeric = 2,
  kExitIo = 3,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Subcommand { Risk, Sweep, Phase, Mc, Whiten };

/// Fully validated invocation.
struct RunConfig {
  Subcommand command = Subcommand::Risk;
  std::vector<double> gammas{1.0};  // risk points, or the sweep/mc grid
  double snr = 1.0;
  double signal = 1.0;
  Penalty penalty = Penalty::optimal();
  std::vector<Atom> atoms{{1.0, 1.0, 1.0}};   // user order
  std::vector<std::vector<AtomShift>> shifts;  // one entry per shift, user atom order
  std::vector<double> kappa_grid;
  std::vector<double> costheta_grid;
  std::optional<std::filesystem::path> out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t dim = 256;
  std::size_t n_seeds = 100;
  bool whiten = false;
  int max_iters = 100000;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // every violation found
  std::optional<std::string> help;  // --help text; exit 0
};

ParseResult parse(const std::vector<std::string>& args);

/// Executes a validated config. CSV goes to config.out (atomically) or to
/// `out` when no path is given; the one-line summary goes to `out`, or to
/// `err` when the CSV occupies `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Writes via a temporary file in the target directory and renames it into
/// place. Throws IoError.
void write_csv(const Table& table, const std::filesystem::path& path);

/// parse + run with exit-code mapping; args excludes the program name.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "start:stop:count" (linear) or "log:start:stop:count".
std::vector<double> parse_grid(const std::string& text);

}  // namespace ridgeshift::cli
