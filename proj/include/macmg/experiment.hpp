#pragma once

// Declarative experiment runs: INI-style configs, the built-in convergence
// tables, LFA parameter scans, and CSV / console emission.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "macmg/multigrid.hpp"
#include "macmg/relaxation.hpp"

namespace macmg::experiment {

/// Bad config or command-line input. Maps to the usage exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One section of a config file: every (cycle, n, nu) combination is a run.
struct ExperimentConfig {
  std::string name = "default";
  RelaxScheme scheme = RelaxScheme::QDR;
  RelaxParams params = preset(RelaxScheme::QDR);
  bool params_from_preset = true;
  std::vector<int> grid_sizes;
  std::vector<CycleKind> cycles;
  std::vector<int> nus;
  std::uint64_t seed = 1;
  int k_max = 100;
  /// CSV destination; empty means console only.
  std::string out;
  /// theta lattice for the LFA prediction column; 0 disables it.
  int resolution = 256;
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

/// Parses an INI document. Keys outside any section are defaults for every
/// section; a document without sections is a single experiment.
///
///   seed = 7
///   [qdr-two-grid]
///   scheme = qdr
///   params = preset          ; or: custom, with omega/alpha/sigma/omega_j
///   grids = 32, 64
///   cycles = two-grid
///   nu = 1, 2, 3, 4
std::vector<ExperimentConfig> parse_config(std::istream& in);
std::vector<ExperimentConfig> load_config(const std::string& path);

/// table1, table2, table3 or all.
std::vector<ExperimentConfig> builtin_config(std::string_view name);
std::vector<std::string> builtin_config_names();

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> k_max;
  std::optional<std::string> out;
  std::optional<int> resolution;
  /// Replaces the scheme and resets the parameters to its preset.
  std::optional<RelaxScheme> scheme;
};

void apply(const Overrides& overrides, std::vector<ExperimentConfig>& configs);

/// One step of the splitmix64 generator.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for a single run, derived from the base seed and the run's identity
/// only, so it does not depend on which other runs share the config or on the
/// order in which workers pick them up.
std::uint64_t run_seed(std::uint64_t base, RelaxScheme scheme, CycleKind kind, int n, int nu);

enum class RunStatus { Ok, Diverged, Failed };
std::string_view tag(RunStatus status);

struct ResultRow {
  std::string experiment;
  RelaxScheme scheme = RelaxScheme::QDR;
  RelaxParams params;
  CycleKind kind = CycleKind::TwoGrid;
  int n = 0;
  int nu = 0;
  double rho = 0.0;
  int k_eff = 0;
  /// mu^nu from LFA, when a resolution is configured.
  std::optional<double> predicted;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Ok;
  std::string message;

  std::optional<double> deviation() const;
};

struct TablesReport {
  std::vector<ResultRow> rows;
  bool all_ok() const;
};

/// Runs every combination of every config on `threads` workers (0 = hardware
/// concurrency). Rows come back in config enumeration order regardless of
/// scheduling.
TablesReport run_tables(const std::vector<ExperimentConfig>& configs, unsigned threads = 0);

struct ScanRow {
  RelaxScheme scheme = RelaxScheme::QDR;
  RelaxParams params;
  double mu = 0.0;
  double expected = 0.0;
  long evaluations = 0;
  double seconds = 0.0;
};

/// Optimal parameters per scheme over the default search boxes; the final
/// incumbent is re-evaluated on a `resolution` lattice.
std::vector<ScanRow> run_lfa_scan(const std::vector<RelaxScheme>& schemes, int resolution,
                                  unsigned threads = 0);

/// Plain rows of strings with a header. Prints as an aligned console table or
/// as RFC 4180 CSV.
class Table {
 public:
  explicit Table(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void print(std::ostream& os) const;
  void write_csv(std::ostream& os) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

std::string format_fixed(double value, int digits);

Table results_table(const std::vector<ResultRow>& rows, bool include_timing = true);
Table scan_table(const std::vector<ScanRow>& rows);

/// Writes `table` as CSV to `path`, throwing std::runtime_error on I/O failure.
void write_csv_file(const std::string& path, const Table& table);

}  // namespace macmg::experiment
