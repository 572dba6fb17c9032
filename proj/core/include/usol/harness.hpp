#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "usol/exponent_region.hpp"
#include "usol/multipliers.hpp"
#include "usol/normest.hpp"

namespace usol::harness {

enum class Profile { Quick, Full };

struct ExperimentConfig {
  int d = 3;
  int k = 1;
  int n = 64;
  double L = 16.0;
  RealVec lambdas;                 // empty: experiment default
  std::string z_sweep = "circle:16";
  std::optional<ExponentPair> pair;
  std::map<std::string, double> tolerances;  // keyed by check label
  std::string out_dir = "usol_out";
  std::string svg_dir;             // empty: no plots
  std::uint64_t seed = 1;
  Profile profile = Profile::Quick;
  int workers = 0;                 // 0: USOL_WORKERS or hardware concurrency

  double tol(const std::string& label, double fallback) const;
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// Applies one `key = value` setting. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Plain-text config: `key = value` lines, '#' comments.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);
// d >= 3, 1 <= k <= d-1, n a power of two, every lambda in (0,1), parseable z sweep.
void validate(const ExperimentConfig& cfg);

// "a:b:count": geometric sequence from a to b.
RealVec parse_lambda_seq(const std::string& text);
// "circle:N" or "line:a0:a1:b:count".
std::vector<SpectralParameter> parse_z_sweep(const std::string& text);

// A check evaluated from the sample table alone.
//   kind: max | min | value | ratio | slope | count | mismatches
//   value: the first matching row; ratio: max/min; slope: log-log fit of |column| against x_column;
//   count: matching rows; mismatches: rows where column != x_column (as text).
struct Check {
  std::string label;
  std::string kind;
  std::string column;
  std::string x_column;
  std::string filter_column;  // empty: every row
  std::string filter_value;
  double lo = 0.0;
  double hi = 0.0;
  std::string anchor;  // formula the bounds come from
  double value = 0.0;
  bool pass = false;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(const std::string& name) const;
};

std::string fmt(double v);  // round-trip decimal
std::string fmt(int v);

struct ExperimentReport {
  std::string name;
  int criterion = 0;
  std::vector<std::pair<std::string, std::string>> config;
  Table table;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  double runtime_s = 0.0;
  double budget_s = 0.0;  // 0: unbounded

  bool pass() const;  // every check passes
};

// Evaluates `check` against `table`, filling value and pass.
void evaluate(Check& check, const Table& table);
void evaluate_all(ExperimentReport& report);

// CSV: a timestamp comment line, config and check comment lines, the header, then one record per row.
void write_csv(const ExperimentReport& report, const std::string& path);
std::string to_csv(const ExperimentReport& report, const std::string& timestamp);
// Parses a CSV written by write_csv and recomputes every verdict from its rows.
ExperimentReport recheck_csv(const std::string& path);
ExperimentReport recheck_csv_text(const std::string& text);
// Log-log plot of every slope check with its fitted line.
void write_svg(const ExperimentReport& report, const std::string& path);

// Experiments by name; see experiment_names() for the list and criteria.
std::vector<std::string> experiment_names();
ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& cfg);
// Experiments executed by a CLI subcommand.
std::vector<std::string> subcommand_experiments(const std::string& subcommand);
// Wall-clock budget per experiment in seconds.
double experiment_budget(const std::string& name);
// Acceptance criterion number (1-15) an experiment belongs to.
int experiment_criterion(const std::string& name);

// The `usol` command line. Returns the process exit code: 0 when every verdict
// passes, 1 on failed verdicts or other errors, 2 on configuration errors,
// 3 on numerical non-convergence.
int cli_main(int argc, char** argv);

}  // namespace usol::harness
