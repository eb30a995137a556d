#pragma once

#include "gsa/conditions.hpp"
#include "gsa/config.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsa {

/// Output could not be written; a `<id>.partial` marker is left behind.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One persisted data row. Mode-specific columns are NaN / empty when unused.
struct Row {
  std::string experiment_id;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t checkpoint_n = 0;
  double err = 0.0;
  double phi = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  // sa
  double beta = std::numeric_limits<double>::quiet_NaN();
  // sgd
  double eta = std::numeric_limits<double>::quiet_NaN();
  double c = std::numeric_limits<double>::quiet_NaN();
  int active_count = -1;
  std::uint64_t f_evals = 0;
  // gslln
  double t = std::numeric_limits<double>::quiet_NaN();
  std::string zeta_policy;
  double abs_S = std::numeric_limits<double>::quiet_NaN();

  /// Summary grouping key: "t=<t>,zeta=<policy>" for GSLLN rows, else "".
  [[nodiscard]] std::string group() const;
};

/// One evidence line of a condition report.
struct ConditionRow {
  std::string experiment_id;
  std::string family;
  std::string verdict;
  std::string deciding_clause;
  std::string clause;
  std::string name;
  double value = 0.0;
  std::string basis;
  std::string status;
};

struct CheckpointSummary {
  std::uint64_t n = 0;
  std::uint64_t finite = 0;  ///< trials contributing to the quantiles
  Quantiles err;
};

struct GroupSummary {
  std::string label;
  std::uint64_t trials = 0;
  std::uint64_t diverged = 0;
  std::vector<CheckpointSummary> checkpoints;
};

struct SummaryRecord {
  std::string experiment_id;
  std::string mode;
  std::string config_hash;
  std::uint64_t trials = 0;
  std::uint64_t diverged = 0;
  double wall_seconds = 0.0;
  std::vector<GroupSummary> groups;
  std::vector<std::pair<std::string, std::string>> verdicts;  ///< conditions mode

  /// Equality of everything derivable from rows (wall time and hash excluded).
  [[nodiscard]] bool same_data(const SummaryRecord& other) const;
};

/// Column names of the data file for a mode.
std::vector<std::string> columns(Mode mode);
std::vector<std::string> condition_columns();

std::string format_row(const Row& row, Mode mode, OutputFormat format);
std::string format_condition_row(const ConditionRow& row, OutputFormat format);
/// Reads back a data file written by run_experiment.
std::vector<Row> read_rows(const std::string& path, OutputFormat format);

/// Quantiles of err at every checkpoint, per group. Trials flagged as
/// diverged are counted and left out of the quantiles. Throws on empty input.
SummaryRecord summarize(const std::vector<Row>& rows);

std::string summary_json(const SummaryRecord& s);

/// Runs every trial of an engine or GSLLN config and returns its rows in
/// (group, trial, checkpoint) order. Rows do not depend on cfg.workers.
std::vector<Row> run_trials(const ExperimentConfig& cfg);
/// Reports requested by a conditions config.
std::vector<ConditionReport> run_conditions(const ExperimentConfig& cfg);
std::vector<ConditionRow> condition_rows(const std::string& experiment_id,
                                         const std::vector<ConditionReport>& reports);

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  SummaryRecord summary;
  std::vector<ConditionReport> reports;
  std::vector<ExperimentResult> children;  ///< sweep
  std::string data_path;
  std::string summary_path;
  std::vector<AssertionResult> assertions;

  [[nodiscard]] bool assertions_passed() const;
};

/// Runs the experiment, writes `<id>.<format>` and `<id>.summary.json` into
/// cfg.out_dir (plus `<id>.index.json` for sweeps), and evaluates the
/// config's assertions.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<AssertionResult> evaluate_assertions(const ExperimentConfig& cfg,
                                                 const SummaryRecord& summary,
                                                 const std::vector<ConditionReport>& reports);

}  // namespace gsa
