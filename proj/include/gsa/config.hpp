#pragma once

#include "gsa/conditions.hpp"
#include "gsa/gslln.hpp"
#include "gsa/noise.hpp"
#include "gsa/problems.hpp"
#include "gsa/schedules.hpp"
#include "gsa/sgd_engine.hpp"
#include "gsa/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsa {

/// Invalid configuration. `path()` is the dotted field path of the first
/// offending key ("schedule.delta", "trials", ...).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Mode { SA, SGD, GSLLN, Conditions, Sweep };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view name);

enum class OutputFormat { CSV, JSONL };
std::string_view to_string(OutputFormat f);
OutputFormat parse_format(std::string_view name);

struct ProblemConfig {
  std::string kind = "contraction";  ///< contraction | quadratic | quartic
  int dim = 2;
  // contraction
  double rho0 = 0.5;
  Vector target;  ///< default: all ones
  bool rotate = false;
  std::uint64_t rotation_seed = 0;
  NormKind norm = NormKind::L2;
  // quadratic
  Matrix Q;
  Vector p;
  // quartic
  Vector q;
  Vector x_star;
  double eps = 0.01;
  double radius = 1.0;
  double c_max = 1.0;
};

struct GsllnOptions {
  int dim = 1;
  std::vector<double> t_grid{0.5, 1.0, 2.0, 5.0};
  std::vector<ZetaPolicy> zeta{ZetaPolicy::Constant};
  double threshold = 0.02;
};

struct ConditionsOptions {
  int dim = 1;  ///< noise and mask dimension
  std::vector<std::string> checks{"H", "K", "RM", "KWB", "G"};
  std::uint64_t horizon = 100000;  ///< partial sums and sup of witness constants
  TruncationScheme truncation = TruncationScheme::step_scaled();
  GNumericOptions g;
};

/// Post-run checks evaluated under `--assert`.
struct Assertions {
  std::optional<double> final_median_max;
  std::optional<double> median_ratio_min;  ///< median(ratio_from) / median(ratio_to)
  std::uint64_t ratio_from = 0;
  std::uint64_t ratio_to = 0;
  std::optional<std::uint64_t> max_diverged;
  std::optional<bool> gslln_consistent;
  std::map<std::string, std::string> expect;  ///< family -> verdict (conditions)
  [[nodiscard]] bool empty() const;
};

struct ExperimentConfig {
  Mode mode = Mode::SA;
  std::string id = "experiment";
  std::uint64_t trials = 1;
  std::uint64_t base_seed = 0;
  std::uint64_t horizon = 1000;
  std::vector<std::uint64_t> checkpoints;  ///< resolved: decades up to N plus N by default

  ProblemConfig problem;
  std::optional<Vector> x0;  ///< default: zeros
  NoiseModel noise;
  Schedule schedule;
  IncrementSchedule increment;
  MaskPolicy mask;
  Multiplier multiplier;
  GsllnOptions gslln;
  ConditionsOptions conditions;
  Assertions assertions;

  std::string out_dir = ".";
  OutputFormat format = OutputFormat::CSV;
  unsigned workers = 1;

  /// Sweep mode: one child per value, each a complete config.
  std::string sweep_parameter;
  std::vector<nlohmann::json> sweep_values;
  std::vector<ExperimentConfig> children;

  /// Input with every default filled in.
  nlohmann::json resolved;
  /// FNV-1a of the resolved config without the output and workers blocks.
  std::uint64_t hash = 0;
};

/// Parses and validates a JSON config; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Problem instances described by a config block.
SAProblem make_sa_problem(const ProblemConfig& p);
SGDProblem make_sgd_problem(const ProblemConfig& p);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Decades 1, 10, ... below N followed by N.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon);

}  // namespace gsa
