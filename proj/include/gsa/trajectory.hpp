#pragma once

#include "gsa/types.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gsa {

/// Which steps of a run are kept.
struct RecordSpec {
  enum class Policy { Full, ErrorsOnly, Thinned, Checkpoints };

  Policy policy = Policy::ErrorsOnly;
  std::uint64_t every = 1;                 ///< Thinned
  std::vector<std::uint64_t> checkpoints;  ///< Checkpoints, sorted

  static RecordSpec full() { return {Policy::Full, 1, {}}; }
  static RecordSpec errors_only() { return {Policy::ErrorsOnly, 1, {}}; }
  /// Every k-th step plus the final one.
  static RecordSpec thinned(std::uint64_t k);
  static RecordSpec at(std::vector<std::uint64_t> checkpoints);

  [[nodiscard]] bool keeps_iterates() const { return policy == Policy::Full; }
  /// Whether step n of a run with horizon N is recorded.
  [[nodiscard]] bool records(std::uint64_t n, std::uint64_t horizon) const;
  [[nodiscard]] std::uint64_t expected_count(std::uint64_t horizon) const;
  void validate(std::uint64_t horizon) const;
};

/// State of a run at step n, before the update to n + 1.
struct StepRecord {
  std::uint64_t n = 0;
  double step = 0.0;     ///< beta_n (SA) or eta_n (SGD)
  double err = 0.0;      ///< ||X_n - x*|| in the problem norm
  double phi = 1.0;      ///< 1 + max_{k <= n} ||X_k||
  double lambda = 0.0;   ///< multiplier value lambda_n
  double increment = std::numeric_limits<double>::quiet_NaN();  ///< c_n (SGD)
  int active = -1;       ///< active coordinates at step n (SGD)
  std::optional<Vector> x;
};

struct Trajectory {
  std::string run_id;
  std::uint64_t seed = 0;
  std::vector<StepRecord> records;
  Vector final_state;
  std::uint64_t steps = 0;  ///< updates performed
  double final_phi = 1.0;
  bool diverged = false;
  std::uint64_t diverged_at = 0;  ///< index of the first non-finite iterate
  std::uint64_t f_evals = 0;      ///< objective evaluations (SGD)
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;

  /// Record for step n, or nullptr when not recorded.
  [[nodiscard]] const StepRecord* at(std::uint64_t n) const;
};

}  // namespace gsa
