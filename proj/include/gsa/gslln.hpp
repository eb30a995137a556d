#pragma once

#include "gsa/noise.hpp"
#include "gsa/schedules.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace gsa {

/// S <- (1 - t beta) S + t beta zeta W
void gslln_step(Vector& S, double t, double beta, double zeta, const Vector& W);

/// Bounded adapted weight sequences zeta_n (all bounded by 1).
enum class ZetaPolicy {
  Constant,       ///< zeta_n = 1
  SignedBounded,  ///< zeta_n = (-1)^n
  NoiseDriven,    ///< zeta_n = sign of the first coordinate of W_n, zeta_0 = 1
};
std::string_view to_string(ZetaPolicy z);
ZetaPolicy parse_zeta_policy(std::string_view name);

/// Per-run zeta_n evaluation from past draws only.
class ZetaState {
 public:
  explicit ZetaState(ZetaPolicy p) : policy_(p) {}
  [[nodiscard]] double value(std::uint64_t n) const;
  /// Feeds W_{n+1} after step n.
  void observe(const Vector& W);

 private:
  ZetaPolicy policy_;
  double last_sign_ = 1.0;
};

struct GsllnTestSpec {
  NoiseModel noise;
  Schedule rate;
  std::vector<double> t_grid{0.5, 1.0, 2.0, 5.0};
  std::vector<ZetaPolicy> zeta_policies{ZetaPolicy::Constant};
  std::uint64_t trials = 100;
  std::uint64_t horizon = 100000;
  std::vector<std::uint64_t> checkpoints;  ///< default: decades up to the horizon
  double threshold = 0.02;
  std::uint64_t base_seed = 0;
  unsigned workers = 1;

  void validate() const;
  /// Checkpoints actually used (the default grid when empty).
  [[nodiscard]] std::vector<std::uint64_t> resolved_checkpoints() const;
};

struct Quantiles {
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
};

/// Lower-interpolation quantile: sorted[floor(p (n - 1))].
double lower_quantile(std::vector<double> values, double p);
Quantiles quantiles_of(const std::vector<double>& values);

enum class GsllnVerdict { Consistent, Inconsistent };
std::string_view to_string(GsllnVerdict v);

struct GsllnCell {
  double t = 1.0;
  ZetaPolicy zeta = ZetaPolicy::Constant;
  std::vector<std::uint64_t> checkpoints;
  std::vector<Quantiles> abs_s;                 ///< per checkpoint across trials
  std::vector<std::vector<double>> per_trial;   ///< [trial][checkpoint] |S_n|
  Quantiles tail_sup;                           ///< sup_{n >= N/2} |S_n| across trials
  double final_median = 0.0;
  double mid_median = 0.0;
  GsllnVerdict verdict = GsllnVerdict::Inconsistent;
};

struct GsllnReport {
  std::vector<GsllnCell> cells;
  [[nodiscard]] bool all_consistent() const;
};

/// Runs every (t, zeta) cell for `trials` seeds. |S| is the l-inf norm.
/// Trial k of every cell uses the noise seed base_seed ^ k. A cell is
/// consistent iff the final median is below the threshold and below the
/// median at the mid-run checkpoint (largest checkpoint <= N/2).
GsllnReport gslln_empirical_test(const GsllnTestSpec& spec);

/// One trajectory of |S_n| at the given checkpoints; also returns
/// sup_{n >= N/2} |S_n| through `tail_sup` when non-null.
std::vector<double> gslln_trajectory(const NoiseModel& noise, const Schedule& rate, double t,
                                     ZetaPolicy zeta, std::uint64_t seed,
                                     const std::vector<std::uint64_t>& checkpoints,
                                     std::uint64_t horizon, double* tail_sup = nullptr);

/// Deterministic recursion s_{n+1} = (1 - tau_n) s_n + tau_n z_{n+1}, s_0 = 0.
struct KroneckerResult {
  double s_final = 0.0;
  std::vector<std::pair<std::uint64_t, double>> trace;
};
/// `z(k)` returns z_k for k >= 1. The trace holds s_n every `trace_every`
/// steps (none when 0).
KroneckerResult kronecker_oracle(const std::function<double(std::uint64_t)>& tau,
                                 const std::function<double(std::uint64_t)>& z,
                                 std::uint64_t horizon, std::uint64_t trace_every = 0);

/// prod_{j=m}^{n} (1 - tau_j) + sum_{k=m}^{n} tau_k prod_{j=k+1}^{n} (1 - tau_j),
/// which equals 1 identically.
double partition_of_unity(const std::function<double(std::uint64_t)>& tau, std::uint64_t m,
                          std::uint64_t n);

enum class LogCheck { Verified, NotApplicable, Violated };
std::string_view to_string(LogCheck c);

struct LogCheckResult {
  LogCheck status = LogCheck::NotApplicable;
  double slack = 0.0;  ///< 3 log(1 + y) - log(1 + x)
};

/// Given x / log(1 + x)^delta <= y, checks log(1 + x) <= 3 log(1 + y).
LogCheckResult log_inequality_check(double x, double y, double delta);

}  // namespace gsa
