#pragma once

#include "gsa/noise.hpp"
#include "gsa/problems.hpp"
#include "gsa/schedules.hpp"
#include "gsa/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gsa {

/// Which coordinates update at step n (psi_{n,i}).
struct MaskPolicy {
  enum class Kind { AllOnes, RoundRobinBlocks, Fixed, NoiseDriven };

  Kind kind = Kind::AllOnes;
  int dim = 1;
  int block_size = 1;          ///< RoundRobinBlocks
  std::vector<char> fixed;     ///< Fixed: the row used at every step
  int recurrence = 8;          ///< NoiseDriven: forced activation after this many idle steps

  static MaskPolicy all_ones(int dim);
  static MaskPolicy round_robin(int dim, int block_size);
  static MaskPolicy fixed_row(std::vector<char> row);
  static MaskPolicy noise_driven(int dim, int recurrence = 8);

  /// Steps between two activations of a coordinate (RoundRobinBlocks).
  [[nodiscard]] int period() const;
  [[nodiscard]] std::string describe() const;
  void validate() const;
};

std::string_view to_string(MaskPolicy::Kind k);

/// Per-run mask evaluation. For NoiseDriven masks, psi_{n,i} is a running
/// parity of sign(M_{n,i}) with forced activation after `recurrence` idle
/// steps, so it depends on the draws M_1..M_n only. psi_0 = 1.
class MaskState {
 public:
  explicit MaskState(const MaskPolicy& policy);

  /// psi_n; `observe` must have been called with M_n for n >= 1.
  void row(std::uint64_t n, std::vector<char>& psi);
  /// Feeds M_{n+1} = (M'_{n+1} - M''_{n+1}) / 2 after step n.
  void observe(const Vector& M);

 private:
  const MaskPolicy* policy_;
  std::vector<char> parity_;
  std::vector<int> idle_;
};

struct SGDRunConfig {
  const SGDProblem* problem = nullptr;
  Schedule eta;
  IncrementSchedule c;
  MaskPolicy mask;
  Multiplier multiplier;
  NoiseModel noise;
  std::uint64_t seed = 0;
  Vector y0;
  std::uint64_t horizon = 1;
  RecordSpec record;
  std::string run_id;
  /// Optional instrumentation: called after every step with n, M'_{n+1},
  /// M''_{n+1} and the effective noise W_{n+1} = (M' - M'') / (2 c_n).
  std::function<void(std::uint64_t n, const Vector& Mp, const Vector& Mpp,
                     const Vector& W)>
      on_noise;

  void validate() const;
};

/// (M' - M'') / (2c)
Vector effective_noise(const Vector& Mp, const Vector& Mpp, double c);

/// One masked Jacobi step from y = Y_n. Every active coordinate uses the
/// central difference at y; inactive coordinates are copied. Adds the
/// number of F evaluations (2 per active coordinate) to `f_evals`.
Vector sgd_step(const Vector& y, const ScalarMap& F, const std::vector<char>& psi,
                double eta, double c, double xi, const Vector& Mp, const Vector& Mpp,
                std::uint64_t* f_evals = nullptr);

/// Runs the recursion; the error is recorded in the l-inf norm.
Trajectory sgd_run(const SGDRunConfig& cfg);

/// Verdict of the mask divergence condition sum_n psi_{n,i} eta_n = inf.
enum class MaskVerdict { Diverges, Finite, Empirical };
std::string_view to_string(MaskVerdict v);

struct MaskAudit {
  std::vector<double> partial_sums;  ///< per coordinate, n < horizon
  std::vector<MaskVerdict> verdicts;
  [[nodiscard]] bool holds() const;
};

/// Per-coordinate partial sums of psi_{n,i} eta_n. Deterministic masks get an
/// integral-test verdict on the active subsequence; NoiseDriven masks are
/// replayed from (noise, seed) and get an empirical verdict.
MaskAudit mask_divergence_audit(const MaskPolicy& mask, const Schedule& eta,
                                std::uint64_t horizon, const NoiseModel* noise = nullptr,
                                std::uint64_t seed = 0);

}  // namespace gsa
