#pragma once

#include "gsa/noise.hpp"
#include "gsa/problems.hpp"
#include "gsa/schedules.hpp"
#include "gsa/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace gsa {

struct SARunConfig {
  const SAProblem* problem = nullptr;
  Schedule schedule;
  Multiplier multiplier;
  NoiseModel noise;
  std::uint64_t seed = 0;
  Vector x0;
  std::uint64_t horizon = 1;
  RecordSpec record;
  std::string run_id;

  void validate() const;
};

/// In-place update x <- x - beta (G(x) + lambda W). `g` is scratch space.
void sa_update(Vector& x, const VectorMap& G, double beta, double lambda,
               const Vector& W, Vector& g);

/// One step of the recursion from X_n = x: observes ||x|| in `state`,
/// evaluates lambda_n, and returns X_{n+1}. `history` (u_0..u_n) is needed
/// only by custom multipliers.
Vector sa_step(const Vector& x, std::uint64_t n, const VectorMap& G,
               MultiplierState& state, double beta, const Vector& W,
               std::span<const Vector> history = {});

/// Runs the recursion for cfg.horizon steps. A non-finite iterate stops the
/// run with the divergence flag set; the partial trajectory is returned.
Trajectory sa_run(const SARunConfig& cfg);

struct AuditReport {
  bool passed = true;
  std::optional<std::uint64_t> first_violation;
  double worst_ratio = 0.0;  ///< max |lambda_n| / (C1 (1 + max_k ||X_k||))
};

/// Replays recorded lambda_n against C1 (1 + max_{k <= n} ||X_k||).
/// Requires a trajectory recorded with the full policy.
AuditReport multiplier_audit(const Trajectory& traj, double C1,
                             NormKind norm = NormKind::L2);

}  // namespace gsa
