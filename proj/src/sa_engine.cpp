#include "gsa/sa_engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <vector>

namespace gsa {

void SARunConfig::validate() const {
  if (problem == nullptr) throw InvalidArgument("problem is not set");
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (x0.size() != problem->dim) {
    throw InvalidArgument(
        fmt::format("x0 has dimension {}, problem has {}", x0.size(), problem->dim));
  }
  if (!all_finite(x0)) throw InvalidArgument("x0 must be finite");
  if (noise.dim() != problem->dim) {
    throw InvalidArgument(
        fmt::format("noise has dimension {}, problem has {}", noise.dim(), problem->dim));
  }
  if (multiplier.needs_history() && !record.keeps_iterates()) {
    throw InvalidArgument("custom multipliers need the full record policy");
  }
  record.validate(horizon);
}

void sa_update(Vector& x, const VectorMap& G, double beta, double lambda,
               const Vector& W, Vector& g) {
  G(x, g);
  x -= beta * (g + lambda * W);
}

Vector sa_step(const Vector& x, std::uint64_t n, const VectorMap& G,
               MultiplierState& state, double beta, const Vector& W,
               std::span<const Vector> history) {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  state.observe(x);
  const double lambda = state.value(n, history);
  Vector next = x;
  Vector g(x.size());
  sa_update(next, G, beta, lambda, W, g);
  return next;
}

Trajectory sa_run(const SARunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const SAProblem& prob = *cfg.problem;
  const std::uint64_t N = cfg.horizon;

  Trajectory traj;
  traj.run_id = cfg.run_id;
  traj.seed = cfg.seed;
  if (cfg.record.policy != RecordSpec::Policy::Checkpoints) {
    traj.records.reserve(cfg.record.expected_count(N));
  }

  NoiseStream stream(cfg.noise, cfg.seed);
  MultiplierState mult(cfg.multiplier);
  std::vector<Vector> history;
  const bool keep_history = cfg.multiplier.needs_history();

  Vector x = cfg.x0;
  Vector w(prob.dim);
  Vector g(prob.dim);
  double max_norm = 0.0;

  for (std::uint64_t n = 0;; ++n) {
    max_norm = std::max(max_norm, gsa::norm(x, prob.norm));
    mult.observe(x);
    if (keep_history) history.push_back(x);
    const double lambda = mult.value(n, history);
    const double beta = cfg.schedule(n);

    if (cfg.record.records(n, N)) {
      StepRecord r;
      r.n = n;
      r.step = beta;
      r.err = prob.error(x);
      r.phi = 1.0 + max_norm;
      r.lambda = lambda;
      if (cfg.record.keeps_iterates()) r.x = x;
      traj.records.push_back(std::move(r));
    }
    if (n == N) break;

    stream.next_into(w);
    sa_update(x, prob.G_into, beta, lambda, w, g);
    ++traj.steps;
    if (!all_finite(x)) {
      traj.diverged = true;
      traj.diverged_at = n + 1;
      break;
    }
  }

  traj.final_state = x;
  traj.final_phi = 1.0 + max_norm;
  traj.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return traj;
}

AuditReport multiplier_audit(const Trajectory& traj, double C1, NormKind norm) {
  AuditReport rep;
  double max_norm = 0.0;
  std::uint64_t expected = 0;
  for (const auto& r : traj.records) {
    if (!r.x || r.n != expected) {
      throw InvalidArgument("multiplier_audit needs a trajectory with every iterate recorded");
    }
    ++expected;
    max_norm = std::max(max_norm, gsa::norm(*r.x, norm));
    const double bound = C1 * (1.0 + max_norm);
    const double ratio = std::abs(r.lambda) / bound;
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    if (std::abs(r.lambda) > bound && rep.passed) {
      rep.passed = false;
      rep.first_violation = r.n;
    }
  }
  return rep;
}

}  // namespace gsa
