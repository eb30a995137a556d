#include "gsa/sgd_engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>

namespace gsa {

std::string_view to_string(MaskPolicy::Kind k) {
  switch (k) {
    case MaskPolicy::Kind::AllOnes:
      return "all_ones";
    case MaskPolicy::Kind::RoundRobinBlocks:
      return "round_robin";
    case MaskPolicy::Kind::Fixed:
      return "fixed";
    case MaskPolicy::Kind::NoiseDriven:
      return "noise_driven";
  }
  return "all_ones";
}

std::string_view to_string(MaskVerdict v) {
  switch (v) {
    case MaskVerdict::Diverges:
      return "diverges";
    case MaskVerdict::Finite:
      return "finite";
    case MaskVerdict::Empirical:
      return "empirical";
  }
  return "empirical";
}

MaskPolicy MaskPolicy::all_ones(int dim) {
  MaskPolicy m;
  m.kind = Kind::AllOnes;
  m.dim = dim;
  m.validate();
  return m;
}

MaskPolicy MaskPolicy::round_robin(int dim, int block_size) {
  MaskPolicy m;
  m.kind = Kind::RoundRobinBlocks;
  m.dim = dim;
  m.block_size = block_size;
  m.validate();
  return m;
}

MaskPolicy MaskPolicy::fixed_row(std::vector<char> row) {
  MaskPolicy m;
  m.kind = Kind::Fixed;
  m.dim = static_cast<int>(row.size());
  m.fixed = std::move(row);
  m.validate();
  return m;
}

MaskPolicy MaskPolicy::noise_driven(int dim, int recurrence) {
  MaskPolicy m;
  m.kind = Kind::NoiseDriven;
  m.dim = dim;
  m.recurrence = recurrence;
  m.validate();
  return m;
}

int MaskPolicy::period() const {
  return kind == Kind::RoundRobinBlocks ? (dim + block_size - 1) / block_size : 1;
}

std::string MaskPolicy::describe() const {
  switch (kind) {
    case Kind::RoundRobinBlocks:
      return fmt::format("round_robin(bsz={}, period={})", block_size, period());
    case Kind::NoiseDriven:
      return fmt::format("noise_driven(K={})", recurrence);
    default:
      return std::string(to_string(kind));
  }
}

void MaskPolicy::validate() const {
  if (dim < 1) throw InvalidArgument("mask dim must be >= 1");
  if (kind == Kind::RoundRobinBlocks && !(block_size >= 1 && block_size <= dim)) {
    throw InvalidArgument(fmt::format("bsz must lie in [1, {}], got {}", dim, block_size));
  }
  if (kind == Kind::Fixed) {
    if (static_cast<int>(fixed.size()) != dim) throw InvalidArgument("fixed row has wrong size");
    for (char v : fixed) {
      if (v != 0 && v != 1) throw InvalidArgument("fixed row entries must be 0 or 1");
    }
  }
  if (kind == Kind::NoiseDriven && recurrence < 1) {
    throw InvalidArgument("recurrence must be >= 1");
  }
}

MaskState::MaskState(const MaskPolicy& policy)
    : policy_(&policy), parity_(policy.dim, 1), idle_(policy.dim, 0) {}

void MaskState::row(std::uint64_t n, std::vector<char>& psi) {
  const int d = policy_->dim;
  psi.assign(d, 0);
  switch (policy_->kind) {
    case MaskPolicy::Kind::AllOnes:
      std::fill(psi.begin(), psi.end(), 1);
      return;
    case MaskPolicy::Kind::RoundRobinBlocks: {
      const int bsz = policy_->block_size;
      const auto blk = static_cast<int>(n % static_cast<std::uint64_t>(policy_->period()));
      for (int i = blk * bsz; i < std::min(d, (blk + 1) * bsz); ++i) psi[i] = 1;
      return;
    }
    case MaskPolicy::Kind::Fixed:
      psi = policy_->fixed;
      return;
    case MaskPolicy::Kind::NoiseDriven:
      for (int i = 0; i < d; ++i) {
        const bool on = n == 0 || parity_[i] != 0 || idle_[i] >= policy_->recurrence;
        psi[i] = on ? 1 : 0;
        idle_[i] = on ? 0 : idle_[i] + 1;
      }
      return;
  }
}

void MaskState::observe(const Vector& M) {
  if (policy_->kind != MaskPolicy::Kind::NoiseDriven) return;
  for (int i = 0; i < policy_->dim; ++i) parity_[i] ^= M[i] > 0.0 ? 1 : 0;
}

void SGDRunConfig::validate() const {
  if (problem == nullptr) throw InvalidArgument("problem is not set");
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (y0.size() != problem->dim) {
    throw InvalidArgument(
        fmt::format("y0 has dimension {}, problem has {}", y0.size(), problem->dim));
  }
  if (!all_finite(y0)) throw InvalidArgument("y0 must be finite");
  if (noise.dim() != problem->dim || mask.dim != problem->dim) {
    throw InvalidArgument("noise and mask dimensions must match the problem");
  }
  mask.validate();
  if (multiplier.needs_history() && !record.keeps_iterates()) {
    throw InvalidArgument("custom multipliers need the full record policy");
  }
  record.validate(horizon);
}

Vector effective_noise(const Vector& Mp, const Vector& Mpp, double c) {
  return (Mp - Mpp) / (2.0 * c);
}

namespace {

void sgd_update(const Vector& y, Vector& out, Vector& probe, const ScalarMap& F,
                const std::vector<char>& psi, double eta, double c, double xi,
                const Vector& Mp, const Vector& Mpp, std::uint64_t& f_evals) {
  out = y;
  probe = y;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (psi[i] == 0) continue;
    probe[i] = y[i] + c;
    const double fp = F(probe) + xi * Mp[i];
    probe[i] = y[i] - c;
    const double fm = F(probe) + xi * Mpp[i];
    probe[i] = y[i];
    f_evals += 2;
    out[i] = y[i] - eta * (fp - fm) / (2.0 * c);
  }
}

}  // namespace

Vector sgd_step(const Vector& y, const ScalarMap& F, const std::vector<char>& psi,
                double eta, double c, double xi, const Vector& Mp, const Vector& Mpp,
                std::uint64_t* f_evals) {
  if (!(eta > 0.0) || !(c > 0.0)) throw InvalidArgument("eta and c must be positive");
  if (static_cast<Eigen::Index>(psi.size()) != y.size()) {
    throw InvalidArgument("mask row has the wrong size");
  }
  Vector out(y.size());
  Vector probe(y.size());
  std::uint64_t evals = 0;
  sgd_update(y, out, probe, F, psi, eta, c, xi, Mp, Mpp, evals);
  if (f_evals != nullptr) *f_evals += evals;
  return out;
}

Trajectory sgd_run(const SGDRunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const SGDProblem& prob = *cfg.problem;
  const std::uint64_t N = cfg.horizon;
  const int d = prob.dim;

  Trajectory traj;
  traj.run_id = cfg.run_id;
  traj.seed = cfg.seed;

  // First index from which c_n stays within the certified range.
  {
    std::uint64_t n0 = 0;
    bool found = false;
    for (std::uint64_t n = 0; n <= N; ++n) {
      if (cfg.c(n) <= prob.c_max) {
        if (!found) {
          n0 = n;
          found = true;
        }
      } else {
        found = false;
      }
    }
    if (!found) {
      traj.warnings.push_back(
          fmt::format("c_n exceeds c_max = {} at the horizon", prob.c_max));
    } else if (n0 > 0) {
      traj.warnings.push_back(fmt::format("c_n exceeds c_max = {} before n = {}", prob.c_max, n0));
    }
  }

  NoiseStream stream(cfg.noise, cfg.seed);
  MultiplierState mult(cfg.multiplier);
  MaskState mask(cfg.mask);
  std::vector<Vector> history;
  const bool keep_history = cfg.multiplier.needs_history();

  Vector y = cfg.y0;
  Vector next(d);
  Vector probe(d);
  Vector mp(d);
  Vector mpp(d);
  Vector m(d);
  std::vector<char> psi;
  double max_norm = 0.0;

  for (std::uint64_t n = 0;; ++n) {
    max_norm = std::max(max_norm, gsa::norm(y, prob.norm));
    mult.observe(y);
    if (keep_history) history.push_back(y);
    const double xi = mult.value(n, history);
    const double eta = cfg.eta(n);
    const double c = cfg.c(n);
    mask.row(n, psi);

    if (cfg.record.records(n, N)) {
      StepRecord r;
      r.n = n;
      r.step = eta;
      r.err = prob.error(y);
      r.phi = 1.0 + max_norm;
      r.lambda = xi;
      r.increment = c;
      r.active = static_cast<int>(std::count(psi.begin(), psi.end(), 1));
      if (cfg.record.keeps_iterates()) r.x = y;
      traj.records.push_back(std::move(r));
    }
    if (n == N) break;

    stream.next_pair_into(mp, mpp);
    sgd_update(y, next, probe, prob.F, psi, eta, c, xi, mp, mpp, traj.f_evals);
    y.swap(next);
    m = 0.5 * (mp - mpp);
    mask.observe(m);
    if (cfg.on_noise) cfg.on_noise(n, mp, mpp, effective_noise(mp, mpp, c));
    ++traj.steps;
    if (!all_finite(y)) {
      traj.diverged = true;
      traj.diverged_at = n + 1;
      break;
    }
  }

  traj.final_state = y;
  traj.final_phi = 1.0 + max_norm;
  traj.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return traj;
}

bool MaskAudit::holds() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](MaskVerdict v) { return v == MaskVerdict::Diverges; });
}

MaskAudit mask_divergence_audit(const MaskPolicy& mask, const Schedule& eta,
                                std::uint64_t horizon, const NoiseModel* noise,
                                std::uint64_t seed) {
  mask.validate();
  const int d = mask.dim;
  MaskAudit audit;
  audit.partial_sums.assign(d, 0.0);
  audit.verdicts.assign(d, MaskVerdict::Empirical);

  std::vector<char> psi;
  MaskState state(mask);
  std::optional<NoiseStream> stream;
  Vector mp(d);
  Vector mpp(d);
  std::vector<std::uint64_t> active_count(d, 0);
  if (mask.kind == MaskPolicy::Kind::NoiseDriven) {
    if (noise == nullptr || noise->dim() != d) {
      throw InvalidArgument("noise-driven masks are replayed from a noise model of matching dim");
    }
    stream.emplace(*noise, seed);
  }
  for (std::uint64_t n = 0; n < horizon; ++n) {
    state.row(n, psi);
    const double e = eta(n);
    for (int i = 0; i < d; ++i) {
      if (psi[i] != 0) {
        audit.partial_sums[i] += e;
        ++active_count[i];
      }
    }
    if (stream) {
      stream->next_pair_into(mp, mpp);
      state.observe(0.5 * (mp - mpp));
    }
  }

  if (mask.kind == MaskPolicy::Kind::NoiseDriven) return audit;
  // Each active coordinate runs on an arithmetic progression r + kP, whose
  // terms share the exponents of eta's form; inactive ones sum to zero.
  const SeriesVerdict sv = sum_verdict(eta.form());
  for (int i = 0; i < d; ++i) {
    const bool ever_active = mask.kind != MaskPolicy::Kind::Fixed || mask.fixed[i] != 0;
    if (!ever_active) {
      audit.verdicts[i] = MaskVerdict::Finite;
    } else {
      audit.verdicts[i] =
          sv == SeriesVerdict::Diverges ? MaskVerdict::Diverges : MaskVerdict::Finite;
    }
  }
  return audit;
}

}  // namespace gsa
