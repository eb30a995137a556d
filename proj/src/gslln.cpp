#include "gsa/gslln.hpp"

#include "gsa/parallel.hpp"
#include "gsa/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace gsa {

void gslln_step(Vector& S, double t, double beta, double zeta, const Vector& W) {
  const double tb = t * beta;
  S = (1.0 - tb) * S + (tb * zeta) * W;
}

std::string_view to_string(ZetaPolicy z) {
  switch (z) {
    case ZetaPolicy::Constant:
      return "constant";
    case ZetaPolicy::SignedBounded:
      return "signed_bounded";
    case ZetaPolicy::NoiseDriven:
      return "noise_driven";
  }
  return "constant";
}

ZetaPolicy parse_zeta_policy(std::string_view name) {
  for (auto z : {ZetaPolicy::Constant, ZetaPolicy::SignedBounded, ZetaPolicy::NoiseDriven}) {
    if (to_string(z) == name) return z;
  }
  throw InvalidArgument(fmt::format("unknown zeta policy '{}'", name));
}

double ZetaState::value(std::uint64_t n) const {
  switch (policy_) {
    case ZetaPolicy::Constant:
      return 1.0;
    case ZetaPolicy::SignedBounded:
      return n % 2 == 0 ? 1.0 : -1.0;
    case ZetaPolicy::NoiseDriven:
      return last_sign_;
  }
  return 1.0;
}

void ZetaState::observe(const Vector& W) { last_sign_ = W[0] < 0.0 ? -1.0 : 1.0; }

std::string_view to_string(GsllnVerdict v) {
  return v == GsllnVerdict::Consistent ? "consistent" : "inconsistent";
}

std::string_view to_string(LogCheck c) {
  switch (c) {
    case LogCheck::Verified:
      return "verified";
    case LogCheck::NotApplicable:
      return "not_applicable";
    case LogCheck::Violated:
      return "violated";
  }
  return "not_applicable";
}

void GsllnTestSpec::validate() const {
  if (t_grid.empty()) throw InvalidArgument("t_grid is empty");
  for (double t : t_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("t_grid values must be positive");
  }
  if (zeta_policies.empty()) throw InvalidArgument("zeta_policies is empty");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw InvalidArgument("checkpoints must be sorted");
  }
  if (!checkpoints.empty() && checkpoints.back() > horizon) {
    throw InvalidArgument("checkpoints must not exceed the horizon");
  }
}

std::vector<std::uint64_t> GsllnTestSpec::resolved_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 10; c < horizon; c *= 10) out.push_back(c);
  out.push_back(horizon);
  return out;
}

double lower_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(values.size() - 1)));
  return values[std::min(idx, values.size() - 1)];
}

Quantiles quantiles_of(const std::vector<double>& values) {
  return {lower_quantile(values, 0.1), lower_quantile(values, 0.5), lower_quantile(values, 0.9)};
}

bool GsllnReport::all_consistent() const {
  return std::all_of(cells.begin(), cells.end(),
                     [](const GsllnCell& c) { return c.verdict == GsllnVerdict::Consistent; });
}

std::vector<double> gslln_trajectory(const NoiseModel& noise, const Schedule& rate, double t,
                                     ZetaPolicy zeta, std::uint64_t seed,
                                     const std::vector<std::uint64_t>& checkpoints,
                                     std::uint64_t horizon, double* tail_sup) {
  NoiseStream stream(noise, seed);
  ZetaState zs(zeta);
  Vector S = Vector::Zero(noise.dim());
  Vector w(noise.dim());
  std::vector<double> out;
  out.reserve(checkpoints.size());
  std::size_t next_cp = 0;
  double sup = 0.0;
  const std::uint64_t half = horizon / 2;
  for (std::uint64_t n = 0;; ++n) {
    const double abs_s = S.cwiseAbs().maxCoeff();
    if (n >= half) sup = std::max(sup, abs_s);
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == n) {
      out.push_back(abs_s);
      ++next_cp;
    }
    if (n == horizon) break;
    stream.next_into(w);
    gslln_step(S, t, rate(n), zs.value(n), w);
    zs.observe(w);
  }
  if (tail_sup != nullptr) *tail_sup = sup;
  return out;
}

GsllnReport gslln_empirical_test(const GsllnTestSpec& spec) {
  spec.validate();
  const auto cps = spec.resolved_checkpoints();
  GsllnReport rep;
  for (double t : spec.t_grid) {
    for (ZetaPolicy z : spec.zeta_policies) {
      GsllnCell cell;
      cell.t = t;
      cell.zeta = z;
      cell.checkpoints = cps;
      cell.per_trial.assign(spec.trials, {});
      rep.cells.push_back(std::move(cell));
    }
  }

  const std::uint64_t n_cells = rep.cells.size();
  std::vector<double> sups(n_cells * spec.trials, 0.0);
  parallel_for(n_cells * spec.trials, spec.workers, [&](std::uint64_t job) {
    const std::uint64_t c = job / spec.trials;
    const std::uint64_t k = job % spec.trials;
    GsllnCell& cell = rep.cells[c];
    cell.per_trial[k] = gslln_trajectory(spec.noise, spec.rate, cell.t, cell.zeta,
                                         trial_seed(spec.base_seed, k), cps, spec.horizon,
                                         &sups[job]);
  });

  // Mid-run checkpoint: largest one at or below N/2, else the first.
  std::size_t mid = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] <= spec.horizon / 2) mid = i;
  }
  for (std::uint64_t c = 0; c < n_cells; ++c) {
    GsllnCell& cell = rep.cells[c];
    std::vector<double> column(spec.trials);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      for (std::uint64_t k = 0; k < spec.trials; ++k) column[k] = cell.per_trial[k][i];
      cell.abs_s.push_back(quantiles_of(column));
    }
    std::vector<double> tail(sups.begin() + static_cast<std::ptrdiff_t>(c * spec.trials),
                             sups.begin() + static_cast<std::ptrdiff_t>((c + 1) * spec.trials));
    cell.tail_sup = quantiles_of(tail);
    cell.final_median = cell.abs_s.back().q50;
    cell.mid_median = cell.abs_s[mid].q50;
    const bool decays = cell.final_median < cell.mid_median || cell.final_median == 0.0;
    cell.verdict = cell.final_median < spec.threshold && decays ? GsllnVerdict::Consistent
                                                                : GsllnVerdict::Inconsistent;
  }
  return rep;
}

KroneckerResult kronecker_oracle(const std::function<double(std::uint64_t)>& tau,
                                 const std::function<double(std::uint64_t)>& z,
                                 std::uint64_t horizon, std::uint64_t trace_every) {
  KroneckerResult r;
  double s = 0.0;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    if (trace_every != 0 && n % trace_every == 0) r.trace.emplace_back(n, s);
    const double t = tau(n);
    s = (1.0 - t) * s + t * z(n + 1);
  }
  if (trace_every != 0) r.trace.emplace_back(horizon, s);
  r.s_final = s;
  return r;
}

double partition_of_unity(const std::function<double(std::uint64_t)>& tau, std::uint64_t m,
                          std::uint64_t n) {
  if (m > n) throw InvalidArgument("partition_of_unity needs m <= n");
  double prod = 1.0;  // prod_{j=k+1}^{n} (1 - tau_j)
  double sum = 0.0;
  for (std::uint64_t k = n + 1; k-- > m;) {
    const double t = tau(k);
    sum += t * prod;
    prod *= 1.0 - t;
  }
  return prod + sum;
}

LogCheckResult log_inequality_check(double x, double y, double delta) {
  if (!(x > 0.0) || !(y > 0.0) || !(delta >= 0.0 && delta <= 1.0)) {
    return {LogCheck::NotApplicable, 0.0};
  }
  const double lhs = x / std::pow(std::log1p(x), delta);
  if (lhs > y * (1.0 + 1e-12)) return {LogCheck::NotApplicable, 0.0};
  LogCheckResult r;
  r.slack = 3.0 * std::log1p(y) - std::log1p(x);
  r.status = r.slack >= 0.0 ? LogCheck::Verified : LogCheck::Violated;
  return r;
}

}  // namespace gsa
