#include "gsa/schedules.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace gsa {

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L2:
      return "l2";
    case NormKind::LInf:
      return "linf";
    case NormKind::L1:
      return "l1";
  }
  return "l2";
}

NormKind parse_norm(std::string_view name) {
  if (name == "l2") return NormKind::L2;
  if (name == "linf") return NormKind::LInf;
  if (name == "l1") return NormKind::L1;
  throw InvalidArgument(fmt::format("unknown norm '{}'", name));
}

namespace {

void require_positive(double v, std::string_view name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("{} must be positive and finite, got {}", name, v));
  }
}

void require_unit_exponent(double v, std::string_view name) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw InvalidArgument(fmt::format("{} must lie in (0, 1], got {}", name, v));
  }
}

}  // namespace

// ---------------------------------------------------------------- Schedule

Schedule Schedule::harmonic(double D) {
  require_positive(D, "D");
  return {Kind::Harmonic, D, 1.0, 0.0};
}

Schedule Schedule::power_law(double D, double gamma) {
  require_positive(D, "D");
  require_unit_exponent(gamma, "gamma");
  return {Kind::PowerLaw, D, gamma, 0.0};
}

Schedule Schedule::log_tempered(double D, double delta) {
  require_positive(D, "D");
  require_unit_exponent(delta, "delta");
  return {Kind::LogTempered, D, 1.0, delta};
}

Schedule Schedule::constant(double D) {
  require_positive(D, "D");
  return {Kind::Constant, D, 0.0, 0.0};
}

double Schedule::operator()(std::uint64_t n) const {
  const auto x = static_cast<double>(n);
  switch (kind_) {
    case Kind::Harmonic:
      return D_ / (x + 1.0);
    case Kind::PowerLaw:
      return n == 0 ? D_ : D_ * std::pow(x, -gamma_);
    case Kind::LogTempered:
      return n == 0 ? D_ : D_ / (x * std::pow(std::log1p(x), delta_));
    case Kind::Constant:
      return D_;
  }
  return D_;
}

PowerLogForm Schedule::form() const {
  switch (kind_) {
    case Kind::Harmonic:
      return {D_, 1.0, 0.0};
    case Kind::PowerLaw:
      return {D_, gamma_, 0.0};
    case Kind::LogTempered:
      return {D_, 1.0, delta_};
    case Kind::Constant:
      return {D_, 0.0, 0.0};
  }
  return {D_, 0.0, 0.0};
}

std::string Schedule::describe() const {
  switch (kind_) {
    case Kind::Harmonic:
      return fmt::format("harmonic(D={})", D_);
    case Kind::PowerLaw:
      return fmt::format("power_law(D={}, gamma={})", D_, gamma_);
    case Kind::LogTempered:
      return fmt::format("log_tempered(D={}, delta={})", D_, delta_);
    case Kind::Constant:
      return fmt::format("constant({})", D_);
  }
  return "schedule";
}

// ------------------------------------------------------- IncrementSchedule

IncrementSchedule IncrementSchedule::log_power(double kappa) {
  require_unit_exponent(kappa, "kappa");
  return {Kind::LogPower, kappa};
}

IncrementSchedule IncrementSchedule::power_law(double gamma) {
  require_positive(gamma, "gamma");
  return {Kind::PowerLaw, gamma};
}

IncrementSchedule IncrementSchedule::constant(double value) {
  require_positive(value, "value");
  return {Kind::Constant, value};
}

double IncrementSchedule::operator()(std::uint64_t n) const {
  const auto x = static_cast<double>(n);
  switch (kind_) {
    case Kind::LogPower:
      return std::pow(std::log(2.0 + x), -param_);
    case Kind::PowerLaw:
      return n == 0 ? 1.0 : std::pow(x, -param_);
    case Kind::Constant:
      return param_;
  }
  return param_;
}

PowerLogForm IncrementSchedule::form() const {
  switch (kind_) {
    case Kind::LogPower:
      return {1.0, 0.0, param_};
    case Kind::PowerLaw:
      return {1.0, param_, 0.0};
    case Kind::Constant:
      return {param_, 0.0, 0.0};
  }
  return {param_, 0.0, 0.0};
}

std::string IncrementSchedule::describe() const {
  switch (kind_) {
    case Kind::LogPower:
      return fmt::format("log_power(kappa={})", param_);
    case Kind::PowerLaw:
      return fmt::format("power_law(gamma={})", param_);
    case Kind::Constant:
      return fmt::format("constant({})", param_);
  }
  return "increment";
}

// -------------------------------------------------------------- Multiplier

Multiplier Multiplier::constant(double lambda) {
  if (!std::isfinite(lambda)) throw InvalidArgument("lambda must be finite");
  return {Kind::Constant, std::abs(lambda), NormKind::L2,
          [lambda](std::uint64_t, std::span<const Vector>) { return lambda; }};
}

Multiplier Multiplier::norm_tracking(double C1, NormKind norm) {
  require_positive(C1, "C1");
  return {Kind::NormTracking, C1, norm};
}

Multiplier Multiplier::signed_bounded(double C1) {
  require_positive(C1, "C1");
  return {Kind::SignedBounded, C1, NormKind::L2};
}

Multiplier Multiplier::custom(HistoryFn fn, double C1, NormKind norm) {
  if (!fn) throw InvalidArgument("custom multiplier needs a callable");
  return {Kind::Custom, C1, norm, std::move(fn)};
}

std::string Multiplier::describe() const {
  switch (kind_) {
    case Kind::Constant:
      return fmt::format("constant({})", C1_);
    case Kind::NormTracking:
      return fmt::format("norm_tracking(C1={}, norm={})", C1_, to_string(norm_));
    case Kind::SignedBounded:
      return fmt::format("signed_bounded(C1={})", C1_);
    case Kind::Custom:
      return fmt::format("custom(C1={})", C1_);
  }
  return "multiplier";
}

void MultiplierState::observe(const Eigen::Ref<const Vector>& u) {
  running_max_ = std::max(running_max_, gsa::norm(u, m_->norm()));
  ++observed_;
}

double MultiplierState::value(std::uint64_t n,
                              std::span<const Vector> history) const {
  switch (m_->kind()) {
    case Multiplier::Kind::Constant:
      return m_->history_fn()(n, history);
    case Multiplier::Kind::NormTracking:
      return m_->C1() * (1.0 + running_max_);
    case Multiplier::Kind::SignedBounded:
      return n % 2 == 0 ? m_->C1() : -m_->C1();
    case Multiplier::Kind::Custom:
      return m_->history_fn()(n, history);
  }
  return 0.0;
}

double eval_multiplier(const Multiplier& m, std::span<const Vector> history) {
  if (history.empty()) throw InvalidArgument("multiplier history is empty");
  MultiplierState state(m);
  for (const auto& u : history) state.observe(u);
  return state.value(history.size() - 1, history);
}

// ------------------------------------------------------------ summability

RmReport check_rm_conditions(const Schedule& s, std::uint64_t horizon) {
  RmReport r;
  const PowerLogForm f = s.form();
  r.tends_to_zero = tends_to_zero(f);
  r.sum_beta = analyze_series([&](std::uint64_t n) { return s(n); }, f, horizon);
  r.sum_beta_sq = analyze_series(
      [&](std::uint64_t n) {
        const double b = s(n);
        return b * b;
      },
      f.pow(2.0), horizon);
  return r;
}

std::string_view to_string(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::Holds:
      return "holds";
    case ClauseStatus::Fails:
      return "fails";
    case ClauseStatus::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

KwbReport check_kwb_preset(const Schedule& eta, const IncrementSchedule& c,
                           std::uint64_t horizon) {
  KwbReport r;
  const PowerLogForm fe = eta.form();
  const PowerLogForm fc = c.form();
  r.c_tends_to_zero = tends_to_zero(fc);
  r.sum_ratio_sq = analyze_series(
      [&](std::uint64_t n) {
        const double q = eta(n) / c(n);
        return q * q;
      },
      (fe / fc).pow(2.0), horizon);
  r.sum_eta_c = analyze_series([&](std::uint64_t n) { return eta(n) * c(n); },
                               fe * fc, horizon);
  r.sum_eta = analyze_series([&](std::uint64_t n) { return eta(n); }, fe, horizon);

  const bool any_inconclusive =
      r.sum_ratio_sq.verdict == SeriesVerdict::Inconclusive ||
      r.sum_eta_c.verdict == SeriesVerdict::Inconclusive ||
      r.sum_eta.verdict == SeriesVerdict::Inconclusive;
  if (!r.c_tends_to_zero) {
    r.failed_clause = "c_n -> 0";
  } else if (r.sum_ratio_sq.verdict == SeriesVerdict::Diverges) {
    r.failed_clause = "sum (eta/c)^2 < inf";
  } else if (r.sum_eta_c.verdict == SeriesVerdict::Diverges) {
    r.failed_clause = "sum eta*c < inf";
  } else if (r.sum_eta.verdict == SeriesVerdict::Converges) {
    r.failed_clause = "sum eta = inf";
  }
  if (!r.failed_clause.empty()) {
    r.verdict = ClauseStatus::Fails;
  } else {
    r.verdict = any_inconclusive ? ClauseStatus::Inconclusive : ClauseStatus::Holds;
  }
  return r;
}

}  // namespace gsa
