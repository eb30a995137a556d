#pragma once

#include "gsa/series.hpp"
#include "gsa/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace gsa {

/// Step-size sequence beta_n (or eta_n) with closed-form evaluation.
class Schedule {
 public:
  enum class Kind { Harmonic, PowerLaw, LogTempered, Constant };

  /// harmonic(1)
  Schedule() : Schedule(Kind::Harmonic, 1.0, 1.0, 0.0) {}

  /// beta_n = D / (n + 1)
  static Schedule harmonic(double D = 1.0);
  /// beta_n = D * n^(-gamma), beta_0 = D; gamma in (0, 1]
  static Schedule power_law(double D, double gamma);
  /// beta_n = D / (n * log(1 + n)^delta), beta_0 = D; delta in (0, 1]
  static Schedule log_tempered(double D, double delta);
  /// beta_n = D for every n. Violates beta_n -> 0; for negative controls.
  static Schedule constant(double D);

  [[nodiscard]] double operator()(std::uint64_t n) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double D() const { return D_; }
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] double delta() const { return delta_; }
  [[nodiscard]] PowerLogForm form() const;
  [[nodiscard]] std::string describe() const;

 private:
  Schedule(Kind kind, double D, double gamma, double delta)
      : kind_(kind), D_(D), gamma_(gamma), delta_(delta) {}

  Kind kind_;
  double D_;
  double gamma_;
  double delta_;
};

/// Finite-difference half-width c_n.
class IncrementSchedule {
 public:
  enum class Kind { LogPower, PowerLaw, Constant };

  /// log_power(1)
  IncrementSchedule() : IncrementSchedule(Kind::LogPower, 1.0) {}

  /// c_n = 1 / log(2 + n)^kappa; kappa in (0, 1]
  static IncrementSchedule log_power(double kappa);
  /// c_n = n^(-gamma), c_0 = 1; gamma > 0
  static IncrementSchedule power_law(double gamma);
  /// c_n = value. Does not tend to zero.
  static IncrementSchedule constant(double value);

  [[nodiscard]] double operator()(std::uint64_t n) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double parameter() const { return param_; }
  [[nodiscard]] PowerLogForm form() const;
  [[nodiscard]] std::string describe() const;

 private:
  IncrementSchedule(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

/// History-dependent noise multiplier lambda_n(u_0, ..., u_n) with
/// |lambda_n| <= C1 (1 + max_k ||u_k||).
class Multiplier {
 public:
  enum class Kind { Constant, NormTracking, SignedBounded, Custom };

  /// Full-history callable used by Custom multipliers.
  using HistoryFn =
      std::function<double(std::uint64_t n, std::span<const Vector> history)>;

  /// constant(1)
  Multiplier() : Multiplier(constant(1.0)) {}

  static Multiplier constant(double lambda);
  static Multiplier norm_tracking(double C1, NormKind norm = NormKind::L2);
  static Multiplier signed_bounded(double C1);
  /// Arbitrary multiplier; engines keep the full iterate history for it.
  /// C1 is the bound the caller claims, used only for reporting.
  static Multiplier custom(HistoryFn fn, double C1,
                           NormKind norm = NormKind::L2);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double C1() const { return C1_; }
  [[nodiscard]] NormKind norm() const { return norm_; }
  [[nodiscard]] bool needs_history() const { return kind_ == Kind::Custom; }
  [[nodiscard]] const HistoryFn& history_fn() const { return fn_; }
  [[nodiscard]] std::string describe() const;

 private:
  Multiplier(Kind kind, double C1, NormKind norm, HistoryFn fn = {})
      : kind_(kind), C1_(C1), norm_(norm), fn_(std::move(fn)) {}

  Kind kind_;
  double C1_;
  NormKind norm_;
  HistoryFn fn_;
};

/// Per-trajectory evaluation state of a Multiplier. `observe` must be called
/// with u_n before `value(n)`; the running max is kept incrementally.
class MultiplierState {
 public:
  explicit MultiplierState(const Multiplier& m) : m_(&m) {}

  void observe(const Eigen::Ref<const Vector>& u);
  /// lambda_n given u_0..u_n observed. `history` is consulted only by
  /// Custom multipliers and must then hold u_0..u_n.
  [[nodiscard]] double value(std::uint64_t n,
                             std::span<const Vector> history = {}) const;
  [[nodiscard]] double running_max() const { return running_max_; }
  [[nodiscard]] std::uint64_t observed() const { return observed_; }

 private:
  const Multiplier* m_;
  double running_max_ = 0.0;
  std::uint64_t observed_ = 0;
};

/// lambda_n for a complete history u_0..u_n (n = history.size() - 1).
double eval_multiplier(const Multiplier& m, std::span<const Vector> history);

/// Robbins-Monro summability report for beta.
struct RmReport {
  SeriesReport sum_beta;
  SeriesReport sum_beta_sq;
  bool tends_to_zero = false;
};
RmReport check_rm_conditions(const Schedule& s, std::uint64_t horizon);

enum class ClauseStatus { Holds, Fails, Inconclusive };
std::string_view to_string(ClauseStatus s);

/// Kiefer-Wolfowitz-Blum conditions: c_n -> 0, sum (eta/c)^2 < inf,
/// sum eta*c < inf, sum eta = inf.
struct KwbReport {
  bool c_tends_to_zero = false;
  SeriesReport sum_ratio_sq;
  SeriesReport sum_eta_c;
  SeriesReport sum_eta;
  ClauseStatus verdict = ClauseStatus::Inconclusive;
  std::string failed_clause;  ///< first failing clause, empty when none
};
KwbReport check_kwb_preset(const Schedule& eta, const IncrementSchedule& c,
                           std::uint64_t horizon);

}  // namespace gsa
