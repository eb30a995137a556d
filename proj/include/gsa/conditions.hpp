#pragma once

#include "gsa/noise.hpp"
#include "gsa/schedules.hpp"
#include "gsa/sgd_engine.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gsa {

/// How a piece of evidence was obtained. Only Analytic, Quadrature and
/// TrendFit may back a "holds" or "fails" verdict.
enum class EvidenceBasis { Analytic, Quadrature, TrendFit, Diagnostic, None };
std::string_view to_string(EvidenceBasis b);
bool is_backed(EvidenceBasis b);

struct Evidence {
  std::string clause;  ///< e.g. "moment", "L2", "U8: sum = inf"
  std::string name;    ///< what `value` is
  double value = 0.0;
  EvidenceBasis basis = EvidenceBasis::None;
  ClauseStatus status = ClauseStatus::Inconclusive;
};

struct ConditionReport {
  std::string family;  ///< H1..H5, K1..K5, G, RM, KWB, V3x
  ClauseStatus verdict = ClauseStatus::Inconclusive;
  std::vector<Evidence> evidence;     ///< clause evidence
  std::vector<Evidence> diagnostics;  ///< informative only, never decisive
  std::string deciding_clause;
  std::optional<double> alpha;  ///< moment witness
  std::optional<double> delta;  ///< log-moment witness
  std::optional<double> D;      ///< rate constant witness

  /// Every clause carries a backed basis.
  [[nodiscard]] bool fully_backed() const;
};

/// A positive sequence together with its asymptotic form.
struct RateSeq {
  std::function<double(std::uint64_t)> value;
  PowerLogForm form;
  std::string label;
};
RateSeq rate_of(const Schedule& s);
/// theta_n = eta_n / c_n
RateSeq ratio_of(const Schedule& eta, const IncrementSchedule& c);

/// Reports for H1..H5 on (W_n, beta_n). Each family also carries the rate
/// premise beta_n -> 0, sum beta_n = inf. Witnesses: the smallest alpha in
/// [1, 2) meeting the rate bound (H2), the largest delta in (0, 1] meeting
/// the rate bound (H3), and alpha = 2 or else the smallest summable alpha
/// in (1, 2] (H4, H5). Moment sets are downward closed and rate sets upward
/// closed, so a failed witness is a proof of failure.
std::vector<ConditionReport> check_H(const NoiseModel& model, const Schedule& rate,
                                     std::uint64_t horizon = 100000);

/// Reports for K1..K5 on the pair noise and theta_n = eta_n / c_n. K1..K3
/// use moments of M', K4..K5 those of M = (M' - M'') / 2.
std::vector<ConditionReport> check_K(const NoiseModel& model, const Schedule& eta,
                                     const IncrementSchedule& c,
                                     std::uint64_t horizon = 100000);

/// Compares K reports with H reports family by family (verdict and
/// witnesses). Writes the first mismatch to `why` when non-null.
bool substitution_consistent(const std::vector<ConditionReport>& k_reports,
                             const std::vector<ConditionReport>& h_reports,
                             std::string* why = nullptr);

/// Truncation sets A_{n+1} for the numeric G check, as thresholds on |W|.
struct TruncationScheme {
  enum class Rule { StepScaled, MomentScaled, LogScaled };
  Rule rule = Rule::StepScaled;
  double alpha = 1.5;  ///< MomentScaled: {|W|^alpha <= n}
  double delta = 1.0;  ///< LogScaled: {|W| / log(1 + |W|)^delta <= n}

  static TruncationScheme step_scaled() { return {Rule::StepScaled, 1.5, 1.0}; }
  static TruncationScheme moment_scaled(double alpha) { return {Rule::MomentScaled, alpha, 1.0}; }
  static TruncationScheme log_scaled(double delta) { return {Rule::LogScaled, 1.5, delta}; }

  /// T such that A_{n+1} = {|W_{n+1}| <= T}.
  [[nodiscard]] double threshold(std::uint64_t n, double beta_n) const;
  [[nodiscard]] std::string describe() const;
};

/// Per-coordinate truncated quantities at threshold T (bounds for the
/// martingale family, uniform over the past-measurable scale).
struct GTerms {
  double p_out = 0.0;   ///< P(|W| > T)
  double v = 0.0;       ///< E[W 1{|W| <= T}]
  double second = 0.0;  ///< E[W^2 1{|W| <= T}]
};
/// Quadrature of the truncated terms; nullopt for unsupported models.
std::optional<GTerms> g_terms(const NoiseModel& model, double T);

/// Monte-Carlo estimate of E[W_1 1{|W_1| <= T}] with its standard error.
std::pair<double, double> truncated_mean_mc(const NoiseModel& model, double T,
                                            std::uint64_t samples, std::uint64_t seed);

struct GNumericOptions {
  std::uint64_t horizon = 1000000;
  int grid_points = 25;
  double margin = 0.05;  ///< decay exponent must clear 1 by this much
};

/// Series G1 (sum P(A^c)), G2 (sum beta |V|), G3 (sum beta^2 E[W^2 1_A])
/// and the limit G2a (V -> 0), from quadrature on a geometric n-grid and a
/// log-log trend fit of the tail terms.
ConditionReport check_G_numeric(const NoiseModel& model, const Schedule& rate,
                                const TruncationScheme& scheme,
                                const GNumericOptions& opts = {});

/// Partial sums of sum_n beta_n W_{n+1,1} along one seeded path, sampled at
/// `checkpoints`. Diagnostic only.
std::vector<std::pair<std::uint64_t, double>> g7_partial_sums(
    const NoiseModel& model, const Schedule& rate, std::uint64_t seed,
    const std::vector<std::uint64_t>& checkpoints);

ConditionReport rm_report(const Schedule& s, std::uint64_t horizon = 100000);
ConditionReport kwb_report(const Schedule& eta, const IncrementSchedule& c,
                           std::uint64_t horizon = 100000);
ConditionReport v3x_report(const MaskPolicy& mask, const Schedule& eta,
                           std::uint64_t horizon, const NoiseModel* noise = nullptr,
                           std::uint64_t seed = 0);

}  // namespace gsa
