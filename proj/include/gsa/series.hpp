#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

namespace gsa {

/// Asymptotic shape coef * n^(-power) * (log n)^(-log_power) of a positive
/// sequence. Closed under products, quotients and real powers, which covers
/// every series the condition checkers need (beta^2, eta/c, eta*c, ...).
struct PowerLogForm {
  double coef = 1.0;
  double power = 0.0;
  double log_power = 0.0;

  [[nodiscard]] PowerLogForm pow(double k) const;
  [[nodiscard]] bool is_zero() const { return coef == 0.0; }
};

PowerLogForm operator*(const PowerLogForm& a, const PowerLogForm& b);
PowerLogForm operator/(const PowerLogForm& a, const PowerLogForm& b);

/// Exponent comparisons are exact up to this tolerance, so that a
/// configured gamma of 0.6666666666666666 matches 1/1.5.
inline constexpr double kExponentTol = 1e-9;

enum class SeriesVerdict { Diverges, Converges, Inconclusive };
std::string_view to_string(SeriesVerdict v);

/// Bertrand integral test on the form.
SeriesVerdict sum_verdict(const PowerLogForm& form);
bool tends_to_zero(const PowerLogForm& form);
/// True when the sequence stays bounded as n grows.
bool is_bounded(const PowerLogForm& form);
/// Estimate of the integral of the form over [n, inf); +inf when divergent.
double tail_integral(const PowerLogForm& form, double n);

struct SeriesReport {
  double partial_sum = 0.0;     ///< sum of terms n = 0 .. horizon-1
  double tail_estimate = 0.0;   ///< integral-comparison tail, finite only when converging
  SeriesVerdict verdict = SeriesVerdict::Inconclusive;
  std::optional<PowerLogForm> form;
};

/// Partial sum of `term` plus a tail verdict from `form`. Without a form the
/// verdict is Inconclusive: a truncated sum never certifies convergence.
SeriesReport analyze_series(const std::function<double(std::uint64_t)>& term,
                            const std::optional<PowerLogForm>& form,
                            std::uint64_t horizon);

}  // namespace gsa
