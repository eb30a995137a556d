#pragma once

#include <functional>
#include <limits>

namespace gsa::quad {

/// Log of a nonnegative integrand on the positive half-line, expressed in
/// u = log(x): returns log g(e^u). Working in log space lets tails that
/// decay only like 1/(x (log x)^k) be integrated after the substitution
/// x = exp(e^v), where they decay exponentially in v.
using LogIntegrand = std::function<double(double u)>;

/// log g(e^u) written as slope * u + rest. For large u the slope terms of
/// the integrand and of the substitution cancel exactly before the small
/// remainder is added, which a single double would lose to rounding.
struct LogValue {
  double slope = 0.0;
  double rest = 0.0;
};
using SplitLogIntegrand = std::function<LogValue(double u)>;

/// Integral of g over [lo, hi] with 0 <= lo < hi <= +inf.
double integrate(const LogIntegrand& log_g, double lo, double hi);
double integrate_split(const SplitLogIntegrand& log_g, double lo, double hi);

/// Integral of g over [0, +inf).
inline double integrate_half_line(const LogIntegrand& log_g) {
  return integrate(log_g, 0.0, std::numeric_limits<double>::infinity());
}

/// log(1 + e^u), accurate for all u.
double log1p_exp(double u);

}  // namespace gsa::quad
