#include "gsa/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

namespace gsa::quad {

namespace {

constexpr double kSplit = std::numbers::e;
constexpr double kTol = 1e-11;

double safe_exp(double v) { return std::isfinite(v) || v > 0 ? std::exp(v) : 0.0; }

}  // namespace

double log1p_exp(double u) {
  if (u > 35.0) return u + std::exp(-u);
  return std::log1p(std::exp(u));
}

double integrate(const LogIntegrand& log_g, double lo, double hi) {
  return integrate_split([&](double u) { return LogValue{0.0, log_g(u)}; }, lo, hi);
}

double integrate_split(const SplitLogIntegrand& log_g, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo)) return 0.0;
  double total = 0.0;

  // Body on [lo, min(hi, e)] directly in x.
  if (lo < kSplit) {
    const double b = std::min(hi, kSplit);
    boost::math::quadrature::tanh_sinh<double> ts;
    total += ts.integrate(
        [&](double x) {
          if (x <= 0.0) return 0.0;
          const double u = std::log(x);
          const LogValue g = log_g(u);
          return safe_exp(g.slope * u + g.rest);
        },
        lo, b, kTol);
  }
  if (hi <= kSplit) return total;

  const double a = std::max(lo, kSplit);
  if (std::isfinite(hi)) {
    // x = e^u on [log a, log hi].
    boost::math::quadrature::tanh_sinh<double> ts;
    total += ts.integrate(
        [&](double u) {
          const LogValue g = log_g(u);
          return safe_exp((g.slope + 1.0) * u + g.rest);
        },
        std::log(a), std::log(hi), kTol);
    return total;
  }

  // x = exp(e^v) on [log log a, inf).
  const double v0 = std::log(std::log(a));
  boost::math::quadrature::exp_sinh<double> es;
  total += es.integrate(
      [&](double t) {
        const double v = v0 + t;
        const double u = std::exp(v);
        const LogValue g = log_g(u);
        const double k = g.slope + 1.0;
        return safe_exp((k == 0.0 ? 0.0 : k * u) + g.rest + v);
      },
      0.0, std::numeric_limits<double>::infinity(), kTol);
  return total;
}

}  // namespace gsa::quad
