#include "gsa/series.hpp"

#include <cmath>
#include <limits>

namespace gsa {

PowerLogForm PowerLogForm::pow(double k) const {
  return {std::pow(coef, k), power * k, log_power * k};
}

PowerLogForm operator*(const PowerLogForm& a, const PowerLogForm& b) {
  return {a.coef * b.coef, a.power + b.power, a.log_power + b.log_power};
}

PowerLogForm operator/(const PowerLogForm& a, const PowerLogForm& b) {
  return {a.coef / b.coef, a.power - b.power, a.log_power - b.log_power};
}

std::string_view to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Diverges:
      return "diverges";
    case SeriesVerdict::Converges:
      return "converges";
    case SeriesVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

bool near(double a, double b) { return std::abs(a - b) <= kExponentTol; }

}  // namespace

SeriesVerdict sum_verdict(const PowerLogForm& f) {
  if (f.is_zero()) return SeriesVerdict::Converges;
  if (near(f.power, 1.0)) {
    return f.log_power > 1.0 + kExponentTol ? SeriesVerdict::Converges
                                            : SeriesVerdict::Diverges;
  }
  return f.power > 1.0 ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
}

bool tends_to_zero(const PowerLogForm& f) {
  if (f.is_zero()) return true;
  if (near(f.power, 0.0)) return f.log_power > kExponentTol;
  return f.power > 0.0;
}

bool is_bounded(const PowerLogForm& f) {
  if (f.is_zero()) return true;
  if (near(f.power, 0.0)) return f.log_power >= -kExponentTol;
  return f.power > 0.0;
}

double tail_integral(const PowerLogForm& f, double n) {
  if (f.is_zero()) return 0.0;
  if (sum_verdict(f) != SeriesVerdict::Converges) {
    return std::numeric_limits<double>::infinity();
  }
  const double x = std::max(n, std::exp(1.0));
  const double lx = std::log(x);
  if (near(f.power, 1.0)) {
    return std::abs(f.coef) * std::pow(lx, 1.0 - f.log_power) /
           (f.log_power - 1.0);
  }
  return std::abs(f.coef) * std::pow(x, 1.0 - f.power) *
         std::pow(lx, -f.log_power) / (f.power - 1.0);
}

SeriesReport analyze_series(const std::function<double(std::uint64_t)>& term,
                            const std::optional<PowerLogForm>& form,
                            std::uint64_t horizon) {
  // Neumaier compensated summation.
  double sum = 0.0;
  double comp = 0.0;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    const double t = term(n);
    const double s = sum + t;
    if (std::abs(sum) >= std::abs(t)) {
      comp += (sum - s) + t;
    } else {
      comp += (t - s) + sum;
    }
    sum = s;
  }
  SeriesReport r;
  r.partial_sum = sum + comp;
  r.form = form;
  r.verdict = form ? sum_verdict(*form) : SeriesVerdict::Inconclusive;
  r.tail_estimate = r.verdict == SeriesVerdict::Converges
                        ? tail_integral(*form, static_cast<double>(horizon))
                        : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace gsa
