#pragma once

#include "gsa/quadrature.hpp"
#include "gsa/rng.hpp"
#include "gsa/types.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <utility>

namespace gsa {

enum class NoiseFamily {
  GaussianIID,
  StudentTIID,
  LogTemperedCauchyIID,
  ScaledMartingaleDifference,
  IndependentDriftingMean,
};

enum class Dependence { IID, MartingaleDifference, Independent };

std::string_view to_string(NoiseFamily f);
NoiseFamily parse_noise_family(std::string_view name);
std::string_view to_string(Dependence d);

struct NoiseParams {
  double scale = 1.0;       ///< sigma >= 0 (zero gives the degenerate model)
  double tail_index = 2.5;  ///< nu > 1 for Student-t innovations; +inf means Gaussian
  double temper = 2.0;      ///< p > 0 for the log-tempered Cauchy density
  double drift0 = 1.0;      ///< mu_0 in mu_n = mu_0 / n
  double modulation = 0.5;  ///< a in the martingale scale 1 + a sin(previous draw)
};

/// Distribution family of the measurement errors, with the analytic metadata
/// the condition checkers rely on. Coordinates are drawn independently.
///
/// Each coordinate of a draw is scale * X where X is the family's unit
/// variable: standard normal, Student-t(nu), or the log-tempered Cauchy with
/// density proportional to 1 / ((1 + x^2) (log(e + |x|))^p). The martingale
/// family multiplies X ~ t(nu) by 1 + a sin(first coordinate of the previous
/// draw); the drifting family adds mu_0 / n to X ~ t(nu).
class NoiseModel {
 public:
  /// Standard Gaussian in one dimension.
  NoiseModel() : family_(NoiseFamily::GaussianIID), dim_(1) {}

  static NoiseModel gaussian(int dim, double sigma = 1.0);
  static NoiseModel student_t(int dim, double nu, double sigma = 1.0);
  static NoiseModel log_tempered_cauchy(int dim, double p, double sigma = 1.0);
  static NoiseModel martingale_difference(
      int dim, double nu, double modulation = 0.5, double sigma = 1.0);
  static NoiseModel drifting_mean(int dim, double nu, double mu0,
                                  double sigma = 1.0);

  [[nodiscard]] NoiseFamily family() const { return family_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const NoiseParams& params() const { return params_; }
  [[nodiscard]] double scale() const { return params_.scale; }
  /// W and -W have the same law (conditionally on the past for the
  /// martingale family).
  [[nodiscard]] bool symmetric() const;
  [[nodiscard]] Dependence dependence() const;
  [[nodiscard]] bool is_iid() const { return dependence() == Dependence::IID; }
  /// Tail index of the unit variable: +inf for Gaussian tails, nu for
  /// Student-t innovations, 1 for the log-tempered Cauchy.
  [[nodiscard]] double tail_index() const;
  /// Normalizing constant of the log-tempered Cauchy density (1 otherwise).
  [[nodiscard]] double ltc_normalizer() const { return ltc_norm_; }
  [[nodiscard]] std::string describe() const;

  /// log f(e^u) for the unit variable's density f (for u = log|x|).
  [[nodiscard]] double unit_log_density_at_log(double u) const;
  /// The same value as slope * u + rest, stable for very large u.
  [[nodiscard]] quad::LogValue unit_log_density_split(double u) const;
  /// Density of the unit variable.
  [[nodiscard]] double unit_density(double x) const;

 private:
  NoiseModel(NoiseFamily family, int dim, NoiseParams params);

  NoiseFamily family_;
  int dim_;
  NoiseParams params_;
  double ltc_norm_ = 1.0;
};

/// Seeded, single-owner stream of noise draws for one trajectory.
class NoiseStream {
 public:
  NoiseStream(NoiseModel model, std::uint64_t seed);

  /// W_{n+1} for stochastic approximation.
  [[nodiscard]] Vector next();
  void next_into(Eigen::Ref<Vector> out);

  /// (M'_{n+1}, M''_{n+1}): two independent draws sharing the law (and, for
  /// the martingale family, the past-measurable scale) of step n+1.
  [[nodiscard]] std::pair<Vector, Vector> next_pair();
  void next_pair_into(Eigen::Ref<Vector> first, Eigen::Ref<Vector> second);

  /// Number of draws (or pairs) produced so far.
  [[nodiscard]] std::uint64_t index() const { return n_; }
  [[nodiscard]] const NoiseModel& model() const { return model_; }

 private:
  double draw_unit();
  double draw_ltc();
  double current_scale() const;
  void fill(Eigen::Ref<Vector> out, double scale, double shift);

  NoiseModel model_;
  CounterRng rng_;
  std::normal_distribution<double> normal_;
  std::student_t_distribution<double> student_;
  double prev_first_ = 0.0;
  std::uint64_t n_ = 0;
};

/// Finite / infinite verdict for a moment, with an estimate when finite.
struct MomentVerdict {
  enum class Status { Finite, Infinite, Unsupported };
  enum class Basis { ClosedForm, Quadrature, Bound, None };

  Status status = Status::Unsupported;
  double value = std::numeric_limits<double>::quiet_NaN();
  Basis basis = Basis::None;

  [[nodiscard]] bool finite() const { return status == Status::Finite; }
  [[nodiscard]] bool infinite() const { return status == Status::Infinite; }
};

std::string_view to_string(MomentVerdict::Status s);
std::string_view to_string(MomentVerdict::Basis b);

/// sup_n E|W_{n,i}|^alpha per coordinate. For the iid families the value is
/// exact (closed form or quadrature); for the martingale and drifting
/// families it is a uniform upper bound. Finiteness of the vector moment
/// E||W||^alpha is equivalent.
MomentVerdict moment_envelope(const NoiseModel& model, double alpha);

/// E[|W_{1,i}| / log(1 + |W_{1,i}|)^delta] for iid models.
MomentVerdict log_moment(const NoiseModel& model, double delta);

}  // namespace gsa
