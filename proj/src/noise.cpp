#include "gsa/noise.hpp"

#include "gsa/quadrature.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace gsa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_t_innovation(NoiseFamily f) {
  return f == NoiseFamily::StudentTIID || f == NoiseFamily::ScaledMartingaleDifference ||
         f == NoiseFamily::IndependentDriftingMean;
}

/// E|X|^alpha for X standard normal.
double gaussian_abs_moment(double alpha) {
  return std::pow(2.0, alpha / 2.0) * std::tgamma((alpha + 1.0) / 2.0) /
         std::sqrt(std::numbers::pi);
}

/// E|X|^alpha for X ~ t(nu), alpha < nu.
double student_abs_moment(double nu, double alpha) {
  return std::exp(alpha / 2.0 * std::log(nu) + std::lgamma((alpha + 1.0) / 2.0) +
                  std::lgamma((nu - alpha) / 2.0) - std::lgamma(nu / 2.0)) /
         std::sqrt(std::numbers::pi);
}

quad::LogValue ltc_log_kernel(double u, double p) {
  // -log(1 + x^2) - p log log(e + x) at x = e^u
  const double log_e_plus_x = 1.0 + quad::log1p_exp(u - 1.0);
  const double loglog = p * std::log(log_e_plus_x);
  if (u <= 0.0) return {0.0, -quad::log1p_exp(2.0 * u) - loglog};
  return {-2.0, -std::log1p(std::exp(-2.0 * u)) - loglog};
}

MomentVerdict finite(double value, MomentVerdict::Basis basis) {
  return {MomentVerdict::Status::Finite, value, basis};
}

MomentVerdict infinite() {
  return {MomentVerdict::Status::Infinite, kInf, MomentVerdict::Basis::ClosedForm};
}

/// E|X|^alpha of the unit innovation (t(nu), or normal when nu is infinite).
MomentVerdict innovation_moment(double nu, double alpha) {
  if (!std::isfinite(nu)) {
    return finite(gaussian_abs_moment(alpha), MomentVerdict::Basis::ClosedForm);
  }
  if (alpha >= nu) return infinite();
  return finite(student_abs_moment(nu, alpha), MomentVerdict::Basis::ClosedForm);
}

}  // namespace

std::string_view to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::GaussianIID:
      return "gaussian";
    case NoiseFamily::StudentTIID:
      return "student_t";
    case NoiseFamily::LogTemperedCauchyIID:
      return "log_tempered_cauchy";
    case NoiseFamily::ScaledMartingaleDifference:
      return "martingale_difference";
    case NoiseFamily::IndependentDriftingMean:
      return "drifting_mean";
  }
  return "gaussian";
}

NoiseFamily parse_noise_family(std::string_view name) {
  for (auto f : {NoiseFamily::GaussianIID, NoiseFamily::StudentTIID,
                 NoiseFamily::LogTemperedCauchyIID,
                 NoiseFamily::ScaledMartingaleDifference,
                 NoiseFamily::IndependentDriftingMean}) {
    if (to_string(f) == name) return f;
  }
  throw InvalidArgument(fmt::format("unknown noise family '{}'", name));
}

std::string_view to_string(Dependence d) {
  switch (d) {
    case Dependence::IID:
      return "iid";
    case Dependence::MartingaleDifference:
      return "martingale_difference";
    case Dependence::Independent:
      return "independent";
  }
  return "iid";
}

std::string_view to_string(MomentVerdict::Status s) {
  switch (s) {
    case MomentVerdict::Status::Finite:
      return "finite";
    case MomentVerdict::Status::Infinite:
      return "infinite";
    case MomentVerdict::Status::Unsupported:
      return "unsupported";
  }
  return "unsupported";
}

std::string_view to_string(MomentVerdict::Basis b) {
  switch (b) {
    case MomentVerdict::Basis::ClosedForm:
      return "closed_form";
    case MomentVerdict::Basis::Quadrature:
      return "quadrature";
    case MomentVerdict::Basis::Bound:
      return "bound";
    case MomentVerdict::Basis::None:
      return "none";
  }
  return "none";
}

// ------------------------------------------------------------ NoiseModel

NoiseModel::NoiseModel(NoiseFamily family, int dim, NoiseParams params)
    : family_(family), dim_(dim), params_(params) {
  if (dim < 1) throw InvalidArgument(fmt::format("dim must be >= 1, got {}", dim));
  if (!(params.scale >= 0.0) || !std::isfinite(params.scale)) {
    throw InvalidArgument(fmt::format("scale must be finite and >= 0, got {}", params.scale));
  }
  if (has_t_innovation(family)) {
    const bool gaussian_innov = family != NoiseFamily::StudentTIID && params.tail_index == kInf;
    if (!gaussian_innov && !(params.tail_index > 1.0 && std::isfinite(params.tail_index))) {
      throw InvalidArgument(
          fmt::format("tail_index must be > 1, got {}", params.tail_index));
    }
  }
  if (family == NoiseFamily::LogTemperedCauchyIID) {
    if (!(params.temper > 0.0) || !std::isfinite(params.temper)) {
      throw InvalidArgument(fmt::format("temper must be > 0, got {}", params.temper));
    }
    const double p = params.temper;
    ltc_norm_ = 2.0 * quad::integrate_split([p](double u) { return ltc_log_kernel(u, p); }, 0.0,
                                            kInf);
  }
  if (family == NoiseFamily::ScaledMartingaleDifference &&
      !(params.modulation >= 0.0 && params.modulation < 1.0)) {
    throw InvalidArgument(
        fmt::format("modulation must lie in [0, 1), got {}", params.modulation));
  }
  if (family == NoiseFamily::IndependentDriftingMean && !std::isfinite(params.drift0)) {
    throw InvalidArgument("drift0 must be finite");
  }
}

NoiseModel NoiseModel::gaussian(int dim, double sigma) {
  NoiseParams p;
  p.scale = sigma;
  return {NoiseFamily::GaussianIID, dim, p};
}

NoiseModel NoiseModel::student_t(int dim, double nu, double sigma) {
  NoiseParams p;
  p.scale = sigma;
  p.tail_index = nu;
  return {NoiseFamily::StudentTIID, dim, p};
}

NoiseModel NoiseModel::log_tempered_cauchy(int dim, double p, double sigma) {
  NoiseParams params;
  params.scale = sigma;
  params.temper = p;
  return {NoiseFamily::LogTemperedCauchyIID, dim, params};
}

NoiseModel NoiseModel::martingale_difference(int dim, double nu, double modulation,
                                             double sigma) {
  NoiseParams p;
  p.scale = sigma;
  p.tail_index = nu;
  p.modulation = modulation;
  return {NoiseFamily::ScaledMartingaleDifference, dim, p};
}

NoiseModel NoiseModel::drifting_mean(int dim, double nu, double mu0, double sigma) {
  NoiseParams p;
  p.scale = sigma;
  p.tail_index = nu;
  p.drift0 = mu0;
  return {NoiseFamily::IndependentDriftingMean, dim, p};
}

bool NoiseModel::symmetric() const {
  if (family_ == NoiseFamily::IndependentDriftingMean) return params_.drift0 == 0.0;
  return true;
}

Dependence NoiseModel::dependence() const {
  switch (family_) {
    case NoiseFamily::ScaledMartingaleDifference:
      return Dependence::MartingaleDifference;
    case NoiseFamily::IndependentDriftingMean:
      return Dependence::Independent;
    default:
      return Dependence::IID;
  }
}

double NoiseModel::tail_index() const {
  switch (family_) {
    case NoiseFamily::GaussianIID:
      return kInf;
    case NoiseFamily::LogTemperedCauchyIID:
      return 1.0;
    default:
      return params_.tail_index;
  }
}

std::string NoiseModel::describe() const {
  switch (family_) {
    case NoiseFamily::GaussianIID:
      return fmt::format("gaussian(dim={}, sigma={})", dim_, params_.scale);
    case NoiseFamily::StudentTIID:
      return fmt::format("student_t(dim={}, nu={}, sigma={})", dim_, params_.tail_index,
                         params_.scale);
    case NoiseFamily::LogTemperedCauchyIID:
      return fmt::format("log_tempered_cauchy(dim={}, p={}, sigma={})", dim_,
                         params_.temper, params_.scale);
    case NoiseFamily::ScaledMartingaleDifference:
      return fmt::format("martingale_difference(dim={}, nu={}, a={}, sigma={})", dim_,
                         params_.tail_index, params_.modulation, params_.scale);
    case NoiseFamily::IndependentDriftingMean:
      return fmt::format("drifting_mean(dim={}, nu={}, mu0={}, sigma={})", dim_,
                         params_.tail_index, params_.drift0, params_.scale);
  }
  return "noise";
}

double NoiseModel::unit_log_density_at_log(double u) const {
  const quad::LogValue v = unit_log_density_split(u);
  return v.slope == 0.0 ? v.rest : v.slope * u + v.rest;
}

quad::LogValue NoiseModel::unit_log_density_split(double u) const {
  const double nu = params_.tail_index;
  if (family_ == NoiseFamily::GaussianIID || (has_t_innovation(family_) && nu == kInf)) {
    const double x2 = std::exp(2.0 * u);
    return {0.0, -0.5 * x2 - 0.5 * std::log(2.0 * std::numbers::pi)};
  }
  if (family_ == NoiseFamily::LogTemperedCauchyIID) {
    quad::LogValue v = ltc_log_kernel(u, params_.temper);
    v.rest -= std::log(ltc_norm_);
    return v;
  }
  const double log_c = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                       0.5 * std::log(nu * std::numbers::pi);
  const double z = 2.0 * u - std::log(nu);
  if (z <= 0.0) return {0.0, log_c - (nu + 1.0) / 2.0 * quad::log1p_exp(z)};
  // log(1 + e^z) = z + log(1 + e^-z)
  return {-(nu + 1.0),
          log_c + (nu + 1.0) / 2.0 * (std::log(nu) - std::log1p(std::exp(-z)))};
}

double NoiseModel::unit_density(double x) const {
  const double ax = std::abs(x);
  if (ax == 0.0) return std::exp(unit_log_density_at_log(-745.0));
  return std::exp(unit_log_density_at_log(std::log(ax)));
}

// ----------------------------------------------------------- NoiseStream

NoiseStream::NoiseStream(NoiseModel model, std::uint64_t seed)
    : model_(std::move(model)),
      rng_(seed),
      normal_(0.0, 1.0),
      student_(std::isfinite(model_.params().tail_index) ? model_.params().tail_index
                                                          : 1.0) {}

double NoiseStream::draw_ltc() {
  // Cauchy proposal; accept with probability log(e + |x|)^(-p) <= 1.
  const double p = model_.params().temper;
  for (;;) {
    const double x = std::tan(std::numbers::pi * (rng_.uniform_open() - 0.5));
    const double accept = std::pow(std::log(std::numbers::e + std::abs(x)), -p);
    if (rng_.uniform() < accept) return x;
  }
}

double NoiseStream::draw_unit() {
  switch (model_.family()) {
    case NoiseFamily::GaussianIID:
      return normal_(rng_);
    case NoiseFamily::LogTemperedCauchyIID:
      return draw_ltc();
    default:
      return std::isfinite(model_.params().tail_index) ? student_(rng_) : normal_(rng_);
  }
}

double NoiseStream::current_scale() const {
  double s = model_.params().scale;
  if (model_.family() == NoiseFamily::ScaledMartingaleDifference) {
    s *= 1.0 + model_.params().modulation * std::sin(prev_first_);
  }
  return s;
}

void NoiseStream::fill(Eigen::Ref<Vector> out, double scale, double shift) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = shift + scale * draw_unit();
}

Vector NoiseStream::next() {
  Vector w(model_.dim());
  next_into(w);
  return w;
}

void NoiseStream::next_into(Eigen::Ref<Vector> out) {
  ++n_;
  const double shift = model_.family() == NoiseFamily::IndependentDriftingMean
                           ? model_.params().drift0 / static_cast<double>(n_)
                           : 0.0;
  fill(out, current_scale(), shift);
  prev_first_ = out[0];
}

std::pair<Vector, Vector> NoiseStream::next_pair() {
  Vector a(model_.dim());
  Vector b(model_.dim());
  next_pair_into(a, b);
  return {std::move(a), std::move(b)};
}

void NoiseStream::next_pair_into(Eigen::Ref<Vector> first, Eigen::Ref<Vector> second) {
  ++n_;
  const double shift = model_.family() == NoiseFamily::IndependentDriftingMean
                           ? model_.params().drift0 / static_cast<double>(n_)
                           : 0.0;
  const double scale = current_scale();
  fill(first, scale, shift);
  fill(second, scale, shift);
  prev_first_ = first[0];
}

// --------------------------------------------------------------- moments

MomentVerdict moment_envelope(const NoiseModel& model, double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidArgument(fmt::format("alpha must be positive, got {}", alpha));
  }
  const auto& p = model.params();
  const double s_alpha = std::pow(p.scale, alpha);
  switch (model.family()) {
    case NoiseFamily::GaussianIID:
      return finite(s_alpha * gaussian_abs_moment(alpha), MomentVerdict::Basis::ClosedForm);
    case NoiseFamily::StudentTIID: {
      auto v = innovation_moment(p.tail_index, alpha);
      if (v.finite()) v.value *= s_alpha;
      return v;
    }
    case NoiseFamily::LogTemperedCauchyIID: {
      // Tail ~ x^(alpha - 2) (log x)^(-p): integrable iff alpha < 1, or
      // alpha == 1 with p > 1.
      const bool ok = alpha < 1.0 || (alpha == 1.0 && p.temper > 1.0);
      if (!ok) return infinite();
      const double value = 2.0 * quad::integrate_split(
                                     [&](double u) {
                                       quad::LogValue f = model.unit_log_density_split(u);
                                       f.slope += alpha;
                                       return f;
                                     },
                                     0.0, kInf);
      return finite(s_alpha * value, MomentVerdict::Basis::Quadrature);
    }
    case NoiseFamily::ScaledMartingaleDifference: {
      auto v = innovation_moment(p.tail_index, alpha);
      if (!v.finite()) return v;
      return finite(std::pow(1.0 + p.modulation, alpha) * s_alpha * v.value,
                    MomentVerdict::Basis::Bound);
    }
    case NoiseFamily::IndependentDriftingMean: {
      auto v = innovation_moment(p.tail_index, alpha);
      if (!v.finite()) return v;
      // |m + x|^a <= c_a (|m|^a + |x|^a) with c_a = max(1, 2^(a-1)).
      const double c = std::max(1.0, std::pow(2.0, alpha - 1.0));
      return finite(c * (std::pow(std::abs(p.drift0), alpha) + s_alpha * v.value),
                    MomentVerdict::Basis::Bound);
    }
  }
  return {};
}

MomentVerdict log_moment(const NoiseModel& model, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw InvalidArgument(fmt::format("delta must lie in (0, 1], got {}", delta));
  }
  if (!model.is_iid()) return {};
  const double sigma = model.scale();
  if (model.family() == NoiseFamily::LogTemperedCauchyIID &&
      !(model.params().temper + delta > 1.0)) {
    return infinite();
  }
  if (sigma == 0.0) return finite(0.0, MomentVerdict::Basis::ClosedForm);
  const double log_sigma = std::log(sigma);
  const double value = 2.0 * quad::integrate_split(
                                 [&](double u) {
                                   const double us = u + log_sigma;  // log(sigma x)
                                   quad::LogValue f = model.unit_log_density_split(u);
                                   f.slope += 1.0;
                                   f.rest += log_sigma - delta * std::log(quad::log1p_exp(us));
                                   return f;
                                 },
                                 0.0, kInf);
  return finite(value, MomentVerdict::Basis::Quadrature);
}

}  // namespace gsa
