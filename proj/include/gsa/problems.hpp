#pragma once

#include "gsa/types.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gsa {

/// In-place vector map out = G(x).
using VectorMap = std::function<void(const Vector& x, Vector& out)>;
using ScalarMap = std::function<double(const Vector& x)>;

/// Root-finding target for stochastic approximation.
///
/// Constants are certified in the multiplicative convention
///   ||x - x* - b G(x)|| <= rho ||x - x*||
/// in the declared norm.
struct SAProblem {
  std::string name;
  int dim = 0;
  VectorMap G_into;
  Vector x_star;  ///< for measuring error only
  double b = 1.0;
  double rho = 0.0;
  NormKind norm = NormKind::L2;

  [[nodiscard]] Vector G(const Vector& x) const {
    Vector out(dim);
    G_into(x, out);
    return out;
  }
  [[nodiscard]] double error(const Vector& x) const { return gsa::norm(x - x_star, norm); }
};

/// Scalar objective for zeroth-order descent. Certified per coordinate, for
/// every c in (0, c_max]:
///   |x_i - x*_i - b (F(x + c e_i) - F(x - c e_i)) / (2c)|
///       <= rho ||x - x*||_inf + a c
/// on the domain ||x - x*||_inf <= domain_radius.
struct SGDProblem {
  std::string name;
  int dim = 0;
  ScalarMap F;
  Vector x_star;
  double b = 1.0;
  double rho = 0.0;
  double a = 0.0;
  double c_max = 0.0;
  double domain_radius = std::numeric_limits<double>::infinity();
  NormKind norm = NormKind::LInf;

  [[nodiscard]] double error(const Vector& x) const { return gsa::norm(x - x_star, norm); }
};

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix).
Matrix random_rotation(int dim, std::uint64_t seed);

/// Induced operator norm of A for the given vector norm.
double operator_norm(const Matrix& A, NormKind norm);

/// G(x) = x - H(x) with H(x) = rho0 R (x - target) + target, b = 1,
/// rho = rho0. R must be non-expansive in `norm` (identity by default).
SAProblem builtin_contraction(int dim, double rho0, const Vector& target,
                              const std::optional<Matrix>& R = std::nullopt,
                              NormKind norm = NormKind::L2);

/// F(x) = x'Qx/2 - p'x with G = Qx - p, for symmetric positive definite Q.
struct QuadraticProblem {
  SAProblem sa;
  std::optional<SGDProblem> sgd;  ///< only for diagonal Q
  double g = 0.0;                 ///< smallest eigenvalue
  double h = 0.0;                 ///< largest eigenvalue
};
QuadraticProblem builtin_strongly_convex_quadratic(const Matrix& Q, const Vector& p);

/// F(x) = (x - x*)' diag(q) (x - x*) / 2 + eps ||x - x*||_2^4, certified on
/// the box ||x - x*||_inf <= radius for increments up to c_max.
SGDProblem builtin_quartic_perturbation(const Vector& q, const Vector& x_star,
                                        double eps, double radius, double c_max);

struct U2Report {
  double max_ratio = 0.0;
  Vector worst_sample;
  std::uint64_t evaluated = 0;  ///< samples used (exact hits on x* skipped)
  bool passed = false;
};

/// Monte-Carlo check of the contraction condition: half of the samples are
/// uniform in the declared-norm ball of `radius` around x*, half on its
/// shell. Passes iff max ratio <= rho + 1e-9.
U2Report verify_U2(const SAProblem& prob, std::uint64_t n_samples, double radius,
                   std::uint64_t seed = 0);

struct V1Report {
  double max_slack = -std::numeric_limits<double>::infinity();
  int worst_coordinate = -1;
  double worst_c = 0.0;
  Vector worst_sample;
  std::uint64_t violations = 0;
  bool beyond_c_max = false;  ///< some grid value exceeded c_max
  bool passed = false;
};

/// Monte-Carlo check of the per-coordinate finite-difference condition.
/// Samples are uniform in the box ||x - x*||_inf <= radius (default: the
/// problem's domain radius) plus its shell. Passes iff every slack <= 1e-9.
V1Report verify_V1(const SGDProblem& prob, std::uint64_t n_samples,
                   const std::vector<double>& c_grid,
                   std::optional<double> radius = std::nullopt, std::uint64_t seed = 0);

}  // namespace gsa
