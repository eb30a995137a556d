#include "gsa/problems.hpp"

#include "gsa/rng.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <random>

namespace gsa {

namespace {

constexpr double kCertTol = 1e-9;

/// Uniform draw from the unit ball of `norm` (on the sphere when `shell`).
Vector sample_ball(int d, NormKind norm, bool shell, CounterRng& rng,
                   std::normal_distribution<double>& normal) {
  Vector z(d);
  switch (norm) {
    case NormKind::L2:
      for (int i = 0; i < d; ++i) z[i] = normal(rng);
      break;
    case NormKind::LInf:
      for (int i = 0; i < d; ++i) z[i] = 2.0 * rng.uniform() - 1.0;
      if (shell) {
        // Push one random coordinate to the face.
        const auto k = static_cast<int>(rng.uniform() * d);
        z[k] = z[k] < 0.0 ? -1.0 : 1.0;
        return z;
      }
      return z;
    case NormKind::L1:
      // Normalized exponentials with random signs are uniform on the
      // simplex surface.
      for (int i = 0; i < d; ++i) {
        const double e = -std::log(rng.uniform_open());
        z[i] = rng.uniform() < 0.5 ? -e : e;
      }
      break;
  }
  const double nz = gsa::norm(z, norm);
  if (nz == 0.0) return z;
  z /= nz;
  if (!shell) z *= std::pow(rng.uniform(), 1.0 / d);
  return z;
}

}  // namespace

Matrix random_rotation(int dim, std::uint64_t seed) {
  if (dim < 1) throw InvalidArgument("dim must be >= 1");
  CounterRng rng(seed);
  std::normal_distribution<double> normal;
  Matrix A(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) A(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

double operator_norm(const Matrix& A, NormKind norm) {
  switch (norm) {
    case NormKind::L2: {
      Eigen::JacobiSVD<Matrix> svd(A);
      return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    }
    case NormKind::LInf:
      return A.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::L1:
      return A.cwiseAbs().colwise().sum().maxCoeff();
  }
  return 0.0;
}

SAProblem builtin_contraction(int dim, double rho0, const Vector& target,
                              const std::optional<Matrix>& R, NormKind norm) {
  if (dim < 1) throw InvalidArgument("dim must be >= 1");
  if (!(rho0 >= 0.0 && rho0 < 1.0)) {
    throw InvalidArgument(fmt::format("rho0 must lie in [0, 1), got {}", rho0));
  }
  if (target.size() != dim) throw InvalidArgument("target has the wrong dimension");
  Matrix Rm = R.value_or(Matrix::Identity(dim, dim));
  if (Rm.rows() != dim || Rm.cols() != dim) throw InvalidArgument("R has the wrong shape");
  const double rn = operator_norm(Rm, norm);
  if (rn > 1.0 + 1e-12) {
    throw InvalidArgument(
        fmt::format("R must be non-expansive in {}, operator norm {}", to_string(norm), rn));
  }

  SAProblem p;
  p.name = fmt::format("contraction(d={}, rho0={})", dim, rho0);
  p.dim = dim;
  p.x_star = target;
  p.b = 1.0;
  p.rho = rho0;
  p.norm = norm;
  const bool identity = Rm.isIdentity(0.0);
  if (identity) {
    p.G_into = [rho0, target](const Vector& x, Vector& out) {
      out = (1.0 - rho0) * (x - target);
    };
  } else {
    p.G_into = [rho0, target, Rm](const Vector& x, Vector& out) {
      out.noalias() = rho0 * (Rm * (x - target));
      out = (x - target) - out;
    };
  }
  return p;
}

QuadraticProblem builtin_strongly_convex_quadratic(const Matrix& Q, const Vector& p) {
  const int d = static_cast<int>(Q.rows());
  if (d < 1 || Q.cols() != d) throw InvalidArgument("Q must be square and nonempty");
  if (p.size() != d) throw InvalidArgument("p has the wrong dimension");
  if (!Q.isApprox(Q.transpose(), 1e-12)) throw InvalidArgument("Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
  const double g = es.eigenvalues().minCoeff();
  const double h = es.eigenvalues().maxCoeff();
  if (!(g > 0.0)) {
    throw InvalidArgument(fmt::format("Q must be positive definite, smallest eigenvalue {}", g));
  }

  QuadraticProblem out;
  out.g = g;
  out.h = h;
  const Vector x_star = Q.ldlt().solve(p);
  const double b = 1.0 / (1.0 + g + h);
  const double rho = (1.0 + h) / (1.0 + g + h);

  SAProblem& sa = out.sa;
  sa.name = fmt::format("quadratic(d={}, g={}, h={})", d, g, h);
  sa.dim = d;
  sa.x_star = x_star;
  sa.b = b;
  sa.rho = rho;
  sa.norm = NormKind::L2;
  sa.G_into = [Q, p](const Vector& x, Vector& o) {
    o.noalias() = Q * x;
    o -= p;
  };

  const bool diagonal = Q.isDiagonal(0.0);
  if (diagonal) {
    SGDProblem sgd;
    sgd.name = sa.name;
    sgd.dim = d;
    sgd.x_star = x_star;
    sgd.b = b;
    sgd.rho = rho;
    sgd.a = 0.0;
    sgd.c_max = std::numeric_limits<double>::infinity();
    sgd.norm = NormKind::LInf;
    const Vector q = Q.diagonal();
    sgd.F = [q, p](const Vector& x) {
      return 0.5 * x.dot(q.cwiseProduct(x)) - p.dot(x);
    };
    out.sgd = std::move(sgd);
  }
  return out;
}

SGDProblem builtin_quartic_perturbation(const Vector& q, const Vector& x_star, double eps,
                                        double radius, double c_max) {
  const auto d = static_cast<int>(q.size());
  if (d < 1 || x_star.size() != d) throw InvalidArgument("q and x_star must match in size");
  if (!(q.minCoeff() > 0.0)) throw InvalidArgument("q must be positive");
  if (!(eps >= 0.0)) throw InvalidArgument("eps must be >= 0");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("radius must be positive");
  if (!(c_max > 0.0) || !std::isfinite(c_max)) throw InvalidArgument("c_max must be positive");

  // Along e_i the central difference of eps ||z||^4 is exact up to the
  // cubic term: D_c = 4 eps (||z||^2 + c^2) z_i. The curvature part lies in
  // [g, h + 4 eps d R^2]; the c^2 part is absorbed by a c.
  const double g = q.minCoeff();
  const double h = q.maxCoeff() + 4.0 * eps * d * radius * radius;
  SGDProblem s;
  s.name = fmt::format("quartic(d={}, eps={}, R={})", d, eps, radius);
  s.dim = d;
  s.x_star = x_star;
  s.b = 1.0 / (1.0 + g + h);
  s.rho = (1.0 + h) / (1.0 + g + h);
  s.a = 4.0 * s.b * eps * radius * c_max;
  s.c_max = c_max;
  s.domain_radius = radius;
  s.norm = NormKind::LInf;
  s.F = [q, x_star, eps](const Vector& x) {
    const Vector z = x - x_star;
    const double r2 = z.squaredNorm();
    return 0.5 * z.dot(q.cwiseProduct(z)) + eps * r2 * r2;
  };
  return s;
}

U2Report verify_U2(const SAProblem& prob, std::uint64_t n_samples, double radius,
                   std::uint64_t seed) {
  if (n_samples < 1000) throw InvalidArgument("verify_U2 needs at least 1000 samples");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  CounterRng rng(seed);
  std::normal_distribution<double> normal;
  U2Report r;
  Vector g(prob.dim);
  for (std::uint64_t k = 0; k < n_samples; ++k) {
    const Vector z = radius * sample_ball(prob.dim, prob.norm, k % 2 == 1, rng, normal);
    const double nz = gsa::norm(z, prob.norm);
    if (nz == 0.0) continue;
    const Vector x = prob.x_star + z;
    prob.G_into(x, g);
    const double ratio = gsa::norm(z - prob.b * g, prob.norm) / nz;
    ++r.evaluated;
    if (ratio > r.max_ratio || r.worst_sample.size() == 0) {
      r.max_ratio = ratio;
      r.worst_sample = x;
    }
  }
  r.passed = r.evaluated > 0 && r.max_ratio <= prob.rho + kCertTol;
  return r;
}

V1Report verify_V1(const SGDProblem& prob, std::uint64_t n_samples,
                   const std::vector<double>& c_grid, std::optional<double> radius,
                   std::uint64_t seed) {
  if (c_grid.empty()) throw InvalidArgument("c_grid is empty");
  for (double c : c_grid) {
    if (!(c > 0.0)) throw InvalidArgument("c_grid values must be positive");
  }
  const double R = radius.value_or(std::isfinite(prob.domain_radius) ? prob.domain_radius : 1.0);
  CounterRng rng(seed);
  std::normal_distribution<double> normal;
  V1Report r;
  for (double c : c_grid) r.beyond_c_max = r.beyond_c_max || c > prob.c_max;

  Vector xp(prob.dim);
  Vector xm(prob.dim);
  for (std::uint64_t k = 0; k < n_samples; ++k) {
    const Vector z = R * sample_ball(prob.dim, NormKind::LInf, k % 2 == 1, rng, normal);
    const Vector x = prob.x_star + z;
    const double zn = z.cwiseAbs().maxCoeff();
    for (double c : c_grid) {
      for (int i = 0; i < prob.dim; ++i) {
        xp = x;
        xm = x;
        xp[i] += c;
        xm[i] -= c;
        const double fd = (prob.F(xp) - prob.F(xm)) / (2.0 * c);
        const double slack = std::abs(z[i] - prob.b * fd) - prob.rho * zn - prob.a * c;
        if (slack > kCertTol) ++r.violations;
        if (slack > r.max_slack) {
          r.max_slack = slack;
          r.worst_coordinate = i;
          r.worst_c = c;
          r.worst_sample = x;
        }
      }
    }
  }
  r.passed = r.violations == 0;
  return r;
}

}  // namespace gsa
