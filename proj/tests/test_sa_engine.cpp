#include "gsa/sa_engine.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace gsa;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

SARunConfig base_config(const SAProblem& p, std::uint64_t N) {
  SARunConfig cfg;
  cfg.problem = &p;
  cfg.schedule = Schedule::harmonic();
  cfg.multiplier = Multiplier::constant(1.0);
  cfg.noise = NoiseModel::gaussian(p.dim, 0.0);
  cfg.x0 = Vector::Zero(p.dim);
  cfg.horizon = N;
  cfg.record = RecordSpec::full();
  return cfg;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

}  // namespace

TEST(SaStep, Arithmetic) {
  const auto shifted = builtin_contraction(1, 0.0, vec({5.0}));
  const Multiplier m = Multiplier::constant(7.0);
  MultiplierState st(m);
  EXPECT_DOUBLE_EQ(sa_step(vec({2.0}), 0, shifted.G_into, st, 0.5, vec({0.0}))[0], 3.5);

  const auto identity = builtin_contraction(1, 0.0, vec({0.0}));
  const Multiplier one = Multiplier::constant(1.0);
  MultiplierState st1(one);
  EXPECT_DOUBLE_EQ(sa_step(vec({1.0}), 0, identity.G_into, st1, 0.25, vec({4.0}))[0], -0.25);
  EXPECT_THROW(sa_step(vec({1.0}), 0, identity.G_into, st1, 0.0, vec({4.0})), InvalidArgument);
}

TEST(SaStep, ObservesIterateBeforeMultiplier) {
  const auto p = builtin_contraction(1, 0.0, vec({0.0}));
  const Multiplier m = Multiplier::norm_tracking(1.0);
  MultiplierState st(m);
  // lambda_0 = 1 + |x_0| = 4: x' = 3 - 0.5 (3 + 4 * 1)
  EXPECT_DOUBLE_EQ(sa_step(vec({3.0}), 0, p.G_into, st, 0.5, vec({1.0}))[0], -0.5);
  EXPECT_DOUBLE_EQ(st.running_max(), 3.0);
}

TEST(SaStep, QuadraticEigendirectionShrinksByLinearFactor) {
  const Matrix U = random_rotation(2, 5);
  const Matrix Q = U * Vector(vec({1.0, 3.0})).asDiagonal() * U.transpose();
  const Vector p = vec({0.3, -0.7});
  const auto q = builtin_strongly_convex_quadratic(0.5 * (Q + Q.transpose()), p);
  const Vector x = q.sa.x_star + U.col(0);
  const Multiplier m = Multiplier::constant(1.0);
  MultiplierState st(m);
  const Vector next = sa_step(x, 0, q.sa.G_into, st, 0.1, Vector::Zero(2));
  EXPECT_NEAR(q.sa.error(next), 0.9, 1e-12);
  // and the h-direction shrinks by |1 - 0.3|
  const Vector next2 = sa_step(q.sa.x_star + U.col(1), 0, q.sa.G_into, st, 0.1, Vector::Zero(2));
  EXPECT_NEAR(q.sa.error(next2), 0.7, 1e-12);
}

TEST(SaRun, ZeroNoiseContractionFollowsProductBound) {
  const auto p = builtin_contraction(2, 0.5, vec({1.0, 1.0}));
  auto cfg = base_config(p, 2000);
  cfg.x0 = vec({-3.0, 4.0});
  const auto traj = sa_run(cfg);
  ASSERT_EQ(traj.records.size(), 2001u);
  double bound = traj.records[0].err;
  for (std::uint64_t n = 0; n < 2000; ++n) {
    EXPECT_LE(traj.records[n].err, bound * (1 + 1e-12)) << n;
    bound *= 1.0 - 0.5 * cfg.schedule(n);
  }
}

TEST(SaRun, ZeroNoiseGeometricEnvelopeForBuiltins) {
  std::vector<SAProblem> problems;
  problems.push_back(builtin_contraction(3, 0.7, vec({1.0, 2.0, 3.0}), random_rotation(3, 1)));
  Matrix R(2, 2);
  R << 0.5, -0.5, 0.25, 0.75;
  problems.push_back(builtin_contraction(2, 0.6, vec({0.0, 1.0}), R, NormKind::LInf));
  problems.push_back(
      builtin_strongly_convex_quadratic(Vector(vec({1.0, 2.0, 4.0})).asDiagonal(), vec({1.0, 0.0, -1.0}))
          .sa);
  const Matrix U = random_rotation(4, 9);
  const Matrix Q = U * Vector(vec({0.5, 1.0, 2.0, 3.0})).asDiagonal() * U.transpose();
  problems.push_back(builtin_strongly_convex_quadratic(0.5 * (Q + Q.transpose()), Vector::Ones(4)).sa);

  for (const auto& p : problems) {
    for (const Schedule& s :
         {Schedule::harmonic(p.b), Schedule::power_law(p.b, 0.6), Schedule::constant(0.5 * p.b),
          Schedule::harmonic(3.0)}) {
      auto cfg = base_config(p, 300);
      cfg.schedule = s;
      cfg.x0 = Vector::Constant(p.dim, 5.0);
      const auto traj = sa_run(cfg);
      ASSERT_FALSE(traj.diverged);
      for (std::uint64_t n = 0; n < 300; ++n) {
        // multiplicative b: beta G = (beta / b) (b G)
        const double r = s(n) / p.b;
        if (r > 1.0) continue;
        const double factor = (1.0 - r) + r * p.rho;
        EXPECT_LE(traj.records[n + 1].err, factor * traj.records[n].err + 1e-12)
            << p.name << " " << s.describe() << " n=" << n;
      }
    }
  }
}

TEST(SaRun, EquilibriumIsAbsorbing) {
  const auto p = builtin_contraction(3, 0.5, vec({1.0, -1.0, 2.0}), random_rotation(3, 2));
  auto cfg = base_config(p, 500);
  cfg.x0 = p.x_star;
  const auto traj = sa_run(cfg);
  for (const auto& r : traj.records) EXPECT_LE(r.err, 1e-14);
}

TEST(SaRun, DeterministicBitForBit) {
  const auto p = builtin_contraction(2, 0.5, vec({1.0, 1.0}));
  auto cfg = base_config(p, 5000);
  cfg.noise = NoiseModel::student_t(2, 1.5);
  cfg.schedule = Schedule::power_law(1.0, 2.0 / 3.0);
  cfg.seed = 42;
  const auto a = sa_run(cfg);
  const auto b = sa_run(cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    ASSERT_EQ(a.records[i].err, b.records[i].err);
    ASSERT_EQ(*a.records[i].x, *b.records[i].x);
  }
  EXPECT_EQ(a.final_state, b.final_state);
  cfg.seed = 43;
  EXPECT_NE(sa_run(cfg).final_state, a.final_state);
}

TEST(SaRun, MatchesManualReplay) {
  const auto p = builtin_contraction(2, 0.3, vec({0.5, -0.5}), random_rotation(2, 8));
  auto cfg = base_config(p, 200);
  cfg.noise = NoiseModel::martingale_difference(2, 2.5);
  cfg.multiplier = Multiplier::norm_tracking(0.5);
  cfg.seed = 6;
  cfg.x0 = vec({2.0, 2.0});
  const auto traj = sa_run(cfg);

  NoiseStream stream(cfg.noise, cfg.seed);
  MultiplierState st(cfg.multiplier);
  Vector x = cfg.x0;
  for (std::uint64_t n = 0; n < 200; ++n) {
    const Vector w = stream.next();
    x = sa_step(x, n, p.G_into, st, cfg.schedule(n), w);
    ASSERT_EQ(x, *traj.records[n + 1].x) << n;
  }
}

TEST(SaRun, RecordPolicies) {
  const auto p = builtin_contraction(1, 0.5, vec({0.0}));
  auto cfg = base_config(p, 100);
  cfg.noise = NoiseModel::gaussian(1);

  cfg.record = RecordSpec::errors_only();
  auto t = sa_run(cfg);
  EXPECT_EQ(t.records.size(), 101u);
  EXPECT_FALSE(t.records[5].x.has_value());

  cfg.record = RecordSpec::thinned(7);
  t = sa_run(cfg);
  EXPECT_EQ(t.records.size(), cfg.record.expected_count(100));
  EXPECT_EQ(t.records.back().n, 100u);
  for (const auto& r : t.records) EXPECT_TRUE(r.n % 7 == 0 || r.n == 100);

  cfg.record = RecordSpec::at({100, 10, 1, 10});
  t = sa_run(cfg);
  ASSERT_EQ(t.records.size(), 3u);
  EXPECT_EQ(t.records[0].n, 1u);
  EXPECT_NE(t.at(10), nullptr);
  EXPECT_EQ(t.at(11), nullptr);
  EXPECT_EQ(t.steps, 100u);

  cfg.record = RecordSpec::at({200});
  EXPECT_THROW(sa_run(cfg), InvalidArgument);
}

TEST(SaRun, RunningMaxIsNondecreasing) {
  const auto p = builtin_contraction(2, 0.5, vec({3.0, 0.0}));
  auto cfg = base_config(p, 3000);
  cfg.noise = NoiseModel::student_t(2, 1.5);
  cfg.seed = 3;
  const auto t = sa_run(cfg);
  double max_norm = 0.0;
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    max_norm = std::max(max_norm, t.records[i].x->norm());
    EXPECT_DOUBLE_EQ(t.records[i].phi, 1.0 + max_norm);
    if (i > 0) {
      EXPECT_GE(t.records[i].phi, t.records[i - 1].phi);
    }
  }
  EXPECT_EQ(t.final_phi, t.records.back().phi);
}

TEST(SaRun, NonFiniteIterateStopsWithFlag) {
  SAProblem expanding;
  expanding.name = "expanding";
  expanding.dim = 1;
  expanding.x_star = vec({0.0});
  expanding.G_into = [](const Vector& x, Vector& out) { out = -1e100 * x; };
  auto cfg = base_config(expanding, 1000);
  cfg.schedule = Schedule::constant(1.0);
  cfg.x0 = vec({1.0});
  const auto t = sa_run(cfg);
  EXPECT_TRUE(t.diverged);
  EXPECT_GT(t.diverged_at, 0u);
  EXPECT_LT(t.steps, 10u);
  EXPECT_EQ(t.steps, t.diverged_at);
  EXPECT_EQ(t.records.size(), t.steps);  // states before the non-finite one
  EXPECT_FALSE(std::isfinite(t.final_state[0]));
}

TEST(SaRun, ValidatesConfig) {
  const auto p = builtin_contraction(2, 0.5, Vector::Zero(2));
  auto cfg = base_config(p, 10);
  cfg.horizon = 0;
  EXPECT_THROW(sa_run(cfg), InvalidArgument);
  cfg = base_config(p, 10);
  cfg.x0 = Vector::Zero(3);
  EXPECT_THROW(sa_run(cfg), InvalidArgument);
  cfg = base_config(p, 10);
  cfg.x0 = vec({std::numeric_limits<double>::quiet_NaN(), 0.0});
  EXPECT_THROW(sa_run(cfg), InvalidArgument);
  cfg = base_config(p, 10);
  cfg.noise = NoiseModel::gaussian(3);
  EXPECT_THROW(sa_run(cfg), InvalidArgument);
  cfg = base_config(p, 10);
  cfg.problem = nullptr;
  EXPECT_THROW(sa_run(cfg), InvalidArgument);
  cfg = base_config(p, 10);
  cfg.multiplier = Multiplier::custom([](std::uint64_t, std::span<const Vector>) { return 1.0; }, 1.0);
  cfg.record = RecordSpec::errors_only();
  EXPECT_THROW(sa_run(cfg), InvalidArgument);
}

TEST(SaRun, CustomMultiplierSeesHistoryThroughN) {
  const auto p = builtin_contraction(1, 0.5, vec({0.0}));
  auto cfg = base_config(p, 50);
  std::vector<std::size_t> sizes;
  cfg.multiplier = Multiplier::custom(
      [&sizes](std::uint64_t n, std::span<const Vector> h) {
        sizes.push_back(h.size());
        EXPECT_EQ(h.size(), n + 1);
        return 0.0;
      },
      1.0);
  (void)sa_run(cfg);
  EXPECT_EQ(sizes.size(), 51u);
}

TEST(MultiplierAudit, ConstantAndNormTrackingPass) {
  const auto p = builtin_contraction(2, 0.5, vec({2.0, 0.0}));
  auto cfg = base_config(p, 500);
  cfg.noise = NoiseModel::student_t(2, 2.5);
  cfg.multiplier = Multiplier::constant(2.0);
  auto rep = multiplier_audit(sa_run(cfg), 2.0);
  EXPECT_TRUE(rep.passed);
  EXPECT_FALSE(rep.first_violation.has_value());

  cfg.multiplier = Multiplier::norm_tracking(2.0);
  rep = multiplier_audit(sa_run(cfg), 2.0);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.worst_ratio, 1.0, 1e-12);
}

TEST(MultiplierAudit, FaultyMultiplierFailsEarly) {
  const auto p = builtin_contraction(1, 0.5, vec({0.0}));
  auto cfg = base_config(p, 100);
  cfg.x0 = vec({1.0});
  cfg.multiplier = Multiplier::custom(
      [](std::uint64_t n, std::span<const Vector> h) {
        return 1.0 * (1.0 + h.back().norm() * static_cast<double>(n));
      },
      1.0);
  const auto rep = multiplier_audit(sa_run(cfg), 1.0);
  EXPECT_FALSE(rep.passed);
  ASSERT_TRUE(rep.first_violation.has_value());
  // zero noise, harmonic steps: X = 1, 0.5, 0.375, 0.3125, 0.2734 and
  // 1 + n X_n first exceeds 1 + max X_k = 2 at n = 4
  EXPECT_EQ(*rep.first_violation, 4u);
  EXPECT_GT(rep.worst_ratio, 1.0);
}

TEST(MultiplierAudit, NeedsFullRecord) {
  const auto p = builtin_contraction(1, 0.5, vec({0.0}));
  auto cfg = base_config(p, 10);
  cfg.record = RecordSpec::errors_only();
  EXPECT_THROW(multiplier_audit(sa_run(cfg), 1.0), InvalidArgument);
}

TEST(SaRun, GaussianHarmonicBaseline) {
  const auto p = builtin_contraction(2, 0.5, vec({1.0, 1.0}));
  std::vector<double> finals;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto cfg = base_config(p, 100000);
    cfg.noise = NoiseModel::gaussian(2, 1.0);
    cfg.record = RecordSpec::at({100000});
    cfg.seed = seed;
    const auto t = sa_run(cfg);
    ASSERT_FALSE(t.diverged);
    finals.push_back(t.records.back().err);
  }
  EXPECT_LT(median(finals), 0.05);
}
