#include "gsa/rng.hpp"
#include "gsa/schedules.hpp"
#include "gsa/series.hpp"

#include <gsl/gsl_math.h>
#include <gsl/gsl_sf_psi.h>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace gsa;

TEST(Schedule, ClosedFormValues) {
  const auto h = Schedule::harmonic(1.0);
  EXPECT_DOUBLE_EQ(h(0), 1.0);
  EXPECT_DOUBLE_EQ(h(9), 0.1);
  EXPECT_NEAR(Schedule::log_tempered(1.0, 1.0)(1), 1.442695, 1e-6);
  EXPECT_DOUBLE_EQ(Schedule::log_tempered(1.0, 1.0)(1), 1.0 / std::log(2.0));
  EXPECT_NEAR(Schedule::power_law(1.0, 2.0 / 3.0)(8), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(Schedule::constant(0.1)(12345), 0.1);
}

TEST(Schedule, LogTemperedStartsAtD) {
  EXPECT_DOUBLE_EQ(Schedule::log_tempered(2.5, 0.5)(0), 2.5);
  EXPECT_DOUBLE_EQ(Schedule::power_law(3.0, 0.5)(0), 3.0);
}

TEST(Schedule, RejectsOutOfRangeParameters) {
  EXPECT_THROW(Schedule::log_tempered(1.0, 1.5), InvalidArgument);
  EXPECT_THROW(Schedule::log_tempered(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(Schedule::power_law(1.0, 1.2), InvalidArgument);
  EXPECT_THROW(Schedule::harmonic(0.0), InvalidArgument);
  EXPECT_THROW(Schedule::harmonic(-1.0), InvalidArgument);
  EXPECT_THROW(IncrementSchedule::log_power(2.0), InvalidArgument);
  EXPECT_THROW(IncrementSchedule::constant(0.0), InvalidArgument);
}

TEST(Schedule, LogTemperedMeetsItsRateBoundExactly) {
  for (double delta : {0.25, 0.5, 1.0}) {
    const auto s = Schedule::log_tempered(2.0, delta);
    for (std::uint64_t n = 1; n < 100000; n = n * 3 + 1) {
      EXPECT_LE(s(n), 2.0 / (n * std::pow(std::log1p(static_cast<double>(n)), delta)));
    }
  }
}

TEST(Schedule, PositiveAndEventuallyMonotoneBelowOne) {
  const std::vector<Schedule> all{Schedule::harmonic(1.0), Schedule::harmonic(5.0),
                                  Schedule::power_law(3.0, 0.5), Schedule::power_law(1.0, 1.0),
                                  Schedule::log_tempered(1.0, 1.0),
                                  Schedule::log_tempered(4.0, 0.25)};
  for (const auto& s : all) {
    std::uint64_t n_star = 0;
    while (n_star <= 1000 && s(n_star) >= 1.0) ++n_star;
    ASSERT_LE(n_star, 1000u) << s.describe();
    for (std::uint64_t n = n_star; n < 200000; ++n) {
      ASSERT_GT(s(n), 0.0);
      ASSERT_LE(s(n + 1), s(n)) << s.describe() << " at " << n;
    }
  }
}

TEST(IncrementSchedule, ValuesAndLimit) {
  const auto c = IncrementSchedule::log_power(1.0);
  EXPECT_DOUBLE_EQ(c(0), 1.0 / std::log(2.0));
  EXPECT_DOUBLE_EQ(c(10), 1.0 / std::log(12.0));
  EXPECT_LT(c(1000000), 0.08);
  const auto p = IncrementSchedule::power_law(0.5);
  EXPECT_DOUBLE_EQ(p(0), 1.0);
  EXPECT_DOUBLE_EQ(p(16), 0.25);
  EXPECT_TRUE(tends_to_zero(c.form()));
  EXPECT_FALSE(tends_to_zero(IncrementSchedule::constant(0.3).form()));
}

TEST(Series, BertrandVerdicts) {
  EXPECT_EQ(sum_verdict({1, 1, 0}), SeriesVerdict::Diverges);
  EXPECT_EQ(sum_verdict({1, 2, 0}), SeriesVerdict::Converges);
  EXPECT_EQ(sum_verdict({1, 1, 1}), SeriesVerdict::Diverges);
  EXPECT_EQ(sum_verdict({1, 1, 2}), SeriesVerdict::Converges);
  EXPECT_EQ(sum_verdict({1, 0.9, 5}), SeriesVerdict::Diverges);
  EXPECT_EQ(sum_verdict({1, 1.1, -5}), SeriesVerdict::Converges);
  EXPECT_EQ(sum_verdict({0, 0, 0}), SeriesVerdict::Converges);
  // 2/3 * 1.5 must count as exactly 1
  EXPECT_EQ(sum_verdict(PowerLogForm{1, 0.6666666666666666, 0}.pow(1.5)),
            SeriesVerdict::Diverges);
}

TEST(Series, NoFormMeansInconclusive) {
  const auto r = analyze_series([](std::uint64_t n) { return 1.0 / ((n + 1.0) * (n + 1.0)); },
                                std::nullopt, 1000);
  EXPECT_EQ(r.verdict, SeriesVerdict::Inconclusive);
}

TEST(Series, TailIntegralBoundsTheTail) {
  // sum_{n >= N} n^-2 <= integral from N - 1, and the estimate at N tracks it
  const PowerLogForm f{1, 2, 0};
  const double N = 1000;
  double tail = 0;
  for (double n = N; n < 1e7; ++n) tail += 1.0 / (n * n);
  EXPECT_NEAR(tail_integral(f, N), tail, 2e-6);
}

TEST(RobbinsMonro, HarmonicPartialSumsMatchDigammaOracle) {
  const std::uint64_t N = 1000000;
  const auto r = check_rm_conditions(Schedule::harmonic(1.0), N);
  // sum_{n<N} 1/(n+1) = H_N = psi(N+1) + gamma
  const double H = gsl_sf_psi(static_cast<double>(N) + 1.0) + M_EULER;
  EXPECT_NEAR(r.sum_beta.partial_sum, H, 1e-10);
  EXPECT_NEAR(r.sum_beta.partial_sum, 14.39, 0.01);
  EXPECT_EQ(r.sum_beta.verdict, SeriesVerdict::Diverges);
  // sum_{n<N} 1/(n+1)^2 = pi^2/6 - psi_1(N+1)
  const double S2 = M_PI * M_PI / 6.0 - gsl_sf_psi_1(static_cast<double>(N) + 1.0);
  EXPECT_NEAR(r.sum_beta_sq.partial_sum, S2, 1e-12);
  EXPECT_EQ(r.sum_beta_sq.verdict, SeriesVerdict::Converges);
  EXPECT_NEAR(r.sum_beta_sq.partial_sum + r.sum_beta_sq.tail_estimate, M_PI * M_PI / 6.0, 1e-9);
  EXPECT_TRUE(r.tends_to_zero);
}

TEST(RobbinsMonro, ConstantFailsBoth) {
  const auto r = check_rm_conditions(Schedule::constant(0.1), 1000);
  EXPECT_EQ(r.sum_beta.verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(r.sum_beta_sq.verdict, SeriesVerdict::Diverges);
  EXPECT_FALSE(r.tends_to_zero);
  EXPECT_NEAR(r.sum_beta.partial_sum, 100.0, 1e-9);
}

TEST(RobbinsMonro, LogTemperedDivergesButSquaresConverge) {
  const auto r = check_rm_conditions(Schedule::log_tempered(1.0, 1.0), 100000);
  EXPECT_EQ(r.sum_beta.verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(r.sum_beta_sq.verdict, SeriesVerdict::Converges);
  // integral-test oracle: partial sum grows like log log N
  double direct = 1.0;
  for (int n = 1; n < 100000; ++n) direct += 1.0 / (n * std::log1p(n));
  EXPECT_NEAR(r.sum_beta.partial_sum, direct, 1e-9);
}

TEST(KWB, LogPresetHolds) {
  const auto r = check_kwb_preset(Schedule::log_tempered(1.0, 1.0),
                                  IncrementSchedule::log_power(1.0), 100000);
  EXPECT_TRUE(r.c_tends_to_zero);
  EXPECT_EQ(r.sum_ratio_sq.verdict, SeriesVerdict::Converges);
  EXPECT_EQ(r.sum_eta_c.verdict, SeriesVerdict::Converges);
  EXPECT_EQ(r.sum_eta.verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(r.verdict, ClauseStatus::Holds);
  EXPECT_TRUE(r.failed_clause.empty());
}

TEST(KWB, ConstantEtaFailsOnRatioSquares) {
  const auto r = check_kwb_preset(Schedule::constant(0.1), IncrementSchedule::log_power(1.0),
                                  10000);
  EXPECT_EQ(r.sum_eta.verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(r.sum_ratio_sq.verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(r.verdict, ClauseStatus::Fails);
}

TEST(KWB, ConstantIncrementFailsFirstClause) {
  const auto r = check_kwb_preset(Schedule::harmonic(1.0), IncrementSchedule::constant(0.5),
                                  10000);
  EXPECT_FALSE(r.c_tends_to_zero);
  EXPECT_EQ(r.verdict, ClauseStatus::Fails);
  EXPECT_NE(r.failed_clause.find("c_n"), std::string::npos) << r.failed_clause;
}

TEST(Multiplier, Examples) {
  const std::vector<Vector> hist{Vector::Constant(1, 1.0), Vector::Constant(1, 3.0),
                                 Vector::Constant(1, 2.0)};
  EXPECT_DOUBLE_EQ(eval_multiplier(Multiplier::constant(2.5), hist), 2.5);
  EXPECT_DOUBLE_EQ(eval_multiplier(Multiplier::norm_tracking(1.0), hist), 4.0);
  std::vector<Vector> four(4, Vector::Zero(2));
  EXPECT_DOUBLE_EQ(eval_multiplier(Multiplier::signed_bounded(1.0), four), -1.0);
  four.push_back(Vector::Zero(2));
  EXPECT_DOUBLE_EQ(eval_multiplier(Multiplier::signed_bounded(1.0), four), 1.0);
  EXPECT_THROW(eval_multiplier(Multiplier::constant(1.0), {}), InvalidArgument);
}

TEST(Multiplier, BoundHoldsOnRandomHistories) {
  CounterRng rng(99);
  const std::vector<Multiplier> ms{Multiplier::constant(0.7), Multiplier::norm_tracking(1.3),
                                   Multiplier::norm_tracking(0.5, NormKind::LInf),
                                   Multiplier::signed_bounded(2.0)};
  for (int trial = 0; trial < 10000; ++trial) {
    const int len = 1 + static_cast<int>(rng() % 12);
    const int dim = 1 + static_cast<int>(rng() % 4);
    std::vector<Vector> hist;
    for (int k = 0; k < len; ++k) {
      Vector u(dim);
      const double scale = std::pow(10.0, 6.0 * rng.uniform() - 3.0);
      for (int i = 0; i < dim; ++i) u[i] = scale * (2.0 * rng.uniform() - 1.0);
      hist.push_back(u);
    }
    for (const auto& m : ms) {
      double mx = 0;
      for (const auto& u : hist) mx = std::max(mx, norm(u, m.norm()));
      ASSERT_LE(std::abs(eval_multiplier(m, hist)), m.C1() * (1.0 + mx)) << m.describe();
    }
  }
}

TEST(Multiplier, IncrementalStateMatchesFullHistory) {
  const auto m = Multiplier::norm_tracking(2.0);
  MultiplierState st(m);
  std::vector<Vector> hist;
  CounterRng rng(5);
  for (int n = 0; n < 50; ++n) {
    Vector u(3);
    for (int i = 0; i < 3; ++i) u[i] = rng.uniform() * n;
    hist.push_back(u);
    st.observe(u);
    EXPECT_DOUBLE_EQ(st.value(n), eval_multiplier(m, hist));
  }
}
