#include "gsa/conditions.hpp"
#include "gsa/rng.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>
#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace gsa;

namespace {

const ConditionReport& find(const std::vector<ConditionReport>& reports, const std::string& family) {
  for (const auto& r : reports) {
    if (r.family == family) return r;
  }
  throw std::runtime_error("no report for " + family);
}

std::string dump(const ConditionReport& r) {
  std::string s = r.family + " " + std::string(to_string(r.verdict)) + " by " + r.deciding_clause;
  for (const auto& e : r.evidence) {
    s += "\n  " + e.clause + " / " + e.name + " = " + std::to_string(e.value) + " [" +
         std::string(to_string(e.basis)) + ", " + std::string(to_string(e.status)) + "]";
  }
  return s;
}

double gsl_call(double x, void* p) { return (*static_cast<std::function<double(double)>*>(p))(x); }

/// E[X^2 1{|X| <= T}] for X ~ t(nu), by GSL quadrature of the density.
double t_truncated_second(double nu, double T) {
  std::function<double(double)> f = [nu](double x) {
    return x * x * std::exp(gsl_sf_lngamma((nu + 1) / 2) - gsl_sf_lngamma(nu / 2)) /
           std::sqrt(nu * M_PI) * std::pow(1 + x * x / nu, -(nu + 1) / 2);
  };
  gsl_set_error_handler_off();
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(5000);
  gsl_function F{&gsl_call, &f};
  double r = 0, err = 0;
  gsl_integration_qag(&F, 0.0, T, 0.0, 1e-12, 5000, GSL_INTEG_GAUSS61, w, &r, &err);
  gsl_integration_workspace_free(w);
  return 2 * r;
}

Schedule scaled(const Schedule& s, double k) {
  switch (s.kind()) {
    case Schedule::Kind::Harmonic:
      return Schedule::harmonic(s.D() * k);
    case Schedule::Kind::PowerLaw:
      return Schedule::power_law(s.D() * k, s.gamma());
    case Schedule::Kind::LogTempered:
      return Schedule::log_tempered(s.D() * k, s.delta());
    case Schedule::Kind::Constant:
      return Schedule::constant(s.D() * k);
  }
  return s;
}

}  // namespace

TEST(CheckH, GaussianHarmonic) {
  const auto rs = check_H(NoiseModel::gaussian(2), Schedule::harmonic());
  ASSERT_EQ(rs.size(), 5u);
  EXPECT_EQ(find(rs, "H1").verdict, ClauseStatus::Holds) << dump(find(rs, "H1"));
  EXPECT_EQ(find(rs, "H2").verdict, ClauseStatus::Holds);
  EXPECT_EQ(find(rs, "H3").verdict, ClauseStatus::Fails);  // 1/(n+1) is not O(1/(n log^d n))
  EXPECT_EQ(find(rs, "H4").verdict, ClauseStatus::Holds);
  EXPECT_EQ(find(rs, "H5").verdict, ClauseStatus::Holds);
}

TEST(CheckH, StudentTOnePointFiveAtTwoThirds) {
  const auto rs = check_H(NoiseModel::student_t(2, 1.5), Schedule::power_law(1.0, 2.0 / 3.0));
  const auto& h1 = find(rs, "H1");
  EXPECT_EQ(h1.verdict, ClauseStatus::Fails);
  EXPECT_EQ(h1.deciding_clause, "second moment") << dump(h1);
  // no alpha works: alpha < 1.5 breaks the rate bound, alpha = 1.5 has
  // infinite moment
  const auto& h2 = find(rs, "H2");
  EXPECT_EQ(h2.verdict, ClauseStatus::Fails) << dump(h2);
  ASSERT_TRUE(h2.alpha.has_value());
  EXPECT_DOUBLE_EQ(*h2.alpha, 1.5);
}

TEST(CheckH, StudentTWithFasterRateHasH2Witness) {
  const auto rs = check_H(NoiseModel::student_t(1, 1.5), Schedule::power_law(1.0, 5.0 / 6.0));
  const auto& h2 = find(rs, "H2");
  EXPECT_EQ(h2.verdict, ClauseStatus::Holds) << dump(h2);
  ASSERT_TRUE(h2.alpha && h2.D);
  EXPECT_NEAR(*h2.alpha, 1.2, 1e-9);
  EXPECT_NEAR(*h2.D, 1.0, 1e-9);  // beta_n n^(1/alpha) = 1
  EXPECT_EQ(find(rs, "H1").verdict, ClauseStatus::Fails);
}

TEST(CheckH, StudentTHarmonicWitnesses) {
  const auto rs = check_H(NoiseModel::student_t(1, 1.5), Schedule::harmonic());
  const auto& h2 = find(rs, "H2");
  EXPECT_EQ(h2.verdict, ClauseStatus::Holds);
  EXPECT_DOUBLE_EQ(*h2.alpha, 1.0);
  for (const char* f : {"H4", "H5"}) {
    const auto& r = find(rs, f);
    EXPECT_EQ(r.verdict, ClauseStatus::Holds) << dump(r);
    ASSERT_TRUE(r.alpha.has_value());
    EXPECT_LT(*r.alpha, 1.5);
    EXPECT_GT(*r.alpha, 1.0);
  }
}

TEST(CheckH, LogTemperedCauchyPreset) {
  const auto rs = check_H(NoiseModel::log_tempered_cauchy(1, 2.0), Schedule::log_tempered(1.0, 1.0));
  EXPECT_EQ(find(rs, "H1").verdict, ClauseStatus::Fails);
  const auto& h3 = find(rs, "H3");
  EXPECT_EQ(h3.verdict, ClauseStatus::Holds) << dump(h3);
  EXPECT_DOUBLE_EQ(*h3.delta, 1.0);
  // E|W| < inf for p = 2, and 1/(n log(1 + n)) <= D / n
  const auto& h2 = find(rs, "H2");
  EXPECT_EQ(h2.verdict, ClauseStatus::Holds) << dump(h2);
  EXPECT_DOUBLE_EQ(*h2.alpha, 1.0);
  EXPECT_NEAR(*h2.D, 1.0 / std::log(2.0), 1e-9);
}

TEST(CheckH, InfiniteMeanCauchyNeedsSymmetry) {
  // p = 1: E|W| = inf, but E|W| / log(1 + |W|) < inf; H3 is the only route
  const auto rs = check_H(NoiseModel::log_tempered_cauchy(1, 1.0), Schedule::log_tempered(1.0, 1.0));
  EXPECT_EQ(find(rs, "H2").verdict, ClauseStatus::Fails);
  EXPECT_EQ(find(rs, "H3").verdict, ClauseStatus::Holds) << dump(find(rs, "H3"));
}

TEST(CheckH, RatePremiseFailsForConstantRate) {
  const auto rs = check_H(NoiseModel::gaussian(1), Schedule::constant(0.1));
  for (const auto& r : rs) EXPECT_EQ(r.verdict, ClauseStatus::Fails) << dump(r);
}

TEST(CheckK, GaussianPairsK1) {
  const auto rs = check_K(NoiseModel::gaussian(2), Schedule::log_tempered(1.0, 1.0),
                          IncrementSchedule::log_power(1.0));
  ASSERT_EQ(rs.size(), 5u);
  const auto& k1 = find(rs, "K1");
  EXPECT_EQ(k1.verdict, ClauseStatus::Holds) << dump(k1);
}

TEST(CheckK, LogTemperedCauchyPairsK3) {
  const auto rs = check_K(NoiseModel::log_tempered_cauchy(1, 2.0), Schedule::log_tempered(1.0, 1.0),
                          IncrementSchedule::log_power(0.5));
  const auto& k3 = find(rs, "K3");
  EXPECT_EQ(k3.verdict, ClauseStatus::Holds) << dump(k3);
  ASSERT_TRUE(k3.delta.has_value());
  EXPECT_NEAR(*k3.delta, 0.5, 1e-9);
  EXPECT_EQ(find(rs, "K1").verdict, ClauseStatus::Fails);
}

TEST(CheckKProperty, ConstantIncrementReducesToH) {
  const std::vector<NoiseModel> models{
      NoiseModel::gaussian(1),          NoiseModel::student_t(1, 1.5),
      NoiseModel::student_t(2, 3.0),    NoiseModel::log_tempered_cauchy(1, 2.0),
      NoiseModel::log_tempered_cauchy(1, 0.8), NoiseModel::martingale_difference(1, 2.5)};
  const std::vector<Schedule> etas{Schedule::harmonic(), Schedule::power_law(1.0, 0.7),
                                   Schedule::power_law(0.5, 5.0 / 6.0),
                                   Schedule::log_tempered(1.0, 1.0),
                                   Schedule::log_tempered(2.0, 0.5)};
  CounterRng rng(5);
  int compared = 0;
  for (const auto& m : models) {
    for (const auto& eta : etas) {
      const double c0 = 0.1 + 2.0 * rng.uniform();
      const auto k = check_K(m, eta, IncrementSchedule::constant(c0), 10000);
      const auto h = check_H(m, scaled(eta, 1.0 / c0), 10000);
      std::string why;
      EXPECT_TRUE(substitution_consistent(k, h, &why))
          << m.describe() << " " << eta.describe() << " c0=" << c0 << ": " << why;
      ++compared;
    }
  }
  EXPECT_EQ(compared, 30);
}

TEST(ConditionsProperty, NoUnbackedCertificates) {
  const std::vector<NoiseModel> models{
      NoiseModel::gaussian(1), NoiseModel::student_t(1, 1.5), NoiseModel::log_tempered_cauchy(1, 2.0),
      NoiseModel::martingale_difference(1, 2.5), NoiseModel::drifting_mean(1, 2.5, 1.0)};
  const std::vector<Schedule> rates{Schedule::harmonic(), Schedule::power_law(1.0, 0.6),
                                    Schedule::log_tempered(1.0, 1.0), Schedule::constant(0.1)};
  for (const auto& m : models) {
    for (const auto& s : rates) {
      auto reports = check_H(m, s, 10000);
      for (auto& r : check_K(m, s, IncrementSchedule::log_power(1.0), 10000)) reports.push_back(r);
      for (const auto& r : reports) {
        if (r.verdict == ClauseStatus::Inconclusive) continue;
        EXPECT_TRUE(r.fully_backed()) << dump(r);
        for (const auto& e : r.evidence) {
          EXPECT_TRUE(is_backed(e.basis)) << dump(r);
        }
        EXPECT_FALSE(r.deciding_clause.empty());
      }
    }
  }
}

TEST(ConditionsProperty, DriftingMeanIsNeverCertifiedWithoutSymmetry) {
  const auto rs = check_H(NoiseModel::drifting_mean(1, 2.5, 1.0), Schedule::log_tempered(1.0, 1.0));
  EXPECT_NE(find(rs, "H3").verdict, ClauseStatus::Holds);
}

TEST(Truncation, Thresholds) {
  EXPECT_DOUBLE_EQ(TruncationScheme::step_scaled().threshold(10, 0.25), 4.0);
  EXPECT_NEAR(TruncationScheme::moment_scaled(1.5).threshold(1000, 0.0), 100.0, 1e-9);
  for (double delta : {0.25, 0.5, 1.0}) {
    for (std::uint64_t n : {1ull, 10ull, 1000ull, 1000000ull}) {
      const double T = TruncationScheme::log_scaled(delta).threshold(n, 0.0);
      EXPECT_NEAR(T / std::pow(std::log1p(T), delta), static_cast<double>(n), 1e-9 * n);
    }
  }
}

TEST(GTerms, StudentTMatchesGslOracle) {
  for (double nu : {1.5, 2.5}) {
    for (double T : {0.5, 3.0, 50.0, 1e4}) {
      const auto g = g_terms(NoiseModel::student_t(1, nu), T);
      ASSERT_TRUE(g.has_value());
      EXPECT_NEAR(g->p_out, 2 * gsl_cdf_tdist_Q(T, nu), 1e-9);
      const double second = t_truncated_second(nu, T);
      EXPECT_NEAR(g->second, second, 1e-7 * std::max(1.0, second));
      EXPECT_EQ(g->v, 0.0);
    }
  }
  EXPECT_FALSE(g_terms(NoiseModel::drifting_mean(1, 2.5, 1.0), 1.0).has_value());
}

TEST(GTerms, SymmetricTruncatedMeanIsZero) {
  for (const auto& m : {NoiseModel::gaussian(1), NoiseModel::student_t(1, 1.5),
                        NoiseModel::log_tempered_cauchy(1, 2.0)}) {
    for (double T : {0.5, 2.0, 100.0}) {
      const auto [mean, se] = truncated_mean_mc(m, T, 200000, 3);
      EXPECT_LT(std::abs(mean), 3.0 * se + 1e-12) << m.describe() << " T=" << T;
    }
  }
  EXPECT_THROW(truncated_mean_mc(NoiseModel::gaussian(1), 1.0, 1, 0), InvalidArgument);
}

TEST(CheckG, GaussianHarmonicStepScaled) {
  const auto r = check_G_numeric(NoiseModel::gaussian(1), Schedule::harmonic(),
                                 TruncationScheme::step_scaled());
  EXPECT_EQ(r.verdict, ClauseStatus::Holds) << dump(r);
}

TEST(CheckG, StudentTWithMatchedTruncation) {
  const auto r = check_G_numeric(NoiseModel::student_t(1, 1.5), Schedule::power_law(1.0, 1.0 / 1.2),
                                 TruncationScheme::moment_scaled(1.2));
  EXPECT_EQ(r.verdict, ClauseStatus::Holds) << dump(r);
  EXPECT_TRUE(r.fully_backed());
}

TEST(CheckG, BoundaryCaseIsNotCertified) {
  // sum P(|W|^1.5 > n) ~ sum 1/n diverges for t(1.5)
  const auto r = check_G_numeric(NoiseModel::student_t(1, 1.5), Schedule::power_law(1.0, 2.0 / 3.0),
                                 TruncationScheme::moment_scaled(1.5));
  EXPECT_NE(r.verdict, ClauseStatus::Holds) << dump(r);
}

TEST(CheckG, UnsupportedDependenceIsInconclusive) {
  const auto r = check_G_numeric(NoiseModel::drifting_mean(1, 2.5, 1.0), Schedule::harmonic(),
                                 TruncationScheme::step_scaled());
  EXPECT_EQ(r.verdict, ClauseStatus::Inconclusive);
}

TEST(G7, PartialSumsAreReplayable) {
  const std::vector<std::uint64_t> cps{10, 100, 1000};
  const auto a = g7_partial_sums(NoiseModel::gaussian(1), Schedule::harmonic(), 4, cps);
  ASSERT_EQ(a.size(), 3u);
  NoiseStream s(NoiseModel::gaussian(1), 4);
  double sum = 0;
  for (std::uint64_t n = 0; n < 1000; ++n) {
    sum += Schedule::harmonic()(n) * s.next()[0];
  }
  EXPECT_NEAR(a[2].second, sum, 1e-12);
  EXPECT_EQ(a, g7_partial_sums(NoiseModel::gaussian(1), Schedule::harmonic(), 4, cps));
}

TEST(RmReport, Verdicts) {
  EXPECT_EQ(rm_report(Schedule::harmonic()).verdict, ClauseStatus::Holds);
  EXPECT_EQ(rm_report(Schedule::power_law(1.0, 0.7)).verdict, ClauseStatus::Holds);
  const auto slow = rm_report(Schedule::power_law(1.0, 0.4));
  EXPECT_EQ(slow.verdict, ClauseStatus::Fails);
  EXPECT_EQ(slow.deciding_clause, "sum beta^2 < inf");
  const auto flat = rm_report(Schedule::constant(0.1));
  EXPECT_EQ(flat.verdict, ClauseStatus::Fails);
  EXPECT_EQ(flat.deciding_clause, "beta -> 0");
}

TEST(KwbReport, Verdicts) {
  EXPECT_EQ(kwb_report(Schedule::log_tempered(1.0, 1.0), IncrementSchedule::log_power(1.0)).verdict,
            ClauseStatus::Holds);
  const auto r = kwb_report(Schedule::harmonic(), IncrementSchedule::constant(0.5));
  EXPECT_EQ(r.verdict, ClauseStatus::Fails);
  EXPECT_EQ(r.deciding_clause, "c_n -> 0");
  // eta c = n^-1 n^-0.1: summable; (eta / c)^2 = n^-1.8: summable
  EXPECT_EQ(kwb_report(Schedule::harmonic(), IncrementSchedule::power_law(0.1)).verdict,
            ClauseStatus::Holds);
  // (eta / c)^2 = n^-1 diverges
  EXPECT_EQ(kwb_report(Schedule::harmonic(), IncrementSchedule::power_law(0.5)).verdict,
            ClauseStatus::Fails);
}

TEST(V3xReport, Verdicts) {
  EXPECT_EQ(v3x_report(MaskPolicy::all_ones(3), Schedule::harmonic(), 1000).verdict,
            ClauseStatus::Holds);
  EXPECT_EQ(v3x_report(MaskPolicy::round_robin(4, 2), Schedule::harmonic(), 1000).verdict,
            ClauseStatus::Holds);
  const auto dead = v3x_report(MaskPolicy::fixed_row({1, 0}), Schedule::harmonic(), 1000);
  EXPECT_EQ(dead.verdict, ClauseStatus::Fails);
  EXPECT_EQ(dead.deciding_clause, "coordinate 1");
  const NoiseModel noise = NoiseModel::gaussian(2);
  EXPECT_EQ(v3x_report(MaskPolicy::noise_driven(2), Schedule::harmonic(), 1000, &noise, 1).verdict,
            ClauseStatus::Inconclusive);
}
