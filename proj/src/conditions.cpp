#include "gsa/conditions.hpp"

#include "gsa/quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gsa {

std::string_view to_string(EvidenceBasis b) {
  switch (b) {
    case EvidenceBasis::Analytic:
      return "analytic";
    case EvidenceBasis::Quadrature:
      return "quadrature";
    case EvidenceBasis::TrendFit:
      return "trend_fit";
    case EvidenceBasis::Diagnostic:
      return "diagnostic";
    case EvidenceBasis::None:
      return "none";
  }
  return "none";
}

bool is_backed(EvidenceBasis b) {
  return b == EvidenceBasis::Analytic || b == EvidenceBasis::Quadrature ||
         b == EvidenceBasis::TrendFit;
}

bool ConditionReport::fully_backed() const {
  return std::all_of(evidence.begin(), evidence.end(),
                     [](const Evidence& e) { return is_backed(e.basis); });
}

RateSeq rate_of(const Schedule& s) {
  return {[s](std::uint64_t n) { return s(n); }, s.form(), s.describe()};
}

RateSeq ratio_of(const Schedule& eta, const IncrementSchedule& c) {
  return {[eta, c](std::uint64_t n) { return eta(n) / c(n); }, eta.form() / c.form(),
          fmt::format("{} / {}", eta.describe(), c.describe())};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSupHorizon = 1000000;

double snap(double a) { return std::round(a * 1e9) / 1e9; }

EvidenceBasis basis_of(MomentVerdict::Basis b) {
  switch (b) {
    case MomentVerdict::Basis::ClosedForm:
    case MomentVerdict::Basis::Bound:
      return EvidenceBasis::Analytic;
    case MomentVerdict::Basis::Quadrature:
      return EvidenceBasis::Quadrature;
    case MomentVerdict::Basis::None:
      return EvidenceBasis::None;
  }
  return EvidenceBasis::None;
}

ClauseStatus status_of(const MomentVerdict& v) {
  if (v.finite()) return ClauseStatus::Holds;
  if (v.infinite()) return ClauseStatus::Fails;
  return ClauseStatus::Inconclusive;
}

ClauseStatus bool_status(bool b) { return b ? ClauseStatus::Holds : ClauseStatus::Fails; }

class Builder {
 public:
  explicit Builder(std::string family) { r_.family = std::move(family); }

  void add(std::string clause, std::string name, double value, EvidenceBasis basis,
           ClauseStatus status) {
    if (!is_backed(basis)) status = ClauseStatus::Inconclusive;
    r_.evidence.push_back({std::move(clause), std::move(name), value, basis, status});
  }
  void diag(std::string clause, std::string name, double value) {
    r_.diagnostics.push_back(
        {std::move(clause), std::move(name), value, EvidenceBasis::Diagnostic,
         ClauseStatus::Inconclusive});
  }
  ConditionReport& report() { return r_; }

  ConditionReport finish() {
    for (const auto& e : r_.evidence) {
      if (e.status == ClauseStatus::Fails) {
        r_.verdict = ClauseStatus::Fails;
        r_.deciding_clause = e.clause;
        return r_;
      }
    }
    for (const auto& e : r_.evidence) {
      if (e.status == ClauseStatus::Inconclusive) {
        r_.verdict = ClauseStatus::Inconclusive;
        r_.deciding_clause = e.clause;
        return r_;
      }
    }
    r_.verdict = r_.evidence.empty() ? ClauseStatus::Inconclusive : ClauseStatus::Holds;
    r_.deciding_clause = r_.evidence.empty() ? "" : r_.evidence.back().clause;
    return r_;
  }

 private:
  ConditionReport r_;
};

/// max(rate(0), sup_{1 <= n <= N} rate(n) / bound(n))
double sup_ratio(const RateSeq& rate, const std::function<double(double)>& bound,
                 std::uint64_t horizon) {
  double d = rate.value(0);
  const std::uint64_t N = std::min(horizon, kSupHorizon);
  for (std::uint64_t n = 1; n <= N; ++n) {
    d = std::max(d, rate.value(n) / bound(static_cast<double>(n)));
  }
  return d;
}

struct NoiseFacts {
  bool iid = false;
  bool symmetric = false;
  bool zero_mean = false;
  bool independent = false;
  bool mean_to_zero = true;
  bool mds = false;
};

NoiseFacts facts_direct(const NoiseModel& m) {
  NoiseFacts f;
  f.iid = m.is_iid();
  f.symmetric = f.iid && m.symmetric();
  f.zero_mean = m.symmetric();
  f.independent = m.dependence() != Dependence::MartingaleDifference;
  f.mean_to_zero = true;  // mu_n = mu_0 / n or identically zero
  f.mds = m.symmetric();
  return f;
}

/// Facts for M' (families 1-3) and M = (M' - M'') / 2 (families 4-5). Both
/// members of a pair share the law of step n, so M has mean zero and is
/// symmetric given the past.
NoiseFacts facts_pairs(const NoiseModel& m) {
  NoiseFacts f;
  f.iid = m.is_iid();
  f.symmetric = f.iid;
  f.zero_mean = true;
  f.independent = m.dependence() != Dependence::MartingaleDifference;
  f.mean_to_zero = true;
  f.mds = true;
  return f;
}

struct FamilyContext {
  const NoiseModel& model;
  const RateSeq& rate;
  NoiseFacts facts;
  char tag;  // 'H' or 'K'
  std::uint64_t horizon;
};

MomentVerdict moment_at(const FamilyContext& ctx, double alpha, bool pair_difference) {
  MomentVerdict v = moment_envelope(ctx.model, alpha);
  // E|(A - B)/2|^a <= E|A|^a for a >= 1: the envelope bounds the difference.
  if (pair_difference && v.finite()) v.basis = MomentVerdict::Basis::Bound;
  return v;
}

std::string rate_clause(const FamilyContext& ctx, int k) {
  return fmt::format("{}{}", ctx.tag == 'H' ? 'L' : 'N', k);
}

void add_premise(Builder& b, const FamilyContext& ctx) {
  const auto& f = ctx.rate.form;
  b.add("U8: rate -> 0", "rate exponent", f.power, EvidenceBasis::Analytic,
        bool_status(tends_to_zero(f)));
  const auto sr = analyze_series(ctx.rate.value, f, ctx.horizon);
  b.add("U8: sum rate = inf", "partial sum", sr.partial_sum, EvidenceBasis::Analytic,
        bool_status(sr.verdict == SeriesVerdict::Diverges));
}

ConditionReport family1(const FamilyContext& ctx) {
  Builder b(fmt::format("{}1", ctx.tag));
  add_premise(b, ctx);
  b.add("iid", "iid", ctx.facts.iid, EvidenceBasis::Analytic, bool_status(ctx.facts.iid));
  if (ctx.tag == 'H') {
    b.add("zero mean", "symmetric", ctx.facts.zero_mean, EvidenceBasis::Analytic,
          bool_status(ctx.facts.zero_mean));
  }
  const auto mv = moment_at(ctx, 2.0, false);
  b.add("second moment", "E|W|^2", mv.value, basis_of(mv.basis), status_of(mv));
  const auto sq = ctx.rate.form.pow(2.0);
  const auto sr = analyze_series(
      [&](std::uint64_t n) {
        const double r = ctx.rate.value(n);
        return r * r;
      },
      sq, ctx.horizon);
  b.add(rate_clause(ctx, 1), "partial sum of rate^2", sr.partial_sum, EvidenceBasis::Analytic,
        bool_status(sr.verdict == SeriesVerdict::Converges));
  b.report().alpha = 2.0;
  return b.finish();
}

ConditionReport family2(const FamilyContext& ctx) {
  Builder b(fmt::format("{}2", ctx.tag));
  add_premise(b, ctx);
  b.add("iid", "iid", ctx.facts.iid, EvidenceBasis::Analytic, bool_status(ctx.facts.iid));
  if (ctx.tag == 'H') {
    b.add("zero mean", "symmetric", ctx.facts.zero_mean, EvidenceBasis::Analytic,
          bool_status(ctx.facts.zero_mean));
  }
  const PowerLogForm& f = ctx.rate.form;
  auto bound_holds = [&](double a) {
    PowerLogForm g = f;
    g.power -= 1.0 / a;
    return is_bounded(g);
  };
  // Smallest alpha in [1, 2) with rate_n <= D n^(-1/alpha).
  std::optional<double> alpha;
  if (bound_holds(1.0)) {
    alpha = 1.0;
  } else if (f.power > 0.0) {
    const double a0 = snap(1.0 / f.power);
    if (a0 < 2.0 && bound_holds(a0)) {
      alpha = a0;
    } else if (a0 + 0.01 < 2.0 && bound_holds(a0 + 0.01)) {
      alpha = a0 + 0.01;
    }
  }
  const std::string clause = rate_clause(ctx, 2);
  if (!alpha) {
    b.add(clause, "rate exponent", f.power, EvidenceBasis::Analytic, ClauseStatus::Fails);
    return b.finish();
  }
  const double a = *alpha;
  const auto mv = moment_at(ctx, a, false);
  b.add("alpha moment", fmt::format("E|W|^{}", a), mv.value, basis_of(mv.basis), status_of(mv));
  const double D = sup_ratio(ctx.rate, [a](double n) { return std::pow(n, -1.0 / a); },
                             ctx.horizon);
  b.add(clause, "D", D, EvidenceBasis::Analytic, ClauseStatus::Holds);
  b.report().alpha = a;
  b.report().D = D;
  return b.finish();
}

ConditionReport family3(const FamilyContext& ctx) {
  Builder b(fmt::format("{}3", ctx.tag));
  add_premise(b, ctx);
  b.add("iid", "iid", ctx.facts.iid, EvidenceBasis::Analytic, bool_status(ctx.facts.iid));
  b.add("symmetric", "symmetric", ctx.facts.symmetric, EvidenceBasis::Analytic,
        bool_status(ctx.facts.symmetric));
  const PowerLogForm& f = ctx.rate.form;
  // Largest delta in (0, 1] with rate_n <= D / (n log(1 + n)^delta).
  std::optional<double> delta;
  if (f.power > 1.0 + kExponentTol) {
    delta = 1.0;
  } else if (std::abs(f.power - 1.0) <= kExponentTol && f.log_power > kExponentTol) {
    delta = std::min(1.0, snap(f.log_power));
  }
  const std::string clause = rate_clause(ctx, 3);
  if (!delta) {
    b.add(clause, "rate log exponent", f.log_power, EvidenceBasis::Analytic,
          ClauseStatus::Fails);
    return b.finish();
  }
  const double d = *delta;
  const auto lv = ctx.facts.iid ? log_moment(ctx.model, d) : MomentVerdict{};
  b.add("log moment", fmt::format("E[|W| / log(1 + |W|)^{}]", d), lv.value,
        lv.status == MomentVerdict::Status::Unsupported && !ctx.facts.iid
            ? EvidenceBasis::Analytic
            : basis_of(lv.basis),
        ctx.facts.iid ? status_of(lv) : ClauseStatus::Fails);
  const double D = sup_ratio(
      ctx.rate, [d](double n) { return 1.0 / (n * std::pow(std::log1p(n), d)); }, ctx.horizon);
  b.add(clause, "D", D, EvidenceBasis::Analytic, ClauseStatus::Holds);
  b.report().delta = d;
  b.report().D = D;
  return b.finish();
}

/// Families 4 and 5 share the alpha search for sum rate^alpha nu_alpha < inf.
void add_alpha_summability(Builder& b, const FamilyContext& ctx, int k) {
  const PowerLogForm& f = ctx.rate.form;
  auto summable = [&](double a) { return sum_verdict(f.pow(a)) == SeriesVerdict::Converges; };
  const std::string clause = rate_clause(ctx, k);

  std::vector<double> grid;
  for (int i = 40; i >= 21; --i) grid.push_back(i / 20.0);  // 2.0 .. 1.05
  std::optional<double> alpha;
  for (double a : grid) {
    if (summable(a) && moment_at(ctx, a, ctx.tag == 'K').finite()) {
      alpha = a;
      break;
    }
  }
  // Smallest summable alpha in (1, 2].
  double a_min = 1.0 + 1e-6;
  if (f.power > 0.0) {
    const double a0 = snap(1.0 / f.power);
    a_min = std::max(a_min, summable(a0) ? a0 : a0 + 1e-6);
  }
  if (!alpha && a_min <= 2.0 && summable(a_min) && moment_at(ctx, a_min, ctx.tag == 'K').finite()) {
    alpha = a_min;
  }

  if (!alpha) {
    if (!summable(2.0)) {
      b.add(clause, "rate exponent", f.power, EvidenceBasis::Analytic, ClauseStatus::Fails);
    } else {
      const auto mv = moment_at(ctx, std::min(a_min, 2.0), ctx.tag == 'K');
      b.add("alpha moment", fmt::format("E|W|^{}", std::min(a_min, 2.0)), mv.value,
            basis_of(mv.basis), mv.infinite() ? ClauseStatus::Fails : ClauseStatus::Inconclusive);
    }
    return;
  }
  const double a = *alpha;
  const auto mv = moment_at(ctx, a, ctx.tag == 'K');
  b.add("alpha moment", fmt::format("sup_n E|W_n|^{}", a), mv.value, basis_of(mv.basis),
        status_of(mv));
  const auto sr = analyze_series(
      [&](std::uint64_t n) { return std::pow(ctx.rate.value(n), a) * mv.value; }, f.pow(a),
      ctx.horizon);
  b.add(clause, "partial sum of rate^alpha nu_alpha", sr.partial_sum, EvidenceBasis::Analytic,
        ClauseStatus::Holds);
  b.report().alpha = a;
}

ConditionReport family4(const FamilyContext& ctx) {
  Builder b(fmt::format("{}4", ctx.tag));
  add_premise(b, ctx);
  b.add("independent", "independent", ctx.facts.independent, EvidenceBasis::Analytic,
        bool_status(ctx.facts.independent));
  b.add("mean -> 0", "mean tends to zero", ctx.facts.mean_to_zero, EvidenceBasis::Analytic,
        bool_status(ctx.facts.mean_to_zero));
  add_alpha_summability(b, ctx, 4);
  return b.finish();
}

ConditionReport family5(const FamilyContext& ctx) {
  Builder b(fmt::format("{}5", ctx.tag));
  add_premise(b, ctx);
  b.add("martingale difference", "martingale difference", ctx.facts.mds,
        EvidenceBasis::Analytic, bool_status(ctx.facts.mds));
  add_alpha_summability(b, ctx, 5);
  return b.finish();
}

std::vector<ConditionReport> all_families(const FamilyContext& ctx) {
  return {family1(ctx), family2(ctx), family3(ctx), family4(ctx), family5(ctx)};
}

bool close(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return std::abs(*a - *b) <= 1e-9 * std::max({1.0, std::abs(*a), std::abs(*b)});
}

}  // namespace

std::vector<ConditionReport> check_H(const NoiseModel& model, const Schedule& rate,
                                     std::uint64_t horizon) {
  const RateSeq r = rate_of(rate);
  return all_families({model, r, facts_direct(model), 'H', horizon});
}

std::vector<ConditionReport> check_K(const NoiseModel& model, const Schedule& eta,
                                     const IncrementSchedule& c, std::uint64_t horizon) {
  const RateSeq r = ratio_of(eta, c);
  return all_families({model, r, facts_pairs(model), 'K', horizon});
}

bool substitution_consistent(const std::vector<ConditionReport>& k_reports,
                             const std::vector<ConditionReport>& h_reports, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why != nullptr) *why = std::move(msg);
    return false;
  };
  if (k_reports.size() != h_reports.size()) return fail("report counts differ");
  for (std::size_t i = 0; i < k_reports.size(); ++i) {
    const auto& k = k_reports[i];
    const auto& h = h_reports[i];
    if (k.family.substr(1) != h.family.substr(1)) {
      return fail(fmt::format("family {} paired with {}", k.family, h.family));
    }
    if (k.verdict != h.verdict) {
      return fail(fmt::format("{} is {} but {} is {}", k.family, to_string(k.verdict), h.family,
                              to_string(h.verdict)));
    }
    if (!close(k.alpha, h.alpha) || !close(k.delta, h.delta) || !close(k.D, h.D)) {
      return fail(fmt::format("{} and {} have different witnesses", k.family, h.family));
    }
  }
  return true;
}

// ------------------------------------------------------------- G checks

double TruncationScheme::threshold(std::uint64_t n, double beta_n) const {
  const auto x = static_cast<double>(n);
  switch (rule) {
    case Rule::StepScaled:
      return 1.0 / beta_n;
    case Rule::MomentScaled:
      return std::pow(x, 1.0 / alpha);
    case Rule::LogScaled: {
      if (n == 0) return 0.0;
      // T / log(1 + T)^delta is increasing; bisect for the value n.
      auto h = [this](double t) { return t / std::pow(std::log1p(t), delta); };
      double lo = 0.0;
      double hi = std::max(1.0, x);
      while (h(hi) < x) hi *= 2.0;
      for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < x ? lo : hi) = mid;
      }
      return hi;
    }
  }
  return 0.0;
}

std::string TruncationScheme::describe() const {
  switch (rule) {
    case Rule::StepScaled:
      return "step_scaled";
    case Rule::MomentScaled:
      return fmt::format("moment_scaled(alpha={})", alpha);
    case Rule::LogScaled:
      return fmt::format("log_scaled(delta={})", delta);
  }
  return "scheme";
}

std::optional<GTerms> g_terms(const NoiseModel& model, double T) {
  const bool martingale = model.family() == NoiseFamily::ScaledMartingaleDifference;
  if (!model.is_iid() && !martingale) return std::nullopt;
  const double sigma = model.scale();
  if (sigma == 0.0) return GTerms{};
  const double a = martingale ? model.params().modulation : 0.0;
  const double s_hi = sigma * (1.0 + a);
  const double s_lo = sigma * (1.0 - a);

  auto log_f = [&model](double u) { return model.unit_log_density_split(u); };
  GTerms g;
  const double t_out = T / s_hi;
  g.p_out = t_out <= 0.0 ? 1.0 : 2.0 * quad::integrate_split(log_f, t_out, kInf);
  g.p_out = std::min(1.0, g.p_out);
  const double t_in = T / s_lo;
  g.second = t_in <= 0.0 ? 0.0
                         : s_hi * s_hi * 2.0 *
                               quad::integrate_split(
                                   [&](double u) {
                                     quad::LogValue f = log_f(u);
                                     f.slope += 2.0;
                                     return f;
                                   },
                                   0.0, t_in);
  g.v = 0.0;  // symmetric given the past
  return g;
}

std::pair<double, double> truncated_mean_mc(const NoiseModel& model, double T,
                                            std::uint64_t samples, std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("truncated_mean_mc needs at least 2 samples");
  NoiseStream stream(model, seed);
  Vector w(model.dim());
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t k = 1; k <= samples; ++k) {
    stream.next_into(w);
    const double x = std::abs(w[0]) <= T ? w[0] : 0.0;
    const double dlt = x - mean;
    mean += dlt / static_cast<double>(k);
    m2 += dlt * (x - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

namespace {

struct Trend {
  SeriesVerdict verdict = SeriesVerdict::Inconclusive;
  double exponent = 0.0;  ///< fitted decay exponent s in a_n ~ n^(-s)
  bool monotone = true;
};

Trend fit_trend(const std::vector<double>& ns, const std::vector<double>& a, double margin) {
  Trend t;
  const std::size_t start = ns.size() / 2;
  for (std::size_t k = start + 1; k < a.size(); ++k) {
    if (a[k] > a[k - 1] * (1.0 + 1e-6) + 1e-300) t.monotone = false;
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = start; k < a.size(); ++k) {
    if (a[k] > 0.0) {
      lx.push_back(std::log(ns[k]));
      ly.push_back(std::log(a[k]));
    }
  }
  if (!t.monotone) return t;
  if (a.back() == 0.0) {
    t.verdict = SeriesVerdict::Converges;
    t.exponent = kInf;
    return t;
  }
  if (lx.size() < 3) return t;
  const auto m = static_cast<double>(lx.size());
  double sx = 0;
  double sy = 0;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  t.exponent = -slope;
  if (t.exponent > 1.0 + margin) {
    t.verdict = SeriesVerdict::Converges;
  } else if (t.exponent < 1.0 - margin) {
    t.verdict = SeriesVerdict::Diverges;
  }
  return t;
}

/// Trapezoid estimate of the sum of a over [ns.front(), upto] on a log grid.
double sum_estimate(const std::vector<double>& ns, const std::vector<double>& a, double upto) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < ns.size() && ns[k + 1] <= upto * (1 + 1e-12); ++k) {
    s += 0.5 * (a[k] * ns[k] + a[k + 1] * ns[k + 1]) * std::log(ns[k + 1] / ns[k]);
  }
  return s;
}

}  // namespace

ConditionReport check_G_numeric(const NoiseModel& model, const Schedule& rate,
                                const TruncationScheme& scheme, const GNumericOptions& opts) {
  Builder b("G");
  if (opts.horizon < 100 || opts.grid_points < 6) {
    throw InvalidArgument("check_G_numeric needs horizon >= 100 and at least 6 grid points");
  }
  const bool martingale = model.family() == NoiseFamily::ScaledMartingaleDifference;
  if (!model.is_iid() && !martingale) {
    b.add("supported model", "dependence", 0.0, EvidenceBasis::None, ClauseStatus::Inconclusive);
    return b.finish();
  }

  // Geometric grid with multiples of 10 at the decade ends.
  std::vector<double> ns;
  const double l0 = 1.0;
  const double l1 = std::log10(static_cast<double>(opts.horizon));
  for (int k = 0; k < opts.grid_points; ++k) {
    const double n = std::round(std::pow(10.0, l0 + (l1 - l0) * k / (opts.grid_points - 1)));
    if (ns.empty() || n > ns.back()) ns.push_back(n);
  }

  std::vector<double> a1;
  std::vector<double> a2;
  std::vector<double> a3;
  std::vector<double> vs;
  for (double n : ns) {
    const auto idx = static_cast<std::uint64_t>(n);
    const double beta = rate(idx);
    const auto g = g_terms(model, scheme.threshold(idx, beta));
    a1.push_back(g->p_out);
    a2.push_back(beta * std::abs(g->v));
    a3.push_back(beta * beta * g->second);
    vs.push_back(std::abs(g->v));
  }

  const Trend t1 = fit_trend(ns, a1, opts.margin);
  const Trend t3 = fit_trend(ns, a3, opts.margin);
  auto status = [martingale](const Trend& t) {
    if (t.verdict == SeriesVerdict::Converges) return ClauseStatus::Holds;
    // A divergent upper bound says nothing.
    if (t.verdict == SeriesVerdict::Diverges && !martingale) return ClauseStatus::Fails;
    return ClauseStatus::Inconclusive;
  };
  b.add("G1", "decay exponent of P(A^c)", t1.exponent, EvidenceBasis::TrendFit, status(t1));
  // Every supported model is symmetric given the past and every truncation
  // set is symmetric, so V_{n+1} = 0.
  b.add("G2", "max |V_n| on grid", *std::max_element(vs.begin(), vs.end()),
        EvidenceBasis::Analytic, ClauseStatus::Holds);
  b.add("G2a", "last |V_n|", vs.back(), EvidenceBasis::Analytic, ClauseStatus::Holds);
  b.add("G3", "decay exponent of beta^2 E[W^2 1_A]", t3.exponent, EvidenceBasis::TrendFit,
        status(t3));

  const double N = ns.back();
  for (auto [name, terms] : {std::pair{"G1", &a1}, std::pair{"G3", &a3}}) {
    const double full = sum_estimate(ns, *terms, N);
    const double decade = sum_estimate(ns, *terms, N / 10.0);
    b.diag(name, "sum estimate over [10, N]", full);
    b.diag(name, "relative change over last decade", full > 0.0 ? (full - decade) / full : 0.0);
  }
  return b.finish();
}

std::vector<std::pair<std::uint64_t, double>> g7_partial_sums(
    const NoiseModel& model, const Schedule& rate, std::uint64_t seed,
    const std::vector<std::uint64_t>& checkpoints) {
  std::vector<std::pair<std::uint64_t, double>> out;
  if (checkpoints.empty()) return out;
  NoiseStream stream(model, seed);
  Vector w(model.dim());
  double sum = 0.0;
  std::size_t next = 0;
  for (std::uint64_t n = 0;; ++n) {
    while (next < checkpoints.size() && checkpoints[next] == n) {
      out.emplace_back(n, sum);
      ++next;
    }
    if (next == checkpoints.size()) break;
    stream.next_into(w);
    sum += rate(n) * w[0];
  }
  return out;
}

ConditionReport rm_report(const Schedule& s, std::uint64_t horizon) {
  const RmReport rm = check_rm_conditions(s, horizon);
  Builder b("RM");
  b.add("beta -> 0", "exponent", s.form().power, EvidenceBasis::Analytic,
        bool_status(rm.tends_to_zero));
  b.add("sum beta = inf", "partial sum", rm.sum_beta.partial_sum, EvidenceBasis::Analytic,
        bool_status(rm.sum_beta.verdict == SeriesVerdict::Diverges));
  b.add("sum beta^2 < inf", "partial sum", rm.sum_beta_sq.partial_sum, EvidenceBasis::Analytic,
        bool_status(rm.sum_beta_sq.verdict == SeriesVerdict::Converges));
  return b.finish();
}

ConditionReport kwb_report(const Schedule& eta, const IncrementSchedule& c,
                           std::uint64_t horizon) {
  const KwbReport k = check_kwb_preset(eta, c, horizon);
  Builder b("KWB");
  b.add("c_n -> 0", "exponent", c.form().power, EvidenceBasis::Analytic,
        bool_status(k.c_tends_to_zero));
  b.add("sum (eta/c)^2 < inf", "partial sum", k.sum_ratio_sq.partial_sum,
        EvidenceBasis::Analytic, bool_status(k.sum_ratio_sq.verdict == SeriesVerdict::Converges));
  b.add("sum eta*c < inf", "partial sum", k.sum_eta_c.partial_sum, EvidenceBasis::Analytic,
        bool_status(k.sum_eta_c.verdict == SeriesVerdict::Converges));
  b.add("sum eta = inf", "partial sum", k.sum_eta.partial_sum, EvidenceBasis::Analytic,
        bool_status(k.sum_eta.verdict == SeriesVerdict::Diverges));
  return b.finish();
}

ConditionReport v3x_report(const MaskPolicy& mask, const Schedule& eta, std::uint64_t horizon,
                           const NoiseModel* noise, std::uint64_t seed) {
  const MaskAudit audit = mask_divergence_audit(mask, eta, horizon, noise, seed);
  Builder b("V3x");
  for (std::size_t i = 0; i < audit.verdicts.size(); ++i) {
    const std::string clause = fmt::format("coordinate {}", i);
    switch (audit.verdicts[i]) {
      case MaskVerdict::Diverges:
        b.add(clause, "partial sum", audit.partial_sums[i], EvidenceBasis::Analytic,
              ClauseStatus::Holds);
        break;
      case MaskVerdict::Finite:
        b.add(clause, "partial sum", audit.partial_sums[i], EvidenceBasis::Analytic,
              ClauseStatus::Fails);
        break;
      case MaskVerdict::Empirical:
        b.add(clause, "partial sum", audit.partial_sums[i], EvidenceBasis::Diagnostic,
              ClauseStatus::Inconclusive);
        break;
    }
  }
  return b.finish();
}

}  // namespace gsa
