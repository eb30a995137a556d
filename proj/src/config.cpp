#include "gsa/config.hpp"

#include "gsa/problems.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace gsa {

using nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", path.empty() ? "<root>" : path, message)),
      path_(std::move(path)) {}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::SA:
      return "sa";
    case Mode::SGD:
      return "sgd";
    case Mode::GSLLN:
      return "gslln";
    case Mode::Conditions:
      return "conditions";
    case Mode::Sweep:
      return "sweep";
  }
  return "sa";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::SA, Mode::SGD, Mode::GSLLN, Mode::Conditions, Mode::Sweep}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument(fmt::format("unknown mode '{}'", name));
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::CSV ? "csv" : "jsonl"; }

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::CSV;
  if (name == "jsonl") return OutputFormat::JSONL;
  throw InvalidArgument(fmt::format("unknown format '{}' (csv or jsonl)", name));
}

bool Assertions::empty() const {
  return !final_median_max && !median_ratio_min && !max_diverged && !gslln_consistent &&
         expect.empty();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon) {
  std::vector<std::uint64_t> cps;
  for (std::uint64_t n = 1; n < horizon; n *= 10) cps.push_back(n);
  cps.push_back(horizon);
  return cps;
}

namespace {

std::string join_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : fmt::format("{}.{}", base, key);
}

/// Strict reader over one JSON object. Every value read (or defaulted) is
/// mirrored into `out`; `finish` rejects keys that were never read.
class Reader {
 public:
  Reader(const json& j, std::string path, json& out) : j_(j), path_(std::move(path)), out_(out) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
    out_ = json::object();
  }

  [[nodiscard]] std::string at(std::string_view key) const { return join_path(path_, key); }
  [[nodiscard]] const std::string& path() const { return path_; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double num(const std::string& key, std::optional<double> def = std::nullopt) {
    const json* v = raw(key);
    double x = 0.0;
    if (v == nullptr) {
      if (!def) throw ConfigError(at(key), "required");
      x = *def;
    } else {
      if (!v->is_number()) throw ConfigError(at(key), "expected a number");
      x = v->get<double>();
    }
    out_[key] = x;
    return x;
  }

  std::uint64_t u64(const std::string& key, std::optional<std::uint64_t> def = std::nullopt) {
    const json* v = raw(key);
    std::uint64_t x = 0;
    if (v == nullptr) {
      if (!def) throw ConfigError(at(key), "required");
      x = *def;
    } else {
      x = as_u64(*v, at(key));
    }
    out_[key] = x;
    return x;
  }

  int integer(const std::string& key, int def) {
    const auto x = u64(key, static_cast<std::uint64_t>(def));
    if (x > 1000000000ULL) throw ConfigError(at(key), "too large");
    return static_cast<int>(x);
  }

  std::string str(const std::string& key, std::optional<std::string> def = std::nullopt) {
    const json* v = raw(key);
    std::string x;
    if (v == nullptr) {
      if (!def) throw ConfigError(at(key), "required");
      x = *def;
    } else {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      x = v->get<std::string>();
    }
    out_[key] = x;
    return x;
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = raw(key);
    bool x = def;
    if (v != nullptr) {
      if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
      x = v->get<bool>();
    }
    out_[key] = x;
    return x;
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) throw ConfigError(at(key), "expected an array of numbers");
    std::vector<double> xs;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& e = (*v)[i];
      if (!e.is_number()) throw ConfigError(fmt::format("{}[{}]", at(key), i), "expected a number");
      xs.push_back(e.get<double>());
    }
    out_[key] = xs;
    return xs;
  }

  std::optional<std::vector<std::uint64_t>> indices(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) throw ConfigError(at(key), "expected an array of indices");
    std::vector<std::uint64_t> xs;
    for (std::size_t i = 0; i < v->size(); ++i) {
      xs.push_back(as_u64((*v)[i], fmt::format("{}[{}]", at(key), i)));
    }
    out_[key] = xs;
    return xs;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) throw ConfigError(at(key), "expected an array of strings");
    std::vector<std::string> xs;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        throw ConfigError(fmt::format("{}[{}]", at(key), i), "expected a string");
      }
      xs.push_back((*v)[i].get<std::string>());
    }
    out_[key] = xs;
    return xs;
  }

  /// Sub-object reader; an absent key reads as an empty object.
  Reader child(const std::string& key) {
    const json* v = raw(key);
    static const json kEmpty = json::object();
    return Reader(v == nullptr ? kEmpty : *v, at(key), out_[key]);
  }

  void put(const std::string& key, json v) { out_[key] = std::move(v); }

  void copy_raw(const std::string& key) {
    if (const json* v = raw(key)) out_[key] = *v;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) throw ConfigError(at(key), "unknown key");
    }
  }

 private:
  static std::uint64_t as_u64(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() < 0) throw ConfigError(path, "must be nonnegative");
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d < 0.0 || d != std::floor(d) || d >= 18446744073709551616.0) {
        throw ConfigError(path, "expected a nonnegative integer");
      }
      return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(path, "expected a nonnegative integer");
  }

  const json& j_;
  std::string path_;
  json& out_;
  std::set<std::string> used_;
};

/// Runs a factory, converting argument errors into config errors at `path`.
template <class F>
auto guarded(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

Vector to_vector(const std::vector<double>& xs) {
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Vector vector_of_dim(Reader& r, const std::string& key, int dim, double fill) {
  const auto xs = r.numbers(key);
  if (!xs) {
    r.put(key, std::vector<double>(static_cast<std::size_t>(dim), fill));
    return Vector::Constant(dim, fill);
  }
  if (static_cast<int>(xs->size()) != dim) {
    throw ConfigError(r.at(key), fmt::format("expected {} entries, got {}", dim, xs->size()));
  }
  return to_vector(*xs);
}

ProblemConfig read_problem(Reader r) {
  ProblemConfig p;
  p.kind = r.str("kind", "contraction");
  if (p.kind == "contraction") {
    p.dim = r.integer("dim", 2);
    if (p.dim < 1) throw ConfigError(r.at("dim"), "must be at least 1");
    p.rho0 = r.num("rho0", 0.5);
    p.target = vector_of_dim(r, "target", p.dim, 1.0);
    p.rotate = r.boolean("rotate", false);
    p.rotation_seed = r.u64("rotation_seed", 0);
    p.norm = guarded(r.at("norm"), [&] { return parse_norm(r.str("norm", "l2")); });
  } else if (p.kind == "quadratic") {
    if (r.has("Q") == r.has("diag")) {
      throw ConfigError(r.at("Q"), "give exactly one of Q or diag");
    }
    if (const auto d = r.numbers("diag")) {
      p.Q = to_vector(*d).asDiagonal();
    } else {
      const json* q = r.raw("Q");
      if (!q->is_array() || q->empty()) throw ConfigError(r.at("Q"), "expected a square matrix");
      const auto n = static_cast<Eigen::Index>(q->size());
      p.Q.resize(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = (*q)[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
          throw ConfigError(fmt::format("{}[{}]", r.at("Q"), i), "expected a row of length n");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          const auto& e = row[static_cast<std::size_t>(j)];
          if (!e.is_number()) {
            throw ConfigError(fmt::format("{}[{}][{}]", r.at("Q"), i, j), "expected a number");
          }
          p.Q(i, j) = e.get<double>();
        }
      }
      r.copy_raw("Q");
    }
    p.dim = static_cast<int>(p.Q.rows());
    p.p = vector_of_dim(r, "p", p.dim, 1.0);
  } else if (p.kind == "quartic") {
    const auto q = r.numbers("q");
    if (!q || q->empty()) throw ConfigError(r.at("q"), "required");
    p.q = to_vector(*q);
    p.dim = static_cast<int>(p.q.size());
    p.x_star = vector_of_dim(r, "x_star", p.dim, 0.0);
    p.eps = r.num("eps", 0.01);
    p.radius = r.num("radius", 1.0);
    p.c_max = r.num("c_max", 1.0);
  } else {
    throw ConfigError(r.at("kind"), fmt::format("unknown problem '{}'", p.kind));
  }
  r.finish();
  return p;
}

NoiseModel read_noise(Reader r, int dim) {
  const std::string family = r.str("family", "gaussian");
  const NoiseFamily f = guarded(r.at("family"), [&] { return parse_noise_family(family); });
  const double sigma = r.num("sigma", 1.0);
  NoiseModel m = guarded(r.path(), [&] {
    switch (f) {
      case NoiseFamily::GaussianIID:
        return NoiseModel::gaussian(dim, sigma);
      case NoiseFamily::StudentTIID:
        return NoiseModel::student_t(dim, r.num("nu"), sigma);
      case NoiseFamily::LogTemperedCauchyIID:
        return NoiseModel::log_tempered_cauchy(dim, r.num("p", 2.0), sigma);
      case NoiseFamily::ScaledMartingaleDifference: {
        const double nu = r.num("nu");
        return NoiseModel::martingale_difference(dim, nu, r.num("modulation", 0.5), sigma);
      }
      case NoiseFamily::IndependentDriftingMean: {
        const double nu = r.num("nu");
        return NoiseModel::drifting_mean(dim, nu, r.num("mu0", 1.0), sigma);
      }
    }
    return NoiseModel::gaussian(dim, sigma);
  });
  r.finish();
  return m;
}

Schedule read_schedule(Reader r) {
  const std::string kind = r.str("kind", "harmonic");
  const double D = r.num("D", 1.0);
  Schedule s = guarded(r.path(), [&] {
    if (kind == "harmonic") return Schedule::harmonic(D);
    if (kind == "power_law") return Schedule::power_law(D, r.num("gamma"));
    if (kind == "log_tempered") return Schedule::log_tempered(D, r.num("delta", 1.0));
    if (kind == "constant") return Schedule::constant(D);
    throw ConfigError(r.at("kind"), fmt::format("unknown schedule '{}'", kind));
  });
  r.finish();
  return s;
}

IncrementSchedule read_increment(Reader r) {
  const std::string kind = r.str("kind", "log_power");
  IncrementSchedule c = guarded(r.path(), [&] {
    if (kind == "log_power") return IncrementSchedule::log_power(r.num("kappa", 1.0));
    if (kind == "power_law") return IncrementSchedule::power_law(r.num("gamma"));
    if (kind == "constant") return IncrementSchedule::constant(r.num("value"));
    throw ConfigError(r.at("kind"), fmt::format("unknown increment '{}'", kind));
  });
  r.finish();
  return c;
}

Multiplier read_multiplier(Reader r) {
  const std::string kind = r.str("kind", "constant");
  Multiplier m = guarded(r.path(), [&] {
    if (kind == "constant") return Multiplier::constant(r.num("lambda", 1.0));
    if (kind == "norm_tracking") {
      const double C1 = r.num("C1", 1.0);
      return Multiplier::norm_tracking(C1, parse_norm(r.str("norm", "l2")));
    }
    if (kind == "signed_bounded") return Multiplier::signed_bounded(r.num("C1", 1.0));
    throw ConfigError(r.at("kind"), fmt::format("unknown multiplier '{}'", kind));
  });
  r.finish();
  return m;
}

MaskPolicy read_mask(Reader r, int dim) {
  const std::string kind = r.str("kind", "all_ones");
  MaskPolicy m = guarded(r.path(), [&] {
    if (kind == "all_ones") return MaskPolicy::all_ones(dim);
    if (kind == "round_robin") return MaskPolicy::round_robin(dim, r.integer("block_size", 1));
    if (kind == "noise_driven") return MaskPolicy::noise_driven(dim, r.integer("recurrence", 8));
    if (kind == "fixed") {
      const auto row = r.numbers("row");
      if (!row) throw ConfigError(r.at("row"), "required");
      if (static_cast<int>(row->size()) != dim) {
        throw ConfigError(r.at("row"), fmt::format("expected {} entries", dim));
      }
      std::vector<char> bits;
      for (double v : *row) {
        if (v != 0.0 && v != 1.0) throw ConfigError(r.at("row"), "entries must be 0 or 1");
        bits.push_back(v == 1.0 ? 1 : 0);
      }
      return MaskPolicy::fixed_row(bits);
    }
    throw ConfigError(r.at("kind"), fmt::format("unknown mask '{}'", kind));
  });
  guarded(r.path(), [&] {
    m.validate();
    return 0;
  });
  r.finish();
  return m;
}

GsllnOptions read_gslln(Reader r) {
  GsllnOptions g;
  g.dim = r.integer("dim", 1);
  if (g.dim < 1) throw ConfigError(r.at("dim"), "must be at least 1");
  if (auto t = r.numbers("t_grid")) {
    if (t->empty()) throw ConfigError(r.at("t_grid"), "must not be empty");
    for (double v : *t) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(r.at("t_grid"), "t must be positive");
    }
    g.t_grid = *t;
  } else {
    r.put("t_grid", g.t_grid);
  }
  if (auto z = r.strings("zeta")) {
    if (z->empty()) throw ConfigError(r.at("zeta"), "must not be empty");
    g.zeta.clear();
    for (const auto& name : *z) {
      g.zeta.push_back(guarded(r.at("zeta"), [&] { return parse_zeta_policy(name); }));
    }
  }
  g.threshold = r.num("threshold", 0.02);
  if (!(g.threshold > 0.0)) throw ConfigError(r.at("threshold"), "must be positive");
  r.finish();
  return g;
}

ConditionsOptions read_conditions(Reader r) {
  ConditionsOptions c;
  c.dim = r.integer("dim", 1);
  if (c.dim < 1) throw ConfigError(r.at("dim"), "must be at least 1");
  if (auto checks = r.strings("checks")) {
    static const std::set<std::string> known{"H", "K", "G", "RM", "KWB", "V3x"};
    for (const auto& name : *checks) {
      if (!known.contains(name)) {
        throw ConfigError(r.at("checks"), fmt::format("unknown check '{}'", name));
      }
    }
    c.checks = *checks;
  }
  c.horizon = r.u64("horizon", 100000);
  if (c.horizon < 1000) throw ConfigError(r.at("horizon"), "must be at least 1000");
  {
    Reader t = r.child("truncation");
    const std::string rule = t.str("rule", "step_scaled");
    if (rule == "step_scaled") {
      c.truncation = TruncationScheme::step_scaled();
    } else if (rule == "moment_scaled") {
      const double a = t.num("alpha");
      if (!(a >= 1.0 && a <= 2.0)) throw ConfigError(t.at("alpha"), "must lie in [1, 2]");
      c.truncation = TruncationScheme::moment_scaled(a);
    } else if (rule == "log_scaled") {
      const double d = t.num("delta", 1.0);
      if (!(d > 0.0 && d <= 1.0)) throw ConfigError(t.at("delta"), "must lie in (0, 1]");
      c.truncation = TruncationScheme::log_scaled(d);
    } else {
      throw ConfigError(t.at("rule"), fmt::format("unknown truncation '{}'", rule));
    }
    t.finish();
  }
  {
    Reader g = r.child("g");
    c.g.horizon = g.u64("horizon", 1000000);
    c.g.grid_points = g.integer("grid_points", 25);
    c.g.margin = g.num("margin", 0.05);
    if (c.g.horizon < 100) throw ConfigError(g.at("horizon"), "must be at least 100");
    if (c.g.grid_points < 6) throw ConfigError(g.at("grid_points"), "must be at least 6");
    if (!(c.g.margin > 0.0 && c.g.margin < 1.0)) {
      throw ConfigError(g.at("margin"), "must lie in (0, 1)");
    }
    g.finish();
  }
  r.finish();
  return c;
}

Assertions read_assertions(Reader r) {
  Assertions a;
  if (r.has("final_median_max")) a.final_median_max = r.num("final_median_max");
  if (r.has("median_ratio")) {
    Reader m = r.child("median_ratio");
    a.median_ratio_min = m.num("min");
    a.ratio_from = m.u64("from");
    a.ratio_to = m.u64("to");
    m.finish();
  }
  if (r.has("max_diverged")) a.max_diverged = r.u64("max_diverged");
  if (r.has("gslln_consistent")) a.gslln_consistent = r.boolean("gslln_consistent", true);
  if (r.has("expect")) {
    const json* e = r.raw("expect");
    if (!e->is_object()) throw ConfigError(r.at("expect"), "expected an object");
    for (const auto& [family, verdict] : e->items()) {
      const std::string path = join_path(r.at("expect"), family);
      if (!verdict.is_string()) throw ConfigError(path, "expected a verdict string");
      const auto v = verdict.get<std::string>();
      if (v != "holds" && v != "fails" && v != "inconclusive") {
        throw ConfigError(path, "verdict must be holds, fails or inconclusive");
      }
      a.expect[family] = v;
    }
    r.copy_raw("expect");
  }
  r.finish();
  return a;
}

void read_output(Reader r, ExperimentConfig& cfg) {
  cfg.out_dir = r.str("dir", ".");
  cfg.format = guarded(r.at("format"), [&] { return parse_format(r.str("format", "csv")); });
  r.finish();
}

void check_id(const std::string& id, const std::string& path) {
  if (id.empty()) throw ConfigError(path, "must not be empty");
  for (char ch : id) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) {
      throw ConfigError(path, "may contain only letters, digits, '_', '-' and '.'");
    }
  }
}

std::uint64_t hash_resolved(const json& resolved) {
  json h = resolved;
  h.erase("output");
  h.erase("workers");
  return fnv1a(h.dump());
}

/// Sets doc[a][b]... = value for the dotted path "a.b...".
void set_dotted(json& doc, const std::string& dotted, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty()) throw ConfigError("sweep.parameter", "malformed path");
    if (!node->is_object()) throw ConfigError("sweep.parameter", "path crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

ExperimentConfig parse_sweep(const json& doc) {
  ExperimentConfig cfg;
  cfg.mode = Mode::Sweep;
  json out;
  Reader r(doc, "", out);
  r.str("mode");
  cfg.id = r.str("id", "sweep");
  check_id(cfg.id, "id");
  Reader s = r.child("sweep");
  const std::string child_mode = s.str("mode");
  const Mode cm = guarded(s.at("mode"), [&] { return parse_mode(child_mode); });
  if (cm == Mode::Sweep) throw ConfigError(s.at("mode"), "sweeps do not nest");
  cfg.sweep_parameter = s.str("parameter");
  const json* values = s.raw("values");
  if (values == nullptr || !values->is_array() || values->empty()) {
    throw ConfigError(s.at("values"), "expected a nonempty array");
  }
  s.copy_raw("values");
  s.finish();
  read_output(r.child("output"), cfg);
  cfg.workers = static_cast<unsigned>(r.integer("workers", 1));

  json base = doc;
  base.erase("sweep");
  base["mode"] = child_mode;
  for (std::size_t k = 0; k < values->size(); ++k) {
    json child = base;
    child["id"] = fmt::format("{}-{}", cfg.id, k);
    set_dotted(child, cfg.sweep_parameter, (*values)[k]);
    try {
      cfg.children.push_back(parse_config(child));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("sweep.values[{}]", k), e.what());
    }
    cfg.sweep_values.push_back((*values)[k]);
  }
  cfg.resolved = doc;
  cfg.hash = hash_resolved(doc);
  return cfg;
}

}  // namespace

SAProblem make_sa_problem(const ProblemConfig& p) {
  if (p.kind == "contraction") {
    std::optional<Matrix> R;
    if (p.rotate) R = random_rotation(p.dim, p.rotation_seed);
    return builtin_contraction(p.dim, p.rho0, p.target, R, p.norm);
  }
  if (p.kind == "quadratic") return builtin_strongly_convex_quadratic(p.Q, p.p).sa;
  throw InvalidArgument(fmt::format("problem '{}' has no SA form", p.kind));
}

SGDProblem make_sgd_problem(const ProblemConfig& p) {
  if (p.kind == "quadratic") {
    auto q = builtin_strongly_convex_quadratic(p.Q, p.p);
    if (!q.sgd) throw InvalidArgument("SGD needs a diagonal quadratic");
    return *q.sgd;
  }
  if (p.kind == "quartic") return builtin_quartic_perturbation(p.q, p.x_star, p.eps, p.radius, p.c_max);
  throw InvalidArgument(fmt::format("problem '{}' has no SGD form", p.kind));
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("malformed JSON: {}", e.what()));
  }
  return parse_config(doc);
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "expected an object");
  if (doc.contains("mode") && doc["mode"] == "sweep") return parse_sweep(doc);

  ExperimentConfig cfg;
  json out;
  Reader r(doc, "", out);
  cfg.mode = guarded("mode", [&] { return parse_mode(r.str("mode")); });
  if (r.has("sweep")) throw ConfigError("sweep", "only valid in sweep mode");
  cfg.id = r.str("id", "experiment");
  check_id(cfg.id, "id");
  cfg.trials = r.u64("trials", 1);
  if (cfg.trials == 0) throw ConfigError("trials", "must be positive");
  cfg.base_seed = r.u64("base_seed", 0);
  cfg.horizon = r.u64("horizon", 1000);
  if (cfg.horizon == 0) throw ConfigError("horizon", "must be positive");
  if (auto cps = r.indices("checkpoints")) {
    if (cps->empty()) throw ConfigError("checkpoints", "must not be empty");
    for (std::size_t i = 0; i < cps->size(); ++i) {
      if ((*cps)[i] > cfg.horizon) {
        throw ConfigError(fmt::format("checkpoints[{}]", i), "exceeds the horizon");
      }
      if (i > 0 && (*cps)[i] <= (*cps)[i - 1]) {
        throw ConfigError(fmt::format("checkpoints[{}]", i), "checkpoints must be increasing");
      }
    }
    cfg.checkpoints = *cps;
  } else {
    cfg.checkpoints = default_checkpoints(cfg.horizon);
    out["checkpoints"] = cfg.checkpoints;
  }

  int dim = 1;
  const bool engine = cfg.mode == Mode::SA || cfg.mode == Mode::SGD;
  if (engine) {
    cfg.problem = read_problem(r.child("problem"));
    dim = cfg.problem.dim;
    guarded("problem", [&] {
      if (cfg.mode == Mode::SA) {
        make_sa_problem(cfg.problem);
      } else {
        make_sgd_problem(cfg.problem);
      }
      return 0;
    });
    if (r.has("x0")) {
      const auto x0 = r.numbers("x0");
      if (static_cast<int>(x0->size()) != dim) {
        throw ConfigError("x0", fmt::format("expected {} entries, got {}", dim, x0->size()));
      }
      cfg.x0 = to_vector(*x0);
      if (!all_finite(*cfg.x0)) throw ConfigError("x0", "must be finite");
    }
    cfg.multiplier = read_multiplier(r.child("multiplier"));
  } else if (cfg.mode == Mode::GSLLN) {
    cfg.gslln = read_gslln(r.child("gslln"));
    dim = cfg.gslln.dim;
  } else if (cfg.mode == Mode::Conditions) {
    cfg.conditions = read_conditions(r.child("conditions"));
    dim = cfg.conditions.dim;
  }

  cfg.noise = read_noise(r.child("noise"), dim);
  cfg.schedule = read_schedule(r.child("schedule"));
  if (cfg.mode == Mode::SGD || cfg.mode == Mode::Conditions) {
    cfg.increment = read_increment(r.child("increment"));
  }
  if (cfg.mode == Mode::SGD) cfg.mask = read_mask(r.child("mask"), dim);
  if (cfg.mode == Mode::Conditions) {
    if (std::find(cfg.conditions.checks.begin(), cfg.conditions.checks.end(), "V3x") !=
        cfg.conditions.checks.end()) {
      cfg.mask = read_mask(r.child("mask"), dim);
    }
  }
  if (r.has("assert")) cfg.assertions = read_assertions(r.child("assert"));
  if (cfg.assertions.median_ratio_min) {
    for (auto n : {cfg.assertions.ratio_from, cfg.assertions.ratio_to}) {
      if (std::find(cfg.checkpoints.begin(), cfg.checkpoints.end(), n) == cfg.checkpoints.end()) {
        throw ConfigError("assert.median_ratio", fmt::format("{} is not a checkpoint", n));
      }
    }
  }
  read_output(r.child("output"), cfg);
  cfg.workers = static_cast<unsigned>(r.integer("workers", 1));
  r.finish();

  cfg.resolved = std::move(out);
  cfg.hash = hash_resolved(cfg.resolved);
  return cfg;
}

}  // namespace gsa
