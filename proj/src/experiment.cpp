#include "gsa/experiment.hpp"

#include "gsa/parallel.hpp"
#include "gsa/rng.hpp"
#include "gsa/sa_engine.hpp"
#include "gsa/sgd_engine.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gsa {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string json_num(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : "null"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string json_str(const std::string& s) { return json(s).dump(); }

double parse_double(const std::string& s) {
  if (s == "nan" || s.empty()) return kNaN;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return std::stod(s);
}

double json_double(const json& v) { return v.is_null() ? kNaN : v.get<double>(); }

}  // namespace

std::string Row::group() const {
  if (zeta_policy.empty()) return "";
  return fmt::format("t={},zeta={}", num(t), zeta_policy);
}

bool SummaryRecord::same_data(const SummaryRecord& o) const {
  if (experiment_id != o.experiment_id || trials != o.trials || diverged != o.diverged ||
      groups.size() != o.groups.size() || verdicts != o.verdicts) {
    return false;
  }
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& a = groups[g];
    const auto& b = o.groups[g];
    if (a.label != b.label || a.trials != b.trials || a.diverged != b.diverged ||
        a.checkpoints.size() != b.checkpoints.size()) {
      return false;
    }
    for (std::size_t k = 0; k < a.checkpoints.size(); ++k) {
      const auto& x = a.checkpoints[k];
      const auto& y = b.checkpoints[k];
      if (x.n != y.n || x.finite != y.finite || !same(x.err.q10, y.err.q10) ||
          !same(x.err.q50, y.err.q50) || !same(x.err.q90, y.err.q90)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::string> columns(Mode mode) {
  std::vector<std::string> cols{"experiment_id", "trial", "seed", "checkpoint_n",
                                "err",           "phi_n", "diverged"};
  switch (mode) {
    case Mode::SA:
      cols.emplace_back("beta_n");
      break;
    case Mode::SGD:
      cols.insert(cols.end(), {"eta_n", "c_n", "active_count", "f_evals"});
      break;
    case Mode::GSLLN:
      cols.insert(cols.end(), {"t", "zeta_policy", "abs_S"});
      break;
    case Mode::Conditions:
      return condition_columns();
    case Mode::Sweep:
      break;
  }
  return cols;
}

std::vector<std::string> condition_columns() {
  return {"experiment_id", "family", "verdict", "deciding_clause", "clause",
          "name",          "value",  "basis",   "status"};
}

std::string format_row(const Row& r, Mode mode, OutputFormat format) {
  if (format == OutputFormat::CSV) {
    std::string line = fmt::format("{},{},{},{},{},{},{}", r.experiment_id, r.trial, r.seed,
                                   r.checkpoint_n, num(r.err), num(r.phi), r.diverged ? 1 : 0);
    if (mode == Mode::SA) {
      line += fmt::format(",{}", num(r.beta));
    } else if (mode == Mode::SGD) {
      line += fmt::format(",{},{},{},{}", num(r.eta), num(r.c), r.active_count, r.f_evals);
    } else if (mode == Mode::GSLLN) {
      line += fmt::format(",{},{},{}", num(r.t), r.zeta_policy, num(r.abs_S));
    }
    return line;
  }
  std::string line = fmt::format(
      R"({{"experiment_id":{},"trial":{},"seed":{},"checkpoint_n":{},"err":{},"phi_n":{},"diverged":{})",
      json_str(r.experiment_id), r.trial, r.seed, r.checkpoint_n, json_num(r.err),
      json_num(r.phi), r.diverged ? "true" : "false");
  if (mode == Mode::SA) {
    line += fmt::format(R"(,"beta_n":{})", json_num(r.beta));
  } else if (mode == Mode::SGD) {
    line += fmt::format(R"(,"eta_n":{},"c_n":{},"active_count":{},"f_evals":{})",
                        json_num(r.eta), json_num(r.c), r.active_count, r.f_evals);
  } else if (mode == Mode::GSLLN) {
    line += fmt::format(R"(,"t":{},"zeta_policy":{},"abs_S":{})", json_num(r.t),
                        json_str(r.zeta_policy), json_num(r.abs_S));
  }
  return line + "}";
}

std::string format_condition_row(const ConditionRow& r, OutputFormat format) {
  if (format == OutputFormat::CSV) {
    return fmt::format("{},{},{},{},{},{},{},{},{}", r.experiment_id, r.family, r.verdict,
                       csv_field(r.deciding_clause), csv_field(r.clause), csv_field(r.name),
                       num(r.value), r.basis, r.status);
  }
  return fmt::format(
      R"({{"experiment_id":{},"family":{},"verdict":{},"deciding_clause":{},"clause":{},"name":{},"value":{},"basis":{},"status":{}}})",
      json_str(r.experiment_id), json_str(r.family), json_str(r.verdict),
      json_str(r.deciding_clause), json_str(r.clause), json_str(r.name), json_num(r.value),
      json_str(r.basis), json_str(r.status));
}

std::vector<Row> read_rows(const std::string& path, OutputFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path));
  std::vector<Row> rows;
  std::string line;
  if (format == OutputFormat::JSONL) {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      Row r;
      r.experiment_id = j.at("experiment_id").get<std::string>();
      r.trial = j.at("trial").get<std::uint64_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.checkpoint_n = j.at("checkpoint_n").get<std::uint64_t>();
      r.err = json_double(j.at("err"));
      r.phi = json_double(j.at("phi_n"));
      r.diverged = j.at("diverged").get<bool>();
      if (j.contains("beta_n")) r.beta = json_double(j["beta_n"]);
      if (j.contains("eta_n")) {
        r.eta = json_double(j["eta_n"]);
        r.c = json_double(j["c_n"]);
        r.active_count = j["active_count"].get<int>();
        r.f_evals = j["f_evals"].get<std::uint64_t>();
      }
      if (j.contains("zeta_policy")) {
        r.t = json_double(j["t"]);
        r.zeta_policy = j["zeta_policy"].get<std::string>();
        r.abs_S = json_double(j["abs_S"]);
      }
      rows.push_back(std::move(r));
    }
    return rows;
  }

  if (!std::getline(in, line)) return rows;
  std::map<std::string, std::size_t> col;
  {
    std::stringstream ss(line);
    std::string name;
    for (std::size_t i = 0; std::getline(ss, name, ','); ++i) col[name] = i;
  }
  for (const char* required : {"experiment_id", "trial", "seed", "checkpoint_n", "err",
                               "phi_n", "diverged"}) {
    if (!col.contains(required)) throw IoError(fmt::format("{}: missing column {}", path, required));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != col.size()) throw IoError(fmt::format("{}: malformed row '{}'", path, line));
    auto get = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
    Row r;
    r.experiment_id = get("experiment_id");
    r.trial = std::stoull(get("trial"));
    r.seed = std::stoull(get("seed"));
    r.checkpoint_n = std::stoull(get("checkpoint_n"));
    r.err = parse_double(get("err"));
    r.phi = parse_double(get("phi_n"));
    r.diverged = get("diverged") == "1";
    if (col.contains("beta_n")) r.beta = parse_double(get("beta_n"));
    if (col.contains("eta_n")) {
      r.eta = parse_double(get("eta_n"));
      r.c = parse_double(get("c_n"));
      r.active_count = std::stoi(get("active_count"));
      r.f_evals = std::stoull(get("f_evals"));
    }
    if (col.contains("zeta_policy")) {
      r.t = parse_double(get("t"));
      r.zeta_policy = get("zeta_policy");
      r.abs_S = parse_double(get("abs_S"));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

SummaryRecord summarize(const std::vector<Row>& rows) {
  if (rows.empty()) throw InvalidArgument("summarize needs at least one row");
  SummaryRecord s;
  s.experiment_id = rows.front().experiment_id;

  struct Acc {
    std::set<std::uint64_t> trials;
    std::set<std::uint64_t> diverged;
    std::vector<std::uint64_t> order;
    std::map<std::uint64_t, std::vector<double>> values;
  };
  std::vector<std::string> labels;
  std::map<std::string, Acc> acc;
  for (const auto& r : rows) {
    const std::string label = r.group();
    if (!acc.contains(label)) labels.push_back(label);
    auto& a = acc[label];
    a.trials.insert(r.trial);
    if (r.diverged) a.diverged.insert(r.trial);
    if (!a.values.contains(r.checkpoint_n)) a.order.push_back(r.checkpoint_n);
    auto& v = a.values[r.checkpoint_n];
    if (!r.diverged && std::isfinite(r.err)) v.push_back(r.err);
  }
  for (const auto& label : labels) {
    const auto& a = acc[label];
    GroupSummary g;
    g.label = label;
    g.trials = a.trials.size();
    g.diverged = a.diverged.size();
    for (auto n : a.order) {
      const auto& v = a.values.at(n);
      CheckpointSummary cs;
      cs.n = n;
      cs.finite = v.size();
      cs.err = v.empty() ? Quantiles{kNaN, kNaN, kNaN} : quantiles_of(v);
      g.checkpoints.push_back(cs);
    }
    s.trials += g.trials;
    s.diverged += g.diverged;
    s.groups.push_back(std::move(g));
  }
  return s;
}

std::string summary_json(const SummaryRecord& s) {
  auto q = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["experiment_id"] = s.experiment_id;
  j["mode"] = s.mode;
  j["config_hash"] = s.config_hash;
  j["trials"] = s.trials;
  j["diverged"] = s.diverged;
  j["wall_seconds"] = s.wall_seconds;
  j["groups"] = json::array();
  for (const auto& g : s.groups) {
    json jg{{"label", g.label}, {"trials", g.trials}, {"diverged", g.diverged}};
    jg["checkpoints"] = json::array();
    for (const auto& c : g.checkpoints) {
      jg["checkpoints"].push_back({{"n", c.n},
                                   {"finite", c.finite},
                                   {"q10", q(c.err.q10)},
                                   {"q50", q(c.err.q50)},
                                   {"q90", q(c.err.q90)}});
    }
    j["groups"].push_back(std::move(jg));
  }
  if (!s.verdicts.empty()) {
    j["verdicts"] = json::object();
    for (const auto& [family, verdict] : s.verdicts) j["verdicts"][family] = verdict;
  }
  return j.dump(2) + "\n";
}

// ----------------------------------------------------------------- running

namespace {

std::vector<Row> sa_trial(const ExperimentConfig& cfg, const SAProblem& problem,
                          std::uint64_t k) {
  SARunConfig rc;
  rc.problem = &problem;
  rc.schedule = cfg.schedule;
  rc.multiplier = cfg.multiplier;
  rc.noise = cfg.noise;
  rc.seed = trial_seed(cfg.base_seed, k);
  rc.x0 = cfg.x0 ? *cfg.x0 : Vector::Zero(problem.dim);
  rc.horizon = cfg.horizon;
  rc.record = RecordSpec::at(cfg.checkpoints);
  rc.run_id = fmt::format("{}/{}", cfg.id, k);
  const Trajectory traj = sa_run(rc);

  std::vector<Row> rows;
  for (auto n : cfg.checkpoints) {
    Row r;
    r.experiment_id = cfg.id;
    r.trial = k;
    r.seed = rc.seed;
    r.checkpoint_n = n;
    r.diverged = traj.diverged;
    r.beta = cfg.schedule(n);
    if (const StepRecord* rec = traj.at(n)) {
      r.err = rec->err;
      r.phi = rec->phi;
    } else {
      r.err = kInf;
      r.phi = kInf;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<Row> sgd_trial(const ExperimentConfig& cfg, const SGDProblem& problem,
                           std::uint64_t k) {
  SGDRunConfig rc;
  rc.problem = &problem;
  rc.eta = cfg.schedule;
  rc.c = cfg.increment;
  rc.mask = cfg.mask;
  rc.multiplier = cfg.multiplier;
  rc.noise = cfg.noise;
  rc.seed = trial_seed(cfg.base_seed, k);
  rc.y0 = cfg.x0 ? *cfg.x0 : Vector::Zero(problem.dim);
  rc.horizon = cfg.horizon;
  rc.record = RecordSpec::at(cfg.checkpoints);
  rc.run_id = fmt::format("{}/{}", cfg.id, k);
  const Trajectory traj = sgd_run(rc);

  std::vector<Row> rows;
  for (auto n : cfg.checkpoints) {
    Row r;
    r.experiment_id = cfg.id;
    r.trial = k;
    r.seed = rc.seed;
    r.checkpoint_n = n;
    r.diverged = traj.diverged;
    r.eta = cfg.schedule(n);
    r.c = cfg.increment(n);
    r.f_evals = traj.f_evals;
    if (const StepRecord* rec = traj.at(n)) {
      r.err = rec->err;
      r.phi = rec->phi;
      r.active_count = rec->active;
    } else {
      r.err = kInf;
      r.phi = kInf;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::vector<Row> run_trials(const ExperimentConfig& cfg) {
  std::vector<std::vector<Row>> slots;
  switch (cfg.mode) {
    case Mode::SA: {
      const SAProblem problem = make_sa_problem(cfg.problem);
      slots.resize(cfg.trials);
      parallel_for(cfg.trials, cfg.workers,
                   [&](std::uint64_t k) { slots[k] = sa_trial(cfg, problem, k); });
      break;
    }
    case Mode::SGD: {
      const SGDProblem problem = make_sgd_problem(cfg.problem);
      slots.resize(cfg.trials);
      parallel_for(cfg.trials, cfg.workers,
                   [&](std::uint64_t k) { slots[k] = sgd_trial(cfg, problem, k); });
      break;
    }
    case Mode::GSLLN: {
      struct Cell {
        double t;
        ZetaPolicy zeta;
      };
      std::vector<Cell> cells;
      for (double t : cfg.gslln.t_grid) {
        for (auto z : cfg.gslln.zeta) cells.push_back({t, z});
      }
      const std::uint64_t tasks = cells.size() * cfg.trials;
      slots.resize(tasks);
      parallel_for(tasks, cfg.workers, [&](std::uint64_t task) {
        const Cell& cell = cells[task / cfg.trials];
        const std::uint64_t k = task % cfg.trials;
        const std::uint64_t seed = trial_seed(cfg.base_seed, k);
        const auto abs_s = gslln_trajectory(cfg.noise, cfg.schedule, cell.t, cell.zeta, seed,
                                            cfg.checkpoints, cfg.horizon);
        const bool diverged = !std::all_of(abs_s.begin(), abs_s.end(),
                                           [](double v) { return std::isfinite(v); });
        std::vector<Row> rows;
        for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
          Row r;
          r.experiment_id = cfg.id;
          r.trial = k;
          r.seed = seed;
          r.checkpoint_n = cfg.checkpoints[i];
          r.err = abs_s[i];
          r.diverged = diverged;
          r.t = cell.t;
          r.zeta_policy = std::string(to_string(cell.zeta));
          r.abs_S = abs_s[i];
          rows.push_back(std::move(r));
        }
        slots[task] = std::move(rows);
      });
      break;
    }
    case Mode::Conditions:
    case Mode::Sweep:
      throw InvalidArgument(fmt::format("run_trials does not handle mode {}", to_string(cfg.mode)));
  }
  std::vector<Row> rows;
  for (auto& s : slots) {
    for (auto& r : s) rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ConditionReport> run_conditions(const ExperimentConfig& cfg) {
  const auto& o = cfg.conditions;
  std::vector<ConditionReport> out;
  for (const auto& check : o.checks) {
    if (check == "H") {
      for (auto& r : check_H(cfg.noise, cfg.schedule, o.horizon)) out.push_back(std::move(r));
    } else if (check == "K") {
      for (auto& r : check_K(cfg.noise, cfg.schedule, cfg.increment, o.horizon)) {
        out.push_back(std::move(r));
      }
    } else if (check == "RM") {
      out.push_back(rm_report(cfg.schedule, o.horizon));
    } else if (check == "KWB") {
      out.push_back(kwb_report(cfg.schedule, cfg.increment, o.horizon));
    } else if (check == "G") {
      out.push_back(check_G_numeric(cfg.noise, cfg.schedule, o.truncation, o.g));
    } else if (check == "V3x") {
      out.push_back(v3x_report(cfg.mask, cfg.schedule, o.horizon, &cfg.noise, cfg.base_seed));
    }
  }
  return out;
}

std::vector<ConditionRow> condition_rows(const std::string& experiment_id,
                                         const std::vector<ConditionReport>& reports) {
  std::vector<ConditionRow> rows;
  for (const auto& rep : reports) {
    auto emit = [&](const Evidence& e, bool diagnostic) {
      rows.push_back({experiment_id, rep.family, std::string(to_string(rep.verdict)),
                      rep.deciding_clause, e.clause, e.name, e.value,
                      std::string(to_string(e.basis)),
                      diagnostic ? "diagnostic" : std::string(to_string(e.status))});
    };
    for (const auto& e : rep.evidence) emit(e, false);
    for (const auto& e : rep.diagnostics) emit(e, true);
    auto witness = [&](const char* name, const std::optional<double>& v) {
      if (v) {
        rows.push_back({experiment_id, rep.family, std::string(to_string(rep.verdict)),
                        rep.deciding_clause, "witness", name, *v, "analytic", "witness"});
      }
    };
    witness("alpha", rep.alpha);
    witness("delta", rep.delta);
    witness("D", rep.D);
  }
  return rows;
}

bool ExperimentResult::assertions_passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const AssertionResult& a) { return a.passed; }) &&
         std::all_of(children.begin(), children.end(),
                     [](const ExperimentResult& c) { return c.assertions_passed(); });
}

std::vector<AssertionResult> evaluate_assertions(const ExperimentConfig& cfg,
                                                 const SummaryRecord& summary,
                                                 const std::vector<ConditionReport>& reports) {
  const Assertions& a = cfg.assertions;
  std::vector<AssertionResult> out;
  auto median_at = [](const GroupSummary& g, std::uint64_t n) {
    for (const auto& c : g.checkpoints) {
      if (c.n == n) return c.err.q50;
    }
    return kNaN;
  };
  for (const auto& g : summary.groups) {
    const std::string where = g.label.empty() ? "" : fmt::format(" [{}]", g.label);
    if (g.checkpoints.empty()) continue;
    const double final_median = g.checkpoints.back().err.q50;
    if (a.final_median_max) {
      out.push_back({fmt::format("final median <= {}{}", *a.final_median_max, where),
                     final_median <= *a.final_median_max,
                     fmt::format("median err at n={} is {}", g.checkpoints.back().n,
                                 final_median)});
    }
    if (a.median_ratio_min) {
      const double from = median_at(g, a.ratio_from);
      const double to = median_at(g, a.ratio_to);
      const double ratio = from / to;
      out.push_back({fmt::format("median ratio n={} / n={} >= {}{}", a.ratio_from, a.ratio_to,
                                 *a.median_ratio_min, where),
                     ratio >= *a.median_ratio_min,
                     fmt::format("{} / {} = {}", from, to, ratio)});
    }
    if (a.gslln_consistent) {
      const std::uint64_t N = g.checkpoints.back().n;
      double mid = g.checkpoints.front().err.q50;
      for (const auto& c : g.checkpoints) {
        if (c.n <= N / 2) mid = c.err.q50;
      }
      const bool consistent =
          final_median < cfg.gslln.threshold && (final_median < mid || final_median == 0.0);
      out.push_back({fmt::format("gslln {}{}", *a.gslln_consistent ? "consistent" : "inconsistent",
                                 where),
                     consistent == *a.gslln_consistent,
                     fmt::format("final median {} (mid {}, threshold {})", final_median, mid,
                                 cfg.gslln.threshold)});
    }
  }
  if (a.max_diverged) {
    out.push_back({fmt::format("diverged <= {}", *a.max_diverged),
                   summary.diverged <= *a.max_diverged,
                   fmt::format("{} diverged", summary.diverged)});
  }
  for (const auto& [family, verdict] : a.expect) {
    auto it = std::find_if(reports.begin(), reports.end(),
                           [&](const ConditionReport& r) { return r.family == family; });
    if (it == reports.end()) {
      out.push_back({fmt::format("{} {}", family, verdict), false, "no such report"});
    } else {
      out.push_back({fmt::format("{} {}", family, verdict), to_string(it->verdict) == verdict,
                     fmt::format("{} (deciding clause: {})", to_string(it->verdict),
                                 it->deciding_clause)});
    }
  }
  return out;
}

namespace {

void write_atomic(const fs::path& path, const std::string& content, const fs::path& marker) {
  const fs::path tmp = fs::path(path.string() + ".tmp");
  auto fail = [&](const std::string& why) {
    std::ofstream m(marker);
    m << why << "\n";
    std::error_code ec;
    fs::remove(tmp, ec);
    throw IoError(why);
  };
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(fmt::format("cannot open {} for writing", tmp.string()));
    out << content;
    out.flush();
    if (!out) fail(fmt::format("write to {} failed", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(fmt::format("cannot rename {} to {}: {}", tmp.string(), path.string(), ec.message()));
}

std::string join_lines(const std::vector<std::string>& header, std::vector<std::string> lines,
                       OutputFormat format) {
  std::string out;
  if (format == OutputFormat::CSV) {
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
  }
  for (auto& l : lines) {
    out += l;
    out += "\n";
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  const fs::path dir(cfg.out_dir);
  const fs::path marker = dir / (cfg.id + ".partial");
  if (ec) {
    throw IoError(fmt::format("cannot create output directory {}: {}", cfg.out_dir, ec.message()));
  }
  fs::remove(marker, ec);

  ExperimentResult res;
  res.summary.experiment_id = cfg.id;
  res.summary.mode = std::string(to_string(cfg.mode));
  res.summary.config_hash = hex64(cfg.hash);

  if (cfg.mode == Mode::Sweep) {
    json index;
    index["experiment_id"] = cfg.id;
    index["config_hash"] = hex64(cfg.hash);
    index["parameter"] = cfg.sweep_parameter;
    index["children"] = json::array();
    for (std::size_t k = 0; k < cfg.children.size(); ++k) {
      ExperimentConfig child = cfg.children[k];
      child.out_dir = cfg.out_dir;
      child.format = cfg.format;
      child.workers = cfg.workers;
      ExperimentResult cr = run_experiment(child);
      index["children"].push_back({{"experiment_id", child.id},
                                   {"value", cfg.sweep_values[k]},
                                   {"config_hash", hex64(child.hash)},
                                   {"data", fs::path(cr.data_path).filename().string()},
                                   {"summary", fs::path(cr.summary_path).filename().string()}});
      res.summary.trials += cr.summary.trials;
      res.summary.diverged += cr.summary.diverged;
      res.children.push_back(std::move(cr));
    }
    res.summary_path = (dir / (cfg.id + ".index.json")).string();
    write_atomic(res.summary_path, index.dump(2) + "\n", marker);
    res.summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  const std::string ext = cfg.format == OutputFormat::CSV ? "csv" : "jsonl";
  res.data_path = (dir / fmt::format("{}.{}", cfg.id, ext)).string();
  res.summary_path = (dir / (cfg.id + ".summary.json")).string();

  std::vector<std::string> lines;
  if (cfg.mode == Mode::Conditions) {
    res.reports = run_conditions(cfg);
    for (const auto& r : condition_rows(cfg.id, res.reports)) {
      lines.push_back(format_condition_row(r, cfg.format));
    }
    for (const auto& r : res.reports) {
      res.summary.verdicts.emplace_back(r.family, std::string(to_string(r.verdict)));
    }
    write_atomic(res.data_path, join_lines(condition_columns(), std::move(lines), cfg.format),
                 marker);
  } else {
    const std::vector<Row> rows = run_trials(cfg);
    for (const auto& r : rows) lines.push_back(format_row(r, cfg.mode, cfg.format));
    write_atomic(res.data_path, join_lines(columns(cfg.mode), std::move(lines), cfg.format),
                 marker);
    SummaryRecord s = summarize(rows);
    s.mode = res.summary.mode;
    s.config_hash = res.summary.config_hash;
    res.summary = std::move(s);
  }
  res.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_atomic(res.summary_path, summary_json(res.summary), marker);
  res.assertions = evaluate_assertions(cfg, res.summary, res.reports);
  return res;
}

}  // namespace gsa
