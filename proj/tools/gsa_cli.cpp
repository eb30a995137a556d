// Command-line front end: gsa <subcommand> --config PATH [options]

#include "gsa/config.hpp"
#include "gsa/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

enum Exit { kOk = 0, kConfigError = 1, kRuntimeError = 2, kAssertFailed = 3 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::optional<std::string> format;
  bool assert_checks = false;
};

void print_summary(const gsa::ExperimentResult& res) {
  const auto& s = res.summary;
  fmt::print("experiment {} ({}), config hash {}\n", s.experiment_id, s.mode, s.config_hash);
  if (!res.data_path.empty()) fmt::print("  data:    {}\n", res.data_path);
  fmt::print("  summary: {}\n", res.summary_path);
  for (const auto& g : s.groups) {
    fmt::print("  {}trials {}, diverged {}\n", g.label.empty() ? "" : g.label + ": ", g.trials,
               g.diverged);
    for (const auto& c : g.checkpoints) {
      fmt::print("    n={:<10} q10={:<12.6g} q50={:<12.6g} q90={:<12.6g}\n", c.n, c.err.q10,
                 c.err.q50, c.err.q90);
    }
  }
  for (const auto& r : res.reports) {
    fmt::print("  {:<4} {:<12} deciding clause: {}", r.family, gsa::to_string(r.verdict),
               r.deciding_clause);
    if (r.alpha) fmt::print(", alpha={}", *r.alpha);
    if (r.delta) fmt::print(", delta={}", *r.delta);
    if (r.D) fmt::print(", D={:.6g}", *r.D);
    fmt::print("\n");
  }
  for (const auto& c : res.children) print_summary(c);
}

bool print_assertions(const gsa::ExperimentResult& res) {
  bool ok = true;
  for (const auto& a : res.assertions) {
    fmt::print("{} {}: {} ({})\n", a.passed ? "PASS" : "FAIL", res.summary.experiment_id, a.name,
               a.detail);
    ok = ok && a.passed;
  }
  for (const auto& c : res.children) ok = print_assertions(c) && ok;
  return ok;
}

bool has_assertions(const gsa::ExperimentConfig& cfg) {
  if (!cfg.assertions.empty()) return true;
  for (const auto& c : cfg.children) {
    if (has_assertions(c)) return true;
  }
  return false;
}

int run(const std::string& mode, const Options& opt) {
  nlohmann::json doc;
  gsa::ExperimentConfig cfg;
  try {
    std::ifstream in(opt.config);
    if (!in) throw gsa::ConfigError("", fmt::format("cannot read {}", opt.config));
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw gsa::ConfigError("", fmt::format("malformed JSON: {}", e.what()));
    }
    if (!doc.is_object()) throw gsa::ConfigError("", "expected an object");
    if (!doc.contains("mode")) doc["mode"] = mode;
    if (doc["mode"] != mode) {
      throw gsa::ConfigError("mode", fmt::format("config is for mode {} but the subcommand runs {}",
                                                 doc["mode"].dump(), mode));
    }
    if (opt.seed) doc["base_seed"] = *opt.seed;
    if (opt.workers) doc["workers"] = *opt.workers;
    if (opt.out || opt.format) {
      if (!doc.contains("output")) doc["output"] = nlohmann::json::object();
      if (opt.out) doc["output"]["dir"] = *opt.out;
      if (opt.format) doc["output"]["format"] = *opt.format;
    }
    cfg = gsa::parse_config(doc);
    if (opt.assert_checks && !has_assertions(cfg)) {
      throw gsa::ConfigError("assert", "--assert given but the config has no assert block");
    }
  } catch (const gsa::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  }

  gsa::ExperimentResult res;
  try {
    res = gsa::run_experiment(cfg);
  } catch (const std::exception& e) {
    fmt::print(stderr, "runtime error: {}\n", e.what());
    return kRuntimeError;
  }
  print_summary(res);
  if (opt.assert_checks) return print_assertions(res) ? kOk : kAssertFailed;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic approximation and zeroth-order SGD experiments under heavy-tailed noise"};
  app.require_subcommand(1);

  const std::map<std::string, std::string> commands{
      {"sa-run", "sa"},
      {"sgd-run", "sgd"},
      {"gslln-test", "gslln"},
      {"check-conditions", "conditions"},
      {"sweep", "sweep"},
  };
  const std::map<std::string, std::string> help{
      {"sa-run", "Monte-Carlo runs of the stochastic approximation recursion"},
      {"sgd-run", "Monte-Carlo runs of zeroth-order coordinate descent"},
      {"gslln-test", "Empirical test of the damped noise average S_n"},
      {"check-conditions", "Noise-condition verdicts for a noise model and schedule"},
      {"sweep", "One child experiment per value of a config parameter"},
  };

  Options opt;
  std::string chosen;
  for (const auto& [name, mode] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", opt.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "base seed (overrides base_seed)");
    sub->add_option("--out", opt.out, "output directory (overrides output.dir)");
    sub->add_option("--workers", opt.workers, "worker threads, 0 = all cores")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_flag("--assert", opt.assert_checks, "evaluate the config's assert block (exit 3 on failure)");
    sub->callback([&chosen, name = name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  return run(commands.at(chosen), opt);
}
