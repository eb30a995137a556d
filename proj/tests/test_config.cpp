#include "gsa/config.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

using namespace gsa;
using nlohmann::json;

namespace {

json sa_doc() {
  return json::parse(R"({
    "mode": "sa",
    "id": "t",
    "trials": 4,
    "horizon": 500,
    "problem": {"kind": "contraction", "dim": 2, "rho0": 0.5},
    "noise": {"family": "student_t", "nu": 2.5},
    "schedule": {"kind": "power_law", "D": 1, "gamma": 0.7}
  })");
}

std::string error_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

std::string error_text(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesSaDefaults) {
  const auto cfg = parse_config(sa_doc());
  EXPECT_EQ(cfg.mode, Mode::SA);
  EXPECT_EQ(cfg.trials, 4u);
  EXPECT_EQ(cfg.checkpoints, (std::vector<std::uint64_t>{1, 10, 100, 500}));
  EXPECT_EQ(cfg.problem.target, Vector::Ones(2));
  EXPECT_FALSE(cfg.x0.has_value());
  EXPECT_EQ(cfg.noise.family(), NoiseFamily::StudentTIID);
  EXPECT_EQ(cfg.format, OutputFormat::CSV);
  // defaults are recorded
  EXPECT_EQ(cfg.resolved["noise"]["sigma"], 1.0);
  EXPECT_EQ(cfg.resolved["base_seed"], 0);
  EXPECT_EQ(cfg.resolved["problem"]["target"], json::array({1.0, 1.0}));
  EXPECT_EQ(cfg.resolved["multiplier"]["kind"], "constant");
}

TEST(Config, ErrorsNameTheField) {
  auto doc = sa_doc();
  doc["trials"] = 0;
  EXPECT_EQ(error_path(doc), "trials");

  doc = sa_doc();
  doc["schedule"] = {{"kind", "log_tempered"}, {"delta", 1.5}};
  EXPECT_EQ(error_path(doc), "schedule");
  EXPECT_NE(error_text(doc).find("delta"), std::string::npos) << error_text(doc);

  doc = sa_doc();
  doc["noise"]["colour"] = "pink";
  EXPECT_EQ(error_path(doc), "noise.colour");

  doc = sa_doc();
  doc["extra"] = 1;
  EXPECT_EQ(error_path(doc), "extra");

  doc = sa_doc();
  doc["checkpoints"] = {10, 5};
  EXPECT_EQ(error_path(doc), "checkpoints[1]");

  doc = sa_doc();
  doc["checkpoints"] = {10, 5000};
  EXPECT_EQ(error_path(doc), "checkpoints[1]");

  doc = sa_doc();
  doc["x0"] = {1.0};
  EXPECT_EQ(error_path(doc), "x0");

  doc = sa_doc();
  doc["horizon"] = -3;
  EXPECT_EQ(error_path(doc), "horizon");

  doc = sa_doc();
  doc["id"] = "a/b";
  EXPECT_EQ(error_path(doc), "id");

  doc = sa_doc();
  doc["mode"] = "annealing";
  EXPECT_EQ(error_path(doc), "mode");

  doc = sa_doc();
  doc["problem"] = {{"kind", "quartic"}, {"q", {1.0}}};
  EXPECT_EQ(error_path(doc), "problem");  // no SA form

  doc = sa_doc();
  doc["noise"] = {{"family", "student_t"}};
  EXPECT_EQ(error_path(doc), "noise.nu");

  EXPECT_EQ(error_path(json::array()), "");
  EXPECT_THROW(parse_config(std::string("{not json")), ConfigError);
}

TEST(Config, HashIgnoresOutputAndWorkers) {
  auto a = sa_doc();
  auto b = sa_doc();
  b["workers"] = 8;
  b["output"] = {{"dir", "/tmp/elsewhere"}, {"format", "jsonl"}};
  EXPECT_EQ(parse_config(a).hash, parse_config(b).hash);
  // spelling out a default leaves the hash alone
  b["base_seed"] = 0;
  b["noise"]["sigma"] = 1.0;
  EXPECT_EQ(parse_config(a).hash, parse_config(b).hash);
  b["base_seed"] = 1;
  EXPECT_NE(parse_config(a).hash, parse_config(b).hash);
  EXPECT_EQ(parse_config(a).hash, parse_config(a.dump()).hash);
}

TEST(Config, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Config, SgdBlocks) {
  const auto cfg = parse_config(json::parse(R"({
    "mode": "sgd",
    "horizon": 100,
    "problem": {"kind": "quadratic", "diag": [1, 2, 3]},
    "noise": {"family": "log_tempered_cauchy", "p": 2},
    "schedule": {"kind": "log_tempered"},
    "increment": {"kind": "log_power", "kappa": 0.5},
    "mask": {"kind": "round_robin", "block_size": 2}
  })"));
  EXPECT_EQ(cfg.problem.dim, 3);
  EXPECT_EQ(cfg.mask.kind, MaskPolicy::Kind::RoundRobinBlocks);
  EXPECT_DOUBLE_EQ(cfg.increment(0), 1.0 / std::sqrt(std::log(2.0)));
  EXPECT_EQ(cfg.resolved["schedule"]["delta"], 1.0);

  auto doc = cfg.resolved;
  doc["mask"] = {{"kind", "fixed"}, {"row", {1, 0}}};
  EXPECT_EQ(error_path(doc), "mask.row");
  doc["mask"] = {{"kind", "fixed"}, {"row", {1, 0, 2}}};
  EXPECT_EQ(error_path(doc), "mask.row");
  doc["mask"] = {{"kind", "all_ones"}};
  doc["problem"] = {{"kind", "quadratic"}, {"Q", {{2, 1}, {1, 2}}}};
  EXPECT_EQ(error_path(doc), "problem");  // not diagonal
}

TEST(Config, ConditionsBlock) {
  const auto cfg = parse_config(json::parse(R"({
    "mode": "conditions",
    "noise": {"family": "student_t", "nu": 1.5},
    "schedule": {"kind": "power_law", "gamma": 0.8333333333333334},
    "conditions": {"checks": ["H", "G"], "truncation": {"rule": "moment_scaled", "alpha": 1.2}},
    "assert": {"expect": {"H2": "holds"}}
  })"));
  EXPECT_EQ(cfg.conditions.checks, (std::vector<std::string>{"H", "G"}));
  EXPECT_EQ(cfg.conditions.truncation.rule, TruncationScheme::Rule::MomentScaled);
  EXPECT_EQ(cfg.assertions.expect.at("H2"), "holds");

  auto doc = cfg.resolved;
  doc["conditions"]["truncation"] = {{"rule", "moment_scaled"}, {"alpha", 2.5}};
  EXPECT_EQ(error_path(doc), "conditions.truncation.alpha");
  doc = cfg.resolved;
  doc["conditions"]["checks"] = {"Z"};
  EXPECT_EQ(error_path(doc), "conditions.checks");
  doc = cfg.resolved;
  doc["assert"] = {{"expect", {{"H2", "maybe"}}}};
  EXPECT_EQ(error_path(doc), "assert.expect.H2");
}

TEST(Config, AssertionCheckpointsMustExist) {
  auto doc = sa_doc();
  doc["assert"] = {{"median_ratio", {{"min", 2}, {"from", 10}, {"to", 400}}}};
  EXPECT_EQ(error_path(doc), "assert.median_ratio");
  doc["assert"]["median_ratio"]["to"] = 500;
  EXPECT_NO_THROW(parse_config(doc));
}

TEST(Config, SweepExpandsChildren) {
  const auto cfg = parse_config(json::parse(R"({
    "mode": "sweep",
    "id": "sw",
    "horizon": 100,
    "problem": {"kind": "contraction", "dim": 1},
    "schedule": {"kind": "log_tempered"},
    "sweep": {"mode": "sa", "parameter": "schedule.delta", "values": [0.25, 0.5, 1]}
  })"));
  ASSERT_EQ(cfg.children.size(), 3u);
  EXPECT_EQ(cfg.children[1].id, "sw-1");
  EXPECT_DOUBLE_EQ(cfg.children[1].schedule.delta(), 0.5);
  EXPECT_NE(cfg.children[0].hash, cfg.children[2].hash);

  auto bad = cfg.resolved;
  bad["sweep"]["values"] = {0.5, 1.5};
  EXPECT_EQ(error_path(bad), "sweep.values[1]");
  bad["sweep"]["values"] = json::array();
  EXPECT_EQ(error_path(bad), "sweep.values");
  bad["sweep"] = {{"mode", "sweep"}, {"parameter", "x"}, {"values", {1}}};
  EXPECT_EQ(error_path(bad), "sweep.mode");
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"conditions_heavy_tail", "conditions_ltc", "gslln_gaussian",
                           "gslln_negative", "sa_gaussian", "sa_heavy_tail", "sa_infinite_mean",
                           "sgd_quadratic", "sweep_delta"}) {
    std::ifstream in(std::string(GSA_SOURCE_DIR) + "/configs/" + name + ".json");
    ASSERT_TRUE(in) << name;
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_NO_THROW(parse_config(ss.str())) << name;
  }
}
