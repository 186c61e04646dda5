#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <string>

#include "harness.hpp"

namespace {

using nlohmann::json;
using shellstab::harness::ConfigError;
using shellstab::harness::parse_config;

json base_config() {
  return json::parse(R"({
    "schema_version": 1,
    "geometry": {"n": 2, "beta": -1.0, "r1": 1.0, "r2": 2.0},
    "family": {"kind": "random", "amplitude": 0.03, "max_mode": 4, "samples": 6, "seed": 5}
  })");
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(HarnessConfig, ParsesAndKeepsDefaults) {
  const auto cfg = parse_config(base_config());
  EXPECT_EQ(cfg.family.samples, 6);
  EXPECT_DOUBLE_EQ(cfg.tolerance("eigen_slack"), 1e-8);
  EXPECT_EQ(cfg.solver.levels, 3);
}

TEST(HarnessConfig, ErrorsNameTheField) {
  auto doc = base_config();
  doc["geometry"]["radius"] = 1.0;
  EXPECT_EQ(config_error(doc).rfind("geometry.radius", 0), 0u) << config_error(doc);

  doc = base_config();
  doc["tolerances"] = {{"eigen_slak", 1e-8}};
  EXPECT_NE(config_error(doc).find("tolerances.eigen_slak"), std::string::npos);

  doc = base_config();
  doc["family"]["samples"] = "ten";
  EXPECT_EQ(config_error(doc).rfind("family.samples", 0), 0u);

  doc = base_config();
  doc["schema_version"] = 2;
  EXPECT_NE(config_error(doc).find("schema_version"), std::string::npos);

  doc = base_config();
  doc["extra"] = true;
  EXPECT_EQ(config_error(doc).rfind("extra", 0), 0u);
}

TEST(HarnessConfig, HashIgnoresWorkersAndOutput) {
  auto doc = base_config();
  const auto a = parse_config(doc);
  doc["workers"] = 3;
  doc["output"] = "elsewhere";
  const auto b = parse_config(doc);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  doc["family"]["seed"] = 6;
  EXPECT_NE(parse_config(doc).hash(), a.hash());
}

TEST(HarnessRun, OutputIndependentOfWorkerCount) {
  auto cfg = parse_config(base_config());
  cfg.workers = 1;
  const auto serial = shellstab::harness::run_lemma_checks(cfg);
  cfg.workers = 3;
  const auto parallel = shellstab::harness::run_lemma_checks(cfg);
  EXPECT_EQ(shellstab::harness::to_csv(serial), shellstab::harness::to_csv(parallel));
  EXPECT_TRUE(serial.passed());
}

TEST(HarnessRun, DrawIsReproducibleAndAdmissible) {
  const auto cfg = parse_config(base_config());
  const auto a = shellstab::harness::draw_family(cfg);
  const auto b = shellstab::harness::draw_family(cfg);
  ASSERT_EQ(a.samples.size(), 6u);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].domain.outer.coefficients(), b.samples[i].domain.outer.coefficients());
    EXPECT_EQ(a.samples[i].domain.inner.coefficients(), b.samples[i].domain.inner.coefficients());
  }
  EXPECT_GT(a.acceptance_rate(), 0.0);
}

TEST(HarnessRun, ShellCurveAssertionsPass) {
  auto doc = base_config();
  doc["betas"] = {-4.0, -1.0, -0.25};
  const auto r = shellstab::harness::run_shell_eig(parse_config(doc));
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.rows.size(), 3u);
}

}  // namespace
