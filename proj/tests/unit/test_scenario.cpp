#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "pwdlab/scenario.hpp"

using namespace pwdlab;

namespace {

const std::string kMinimal = R"({
  "name": "tiny",
  "context": {"n": 4},
  "concept": {"kind": "dictator", "variables": [2]},
  "outcome": {"family": "bernoulli-product", "k": 2, "lambda": 0.1},
  "p0": {"kind": "explicit", "values": [0.2, 0.3]},
  "p1": {"kind": "offset", "value": 0.4}
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return text.replace(at, from.size(), to);
}

std::string error_where(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "<no error>";
}

}  // namespace

TEST(Scenario, ParsesMinimalConfig) {
  const auto s = parse_scenario(kMinimal);
  EXPECT_EQ(s.name, "tiny");
  EXPECT_EQ(s.n, 4U);
  EXPECT_EQ(s.shape.k, 2U);
  const auto t = build_target(s);
  EXPECT_EQ(t.c, Concept::dictator(2, 4));
  EXPECT_DOUBLE_EQ(t.p1.bias(0), 0.6);
  EXPECT_NEAR(t.p1.bias(1), 0.7, 1e-15);
}

TEST(Scenario, RoundTripIsIdentity) {
  const auto s = parse_scenario(kMinimal);
  EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
  for (const auto& entry : std::filesystem::directory_iterator(PWDLAB_SCENARIO_DIR)) {
    const auto spec = load_scenario(entry.path().string());
    const auto again = parse_scenario(serialize_scenario(spec));
    EXPECT_EQ(again, spec) << entry.path();
    EXPECT_EQ(serialize_scenario(again), serialize_scenario(spec));
  }
}

TEST(Scenario, ErrorsNameTheField) {
  EXPECT_EQ(error_where(replace(kMinimal, "[0.2, 0.3]", "[0.05, 0.3]")), "p0.values[0]");
  EXPECT_EQ(error_where(replace(kMinimal, "\"n\": 4", "\"n\": -4")), "context.n");
  EXPECT_EQ(error_where(replace(kMinimal, "\"dictator\"", "\"parity\"")), "concept.kind");
  EXPECT_EQ(error_where(replace(kMinimal, "\"explicit\"", "\"mystery\"")), "p0.kind");
  EXPECT_EQ(error_where(replace(kMinimal, "\"name\": \"tiny\",", "\"name\": \"tiny\", \"colour\": 1,")), "colour");
  EXPECT_EQ(error_where(replace(kMinimal, "\"lambda\": 0.1", "\"lambda\": 0.1, \"extra\": true")),
            "outcome.extra");
}

TEST(Scenario, MalformedJsonReportsPosition) {
  const auto where = error_where("{\n  \"name\": ,\n}");
  EXPECT_EQ(where.rfind("line 2:", 0), 0U) << where;
}

TEST(Scenario, DimensionMismatchIsRejected) {
  EXPECT_EQ(error_where(replace(kMinimal, "[2]", "[5]")).rfind("concept.variables", 0), 0U);
  EXPECT_THROW(parse_scenario(replace(kMinimal, "[0.2, 0.3]", "[0.2]")), ConfigError);
}

TEST(Scenario, RecipesProduceValidTargets) {
  auto s = parse_scenario(kMinimal);
  s.p0 = ParamSource{"fill", {}, 0.5};
  s.p1 = ParamSource{"same"};
  auto t = build_target(s);
  EXPECT_EQ(t.p0, t.p1);
  s.p1 = ParamSource{"random", {}, 0.0, 0.2, 0.8, 9};
  t = build_target(s);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_GE(t.p1.bias(j), 0.2);
    EXPECT_LE(t.p1.bias(j), 0.8);
  }
  EXPECT_EQ(build_target(s).p1, t.p1);
}

TEST(Scenario, PipelineNames) {
  EXPECT_EQ(parse_pipeline("reverse"), PipelineKind::reverse);
  EXPECT_EQ(to_string(PipelineKind::direct), "direct");
  EXPECT_THROW(parse_pipeline("sideways"), std::invalid_argument);
  EXPECT_THROW(load_scenario("/nonexistent/config.json"), ConfigError);
}
