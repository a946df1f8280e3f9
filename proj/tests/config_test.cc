#include <gtest/gtest.h>

#include <sstream>

#include "tracenet/config.h"

namespace tracenet {
namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.toml");
}

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig c = parse("");
  EXPECT_EQ(c.mobility.n_people, 5000);
  EXPECT_EQ(c.disease.incubation_days, 5);
  EXPECT_EQ(c.disease.infectious_days, 7);
  EXPECT_DOUBLE_EQ(c.ipc.alpha, 0.5);
  EXPECT_EQ(c.ipc.max_hops, 2);
  EXPECT_EQ(c.classifier.epochs, 300);
  EXPECT_EQ(c.mitigation.base.start_day, 8);
  EXPECT_EQ(c.mitigation.n_runs, 20);
}

TEST(Config, ParsesEveryValueKind) {
  const RunConfig c = parse(R"(# comment
[run]
master_seed = 99   # trailing comment
train_days = 10

[mobility]
horizon_days = 25
visits_per_person_per_day = 0.25

[ipc]
exclude_focal_leaf = true

[classifier]
model = "perceptron"

[mitigation]
policies = ["none", "bidirectional"]
test_fractions = [0.5, 1]
scope = "infector_only"
)");
  EXPECT_EQ(c.master_seed, 99u);
  EXPECT_EQ(c.train_days, 10);
  EXPECT_EQ(c.deploy_days(), 15);
  EXPECT_EQ(c.disease.horizon_days, 10);
  EXPECT_DOUBLE_EQ(c.mobility.visits_per_person_per_day, 0.25);
  EXPECT_TRUE(c.ipc.exclude_focal_leaf);
  EXPECT_EQ(c.classifier.kind, ModelKind::kPerceptron);
  EXPECT_EQ(c.mitigation.policies,
            (std::vector<PolicyKind>{PolicyKind::kNone, PolicyKind::kBidirectional}));
  EXPECT_EQ(c.mitigation.test_fractions, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(c.mitigation.base.scope, QuarantineScope::kInfectorOnly);
}

TEST(Config, SeedsAreDerivedFromMaster) {
  const RunConfig a = parse("[run]\nmaster_seed = 1\n");
  const RunConfig b = parse("[run]\nmaster_seed = 2\n");
  EXPECT_NE(a.mobility.rng_seed, b.mobility.rng_seed);
  EXPECT_NE(a.mobility.rng_seed, a.disease.rng_seed);
  EXPECT_EQ(a.mitigation.master_seed, parse("[run]\nmaster_seed = 1\n").mitigation.master_seed);
}

void expect_rejected(const std::string& text, const std::string& fragment) {
  try {
    parse(text);
    FAIL() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsBadInput) {
  expect_rejected("[run]\nmaster_sed = 1\n", "test.toml:2");
  expect_rejected("[nope]\n", "test.toml:1");
  expect_rejected("[run]\ntrain_days = 3\ntrain_days = 4\n", "test.toml:3");
  expect_rejected("[mobility]\nn_people = \"many\"\n", "test.toml:2");
  expect_rejected("[mobility]\nn_people = 0\n", "n_people");
  expect_rejected("[ipc]\nalpha = 2.0\n", "alpha");
  expect_rejected("[mitigation]\npolicies = [\"backward\"]\n", "backward");
  expect_rejected("[run]\ntrain_days = 90\n", "train_days");
  expect_rejected("n_people = 3\n", "test.toml:1");
  expect_rejected("[run]\nmaster_seed 1\n", "test.toml:2");
}

TEST(Config, TextRoundTripsAndHashes) {
  const RunConfig d = desk_config();
  const RunConfig back = parse(d.to_text());
  EXPECT_EQ(back.to_text(), d.to_text());
  EXPECT_EQ(back.hash(), d.hash());
  EXPECT_EQ(d.hash().size(), 16u);
  RunConfig e = d;
  e.ipc.alpha = 0.7;
  EXPECT_NE(e.hash(), d.hash());
}

TEST(Config, ShippedDeskFileMatchesBuiltIn) {
  const RunConfig f = load_config(std::filesystem::path(TRACENET_SOURCE_DIR) / "configs/desk.toml");
  EXPECT_EQ(f.to_text(), desk_config().to_text());
  EXPECT_THROW(load_config("/nonexistent/x.toml"), ConfigError);
}

}  // namespace
}  // namespace tracenet
