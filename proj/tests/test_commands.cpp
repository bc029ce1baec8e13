#include "dsanneal/commands.hpp"
#include "dsanneal/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dsanneal;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Commands : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dsanneal-cmd-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Preset with overrides merged in, written to the scratch dir.
  std::string config(const std::string& preset, const json& patch) {
    std::ifstream in(std::string(DSANNEAL_PRESET_DIR) + "/" + preset + ".json");
    json j = json::parse(in);
    if (!patch.is_null()) j.merge_patch(patch);
    const fs::path p = dir_ / (preset + ".json");
    std::ofstream(p) << j.dump(2);
    return p.string();
  }

  CommandOptions opts(const std::string& cfg) {
    CommandOptions o;
    o.config_path = cfg;
    o.out_dir = (dir_ / "out").string();
    return o;
  }

  std::vector<std::string> artifacts() const {
    std::vector<std::string> names;
    if (!fs::exists(dir_ / "out")) return names;
    for (const auto& e : fs::directory_iterator(dir_ / "out")) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Commands, RunWritesDocumentedFileSet) {
  const std::string cfg = config("ev-daa", {{"horizon", 300}});
  CommandOptions o = opts(cfg);
  o.svg = true;
  ASSERT_EQ(cmd_run(o, out_, err_), kExitOk) << err_.str();
  ExperimentConfig c = load_config(cfg);
  c.output_dir = (dir_ / "out").string();
  const std::string stem = "ev-daa-" + config_fingerprint(c);
  const std::vector<std::string> expected = {
      stem + ".daa-s1.consensus.csv", stem + ".daa-s1.consensus.svg", stem + ".daa-s1.cost.csv",
      stem + ".daa-s1.cost.svg",      stem + ".daa-s1.decisions.csv", stem + ".daa-s1.decisions.svg",
      stem + ".daa-s1.meta.json",     stem + ".daa-s1.trace.csv",     stem + ".daa-s1.tracking.csv",
      stem + ".daa-s1.tracking.svg",  stem + ".edges.txt"};
  EXPECT_EQ(artifacts(), expected);
  const std::string trace = slurp(dir_ / "out" / (stem + ".daa-s1.trace.csv"));
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "k,agent,x,v,s,xbar,consensus_err,social_cost");
  const json meta = json::parse(slurp(dir_ / "out" / (stem + ".daa-s1.meta.json")));
  EXPECT_EQ(meta.at("fingerprint"), config_fingerprint(c));
}

TEST_F(Commands, RunIsByteReproducible) {
  const std::string cfg = config("example1-daa", {{"horizon", 500}, {"record_stride", 1}});
  ASSERT_EQ(cmd_run(opts(cfg), out_, err_), kExitOk);
  std::map<std::string, std::string> first;
  for (const auto& n : artifacts()) first[n] = slurp(dir_ / "out" / n);
  fs::remove_all(dir_ / "out");
  ASSERT_EQ(cmd_run(opts(cfg), out_, err_), kExitOk);
  for (const auto& n : artifacts()) EXPECT_EQ(first.at(n), slurp(dir_ / "out" / n)) << n;
}

TEST_F(Commands, SeedOverrideChangesFingerprintAndTrace) {
  const std::string cfg = config("example1-daa", {{"horizon", 100}});
  CommandOptions o = opts(cfg);
  o.seed = 99;
  ASSERT_EQ(cmd_run(o, out_, err_), kExitOk);
  bool found = false;
  for (const auto& n : artifacts()) found |= n.find("daa-s99.trace.csv") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST_F(Commands, MalformedConfigExitsOneWithField) {
  const std::string cfg = config("example1-daa", {{"schedule", {{"tau_beta", 0.7}}}});
  EXPECT_EQ(cmd_run(opts(cfg), out_, err_), kExitConfig);
  EXPECT_NE(err_.str().find("schedule.tau_beta"), std::string::npos) << err_.str();
  EXPECT_TRUE(artifacts().empty());
}

TEST_F(Commands, MissingConfigIsIoError) {
  EXPECT_EQ(cmd_run(opts((dir_ / "nope.json").string()), out_, err_), kExitIo);
}

TEST_F(Commands, UnwritableOutputIsIoError) {
  const std::string cfg = config("example1-daa", {{"horizon", 10}});
  std::ofstream(dir_ / "blocker") << "file";
  CommandOptions o = opts(cfg);
  o.out_dir = (dir_ / "blocker" / "sub").string();
  EXPECT_EQ(cmd_run(o, out_, err_), kExitIo);
}

TEST_F(Commands, DivergenceExitsTwo) {
  const std::string cfg =
      config("double-well", {{"schedule", {{"c_alpha", 50.0}}}, {"game", {{"init_point", {3.0}}}}, {"horizon", 100}});
  EXPECT_EQ(cmd_run(opts(cfg), out_, err_), kExitDivergence);
  EXPECT_NE(err_.str().find("iteration"), std::string::npos);
}

TEST_F(Commands, CheckPassesOnEvPreset) {
  EXPECT_EQ(cmd_check(opts(config("ev-daa", {})), out_, err_), kExitOk) << out_.str() << err_.str();
}

TEST_F(Commands, CheckFailsOnEmptyNetwork) {
  EXPECT_EQ(cmd_check(opts(config("ev-disconnected", {})), out_, err_), kExitCheckFailed);
  EXPECT_NE(out_.str().find("connectivity  FAIL"), std::string::npos);
}

TEST_F(Commands, CheckCatchesPlantedGradientBug) {
  const std::string cfg = config("example1-daa", {{"game", {{"planted_gradient_offset", 0.01}}}});
  EXPECT_EQ(cmd_check(opts(cfg), out_, err_), kExitCheckFailed);
  EXPECT_NE(out_.str().find("gradients     FAIL"), std::string::npos);
}

TEST_F(Commands, OracleExampleOne) {
  ASSERT_EQ(cmd_oracle(opts(config("example1-daa", {})), out_, err_), kExitOk);
  const json j = json::parse(out_.str());
  EXPECT_NEAR(j.at("value").get<double>(), 75.0 / 9, 1e-3);
  EXPECT_EQ(j.at("nash").at("point")[0], 0.75);
}

TEST_F(Commands, OracleGridOnTenAgentsIsRejected) {
  const std::string cfg = config("ev-daa", {{"oracle", {{"method", "grid"}}}});
  EXPECT_EQ(cmd_oracle(opts(cfg), out_, err_), kExitConfig);
  EXPECT_NE(err_.str().find("multistart"), std::string::npos);
}

TEST_F(Commands, CompareSameMethodGivesZero) {
  const std::string cfg = config("example1-daa", {{"horizon", 400}, {"compare", {"daag", "daag"}}});
  ASSERT_EQ(cmd_compare(opts(cfg), out_, err_), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("difference (daag_a - daag_b): 0\n"), std::string::npos) << out_.str();
  EXPECT_NE(out_.str().find("smaller: tie"), std::string::npos);
}

TEST_F(Commands, EnsembleWritesSummary) {
  const std::string cfg = config("example1-daa", {{"horizon", 300}, {"replicates", 3}});
  ASSERT_EQ(cmd_ensemble(opts(cfg), out_, err_), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("ensemble of 3 (3 completed"), std::string::npos);
  ASSERT_EQ(artifacts().size(), 1u);
  const json j = json::parse(slurp(dir_ / "out" / artifacts()[0]));
  EXPECT_EQ(j.at("seeds").size(), 3u);
  EXPECT_TRUE(j.contains("basin_fraction"));
}
