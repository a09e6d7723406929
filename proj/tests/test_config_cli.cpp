#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "btcsim/cli.hpp"
#include "btcsim/config_io.hpp"

using namespace btcsim;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(ConfigIo, RoundTripsDefaults) {
  const ScenarioConfig c;
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  const ScenarioConfig h = honest_scenario();
  EXPECT_EQ(config_from_json(config_to_json(h)), h);
}

TEST(ConfigIo, RoundTripsUnusualValues) {
  ScenarioConfig c;
  c.pools = {{0.1 + 0.2, false}, {1.0 / 3.0, true}};
  c.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.rates.difficulty = 1.0e-3;
  c.bounds.max_events = 1LL << 40;
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
}

TEST(ConfigIo, MissingKeysKeepDefaults) {
  const ScenarioConfig c = config_from_json(R"({"depth": 3, "bounds": {"max_blocks": 50}})");
  EXPECT_EQ(c.confirmation_depth, 3);
  EXPECT_EQ(c.bounds.max_blocks, 50);
  EXPECT_EQ(c.bounds.max_transactions, 200);
  EXPECT_EQ(c.pools, ScenarioConfig{}.pools);
}

TEST(ConfigIo, RejectsUnknownKeysAndBadJson) {
  EXPECT_THROW(config_from_json(R"({"depht": 3})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"pools": [{"share": 0.5, "evil": true}]})"), ConfigError);
  EXPECT_THROW(config_from_json("{"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"depth": "three"})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/btcsim.json"), ConfigError);
}

TEST(CliParse, DepthForms) {
  EXPECT_EQ(parse_depths("3"), (std::vector<std::int32_t>{3}));
  EXPECT_EQ(parse_depths("1..4"), (std::vector<std::int32_t>{1, 2, 3, 4}));
  EXPECT_TRUE(parse_depths("4..1").empty());
  EXPECT_THROW(parse_depths("x"), UsageError);
  EXPECT_THROW(parse_depths("1..y"), UsageError);
  EXPECT_THROW(parse_depths("2-3"), UsageError);
}

TEST(CliParse, Shares) {
  EXPECT_EQ(parse_shares("0.5,0.25"), (std::vector<double>{0.5, 0.25}));
  EXPECT_THROW(parse_shares("0.5,abc"), UsageError);
}

TEST(CliParse, EstimateDefaults) {
  const CliInvocation inv = parse_and_validate({"estimate", "--depth", "1..4", "--seed", "42"});
  EXPECT_EQ(inv.subcommand, "estimate");
  EXPECT_EQ(inv.depths, (std::vector<std::int32_t>{1, 2, 3, 4}));
  EXPECT_EQ(inv.config.seed, 42u);
  EXPECT_EQ(inv.config.pools, ScenarioConfig{}.pools);
}

TEST(CliParse, OverridesWinOverFile) {
  const auto path = temp_file("btcsim_cli_test.json", R"({"replications": 5, "seed": 9, "depth": 2})");
  const CliInvocation inv = parse_and_validate({"simulate", "--config", path, "--replications", "7"});
  EXPECT_EQ(inv.config.replications, 7);
  EXPECT_EQ(inv.config.seed, 9u);
  EXPECT_EQ(inv.config.confirmation_depth, 2);
}

TEST(CliParse, EnvironmentSuppliesDefaultConfig) {
  const auto path = temp_file("btcsim_cli_env.json", R"({"seed": 77})");
  ::setenv(kConfigEnvVar, path.c_str(), 1);
  const CliInvocation inv = parse_and_validate({"simulate"});
  ::unsetenv(kConfigEnvVar);
  EXPECT_EQ(inv.config.seed, 77u);
}

TEST(CliParse, SharesAndMaliciousPool) {
  CliInvocation inv = parse_and_validate({"simulate", "--shares", "0.3,0.3,0.4", "--malicious-pool", "2"});
  ASSERT_EQ(inv.config.pools.size(), 3u);
  EXPECT_TRUE(inv.config.pools[2].malicious);
  EXPECT_EQ(inv.config.malicious_pool(), 2);
  inv = parse_and_validate({"simulate", "--malicious-pool", "-1"});
  EXPECT_EQ(inv.config.malicious_pool(), -1);
  EXPECT_EQ(inv.config.malicious_peers, 0);
  EXPECT_THROW(parse_and_validate({"simulate", "--malicious-pool", "9"}), UsageError);
}

TEST(CliParse, UsageErrors) {
  EXPECT_THROW(parse_and_validate({"estimate", "--bogus"}), UsageError);
  EXPECT_THROW(parse_and_validate({}), UsageError);
  EXPECT_THROW(parse_and_validate({"frobnicate"}), UsageError);
  EXPECT_THROW(parse_and_validate({"estimate", "--format", "xml"}), UsageError);
  EXPECT_THROW(parse_and_validate({"oracle", "--q", "0.3"}), UsageError);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"estimate", "--shares", "0.6,0.6"}).code, 1);
  EXPECT_EQ(cli({"estimate", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"estimate", "--depth", "0"}).code, 1);
  EXPECT_EQ(cli({"estimate", "--depth", "3..1"}).code, 1);
  EXPECT_EQ(cli({"estimate", "--depth", "one"}).code, 2);
  EXPECT_EQ(cli({"simulate", "--config", "/nonexistent.json"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, OracleCriticalWalkIsCertain) {
  const Result r = cli({"oracle", "--q", "0.5", "--z", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_DOUBLE_EQ(std::stod(r.out), 1.0);
}

TEST(Cli, DumpConfigReparses) {
  const Result r = cli({"simulate", "--dump-config", "--seed", "5", "--max-blocks", "60"});
  ASSERT_EQ(r.code, 0) << r.err;
  ScenarioConfig expected;
  expected.seed = 5;
  expected.bounds.max_blocks = 60;
  EXPECT_EQ(config_from_json(r.out), expected);
  const auto path = temp_file("btcsim_dump.json", r.out);
  EXPECT_EQ(parse_and_validate({"simulate", "--config", path}).config, expected);
}

TEST(Cli, EstimateCsvToFile) {
  const auto path = (std::filesystem::temp_directory_path() / "btcsim_est.csv").string();
  const Result r = cli({"estimate", "--depth", "1..2", "--replications", "10", "--format", "csv", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("Confirmations", 0), 0u);  // table still printed
  std::ifstream in(path);
  std::string header, row1, row2, extra;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "depth,successes,runs,point,ci_low,ci_high");
  EXPECT_EQ(row1.rfind("1,", 0), 0u);
  EXPECT_EQ(row2.rfind("2,", 0), 0u);
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(Cli, UnwritableOutputFails) {
  EXPECT_EQ(cli({"estimate", "--depth", "1", "--replications", "2", "--format", "json", "--out", "/nonexistent/x"}).code,
            1);
}

TEST(Cli, BlockSharesRowsPerPool) {
  const Result r = cli({"block-shares", "--replications", "2", "--min-blocks", "100", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(Cli, TraceWritesTransitions) {
  const Result r = cli({"trace", "--seed", "3", "--max-blocks", "10"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("mined block=2"), std::string::npos);
  EXPECT_NE(r.err.find("terminated"), std::string::npos);
}

TEST(Cli, SimulateJson) {
  const Result r = cli({"simulate", "--seed", "3", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"termination\""), std::string::npos);
}
