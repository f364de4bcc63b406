#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "sclba/experiment.hpp"
#include "test_support.hpp"

namespace sclba {
namespace {

using testing::TempDir;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = cli::cli_main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines_of(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

const std::string kMutag = (testing::data_dir() / "MUTAG").string();

TEST(Cli, InspectMutag) {
  const CliRun r = run({"inspect", "--dataset", kMutag});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("graphs             188"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("avg nodes          17.93"), std::string::npos) << r.out;
}

TEST(Cli, InspectDumpRoundTrips) {
  TempDir dir("dump");
  const auto dump = dir.path() / "mutag.txt";
  ASSERT_EQ(run({"inspect", "--dataset", kMutag, "--dump", dump.string()}).code, 0);
  std::ifstream in(dump);
  EXPECT_EQ(read_canonical(in), parse_tudataset(kMutag));
}

TEST(Cli, AttackDefaultsWriteOneSummaryRow) {
  TempDir dir("attack");
  const CliRun r = run({"attack", "--dataset", kMutag, "--out", dir.path().string(), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = lines_of(dir.path() / "attack_summary.csv");
  EXPECT_EQ(summary.size(), 2u);
  const auto per_seed = lines_of(dir.path() / "attack_per_seed.csv");
  EXPECT_EQ(per_seed.size(), 6u);
  EXPECT_EQ(per_seed[0], kPerSeedHeader);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "trigger_report_seed0.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "poison_record_seed4.txt"));
}

TEST(Cli, SweepPWritesFourRows) {
  TempDir dir("sweep");
  const CliRun r = run({"sweep-p", "--dataset", kMutag, "--p", "1,3,5,7", "--seeds", "0", "--epochs",
                     "10", "--out", dir.path().string(), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(dir.path() / "sweep_p_summary.csv").size(), 5u);
  EXPECT_EQ(lines_of(dir.path() / "sweep_p_per_seed.csv").size(), 5u);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "sweep_p.md"));

  const CliRun rep = run({"report", "--out", dir.path().string()});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_NE(rep.out.find("poisoning rate"), std::string::npos) << rep.out;
}

TEST(Cli, ConfigFileOverridesFlags) {
  TempDir dir("config");
  const auto cfg = dir.path() / "cfg.json";
  testing::write_text(cfg, R"({"t": [1, 2], "seeds": [3], "epochs": 5})");
  const CliRun r = run({"sweep-t", "--dataset", kMutag, "--t", "3", "--config", cfg.string(), "--out",
                     dir.path().string(), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines_of(dir.path() / "sweep_t_per_seed.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NE(rows[1].find(",1,3,"), std::string::npos) << rows[1];
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"attack", "--bogus"}).code, 1);
  EXPECT_EQ(run({"attack", "--dataset", kMutag, "--model", "gat"}).code, 1);
  EXPECT_EQ(run({"attack", "--dataset", kMutag, "--p", "abc"}).code, 1);
  EXPECT_EQ(run({"attack", "--dataset", kMutag, "--config", "/nonexistent.json"}).code, 1);
  const CliRun missing = run({"attack", "--dataset", "/nonexistent-dir"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("nonexistent-dir"), std::string::npos);
  EXPECT_EQ(run({"report", "--out", "/nonexistent-dir"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, NumericalFailureExitsThree) {
  TempDir dir("num");
  const auto cfg = dir.path() / "cfg.json";
  testing::write_text(cfg, R"({"learning_rate": 1e300, "seeds": [0], "epochs": 30})");
  const CliRun r = run({"attack", "--dataset", kMutag, "--config", cfg.string(), "--out",
                     dir.path().string(), "--quiet"});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, TrainCleanAndSelectTrigger) {
  TempDir dir("clean");
  ASSERT_EQ(run({"train-clean", "--dataset", kMutag, "--seeds", "0", "--epochs", "5", "--out",
                 dir.path().string()}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "model_gcn_seed0.ckpt"));
  const CliRun r = run({"select-trigger", "--dataset", kMutag, "--seeds", "0", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("trigger class"), std::string::npos);
}

}  // namespace
}  // namespace sclba
