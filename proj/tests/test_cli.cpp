#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using volboot::cli::run;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("volboot_cli_") + info->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SizeWritesArtifacts) {
  const int code = run({"size", "--dgp", "1", "--test", "tnull", "--n", "60", "--paths", "3", "--reps",
                        "20", "--B", "19", "--seed", "42", "--out", out("a")});
  ASSERT_EQ(code, 0);
  for (const char* name : {"fanchart.csv", "fanchart.svg", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "a" / name)) << name;
  }
  for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
    EXPECT_NE(entry.path().extension(), ".partial");
  }
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "a" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 42);
  EXPECT_EQ(manifest["command"], "size");
  EXPECT_EQ(manifest["config"]["n"], 60);
  EXPECT_EQ(manifest["outputs"].size(), 3u);
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
  EXPECT_TRUE(manifest.contains("started_at"));
}

TEST_F(CliTest, GarchBoundViolationFailsWithoutArtifacts) {
  const int code = run({"size", "--n", "10", "--vol", "garch", "--sigma-eta", "3.162", "--out", out("b")});
  EXPECT_EQ(code, 1);
  EXPECT_FALSE(fs::exists(dir_ / "b" / "fanchart.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "b" / "manifest.json"));
}

TEST_F(CliTest, BadFlagsAreConfigErrors) {
  EXPECT_EQ(run({"size", "--dgp", "7", "--out", out("c")}), 1);
  EXPECT_EQ(run({"size", "--no-such-flag"}), 1);
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"power", "--test", "s", "--c-grid", "0:x:1", "--out", out("c")}), 1);
  EXPECT_FALSE(fs::exists(dir_ / "c" / "power.csv"));
}

TEST_F(CliTest, OracleRefusesCoarseGrid) {
  EXPECT_EQ(run({"oracle", "--kind", "garch", "--steps", "50", "--reps", "10", "--out", out("d")}), 1);
  EXPECT_FALSE(fs::exists(dir_ / "d" / "oracle.csv"));
}

TEST_F(CliTest, OracleSummaryRow) {
  ASSERT_EQ(run({"oracle", "--kind", "garch", "--steps", "200", "--reps", "30", "--n", "400", "--out",
                 out("e")}),
            0);
  std::istringstream summary(slurp(dir_ / "e" / "oracle_summary.csv"));
  std::string header, row;
  std::getline(summary, header);
  std::getline(summary, row);
  EXPECT_EQ(header.rfind("kind,steps,discrete_n,reps,ks_v1,ks_m1", 0), 0u);
  EXPECT_EQ(row.rfind("garch,200,400,30,", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "e" / "oracle.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "e" / "discrete.csv"));
}

TEST_F(CliTest, DegenerateOracleHasNoDispersion) {
  ASSERT_EQ(run({"oracle", "--sigma-eta", "0", "--steps", "200", "--reps", "20", "--out", out("f")}), 0);
  std::istringstream summary(slurp(dir_ / "f" / "oracle_summary.csv"));
  std::string header, row;
  std::getline(summary, header);
  std::getline(summary, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 10u);
  EXPECT_LT(std::stod(cells[7]), 1e-20);  // limit_v1_var
}

TEST_F(CliTest, PowerDefaultGrid) {
  ASSERT_EQ(run({"power", "--test", "cs", "--n", "40", "--paths", "2", "--reps", "10", "--B", "9", "--out",
                 out("g")}),
            0);
  const std::string csv = slurp(dir_ / "g" / "power.csv");
  EXPECT_NE(csv.find("\n0,15,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "g" / "power.svg"));
}

TEST_F(CliTest, RerunIsByteIdentical) {
  ASSERT_EQ(run({"size", "--dgp", "3", "--test", "t", "--n", "50", "--paths", "3", "--reps", "15", "--B", "9",
                 "--threads", "2", "--out", out("h1")}),
            0);
  ASSERT_EQ(run({"rerun", out("h1") + "/manifest.json", "--out", out("h2")}), 0);
  EXPECT_EQ(slurp(dir_ / "h1" / "fanchart.csv"), slurp(dir_ / "h2" / "fanchart.csv"));
  EXPECT_EQ(slurp(dir_ / "h1" / "fanchart.svg"), slurp(dir_ / "h2" / "fanchart.svg"));
}

TEST_F(CliTest, EnvironmentSeedFallback) {
  setenv("VOLBOOT_SEED", "777", 1);
  const int code = run({"size", "--n", "40", "--paths", "2", "--reps", "5", "--B", "9", "--out", out("i")});
  unsetenv("VOLBOOT_SEED");
  ASSERT_EQ(code, 0);
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "i" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 777);
  // rerun without the variable still reproduces the run
  ASSERT_EQ(run({"rerun", out("i") + "/manifest.json", "--out", out("j")}), 0);
  EXPECT_EQ(slurp(dir_ / "i" / "fanchart.csv"), slurp(dir_ / "j" / "fanchart.csv"));
}
