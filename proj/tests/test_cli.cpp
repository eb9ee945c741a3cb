#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dqm/cli.hpp"

namespace dqm {
namespace {

namespace fs = std::filesystem;

const fs::path fixtures{DQM_FIXTURES};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dqm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }

  // Runs the dqm binary; returns its exit status.
  int run(const std::string& args) const {
    const std::string cmd = std::string(DQM_CLI_PATH) + " " + args + " >" +
                            path("stdout").string() + " 2>" + path("stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out() const { return slurp(path("stdout")); }
  std::string err() const { return slurp(path("stderr")); }

  fs::path dir_;
};

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

TEST_F(Cli, EmptyVoteFileGivesHeaderOnly) {
  const auto votes = write("votes.csv", "");
  ASSERT_EQ(run("estimate " + votes.string() + " --n-items 5"), 0) << err();
  EXPECT_EQ(out(),
            "task_index,nominal,majority,chao92_total,vchao92_total,switch_total,xi_pos,xi_neg,"
            "coverage_hat,truth,flags\n");
  const auto header_only = write("header.csv", "task_id,worker_id,item_id,label\n");
  ASSERT_EQ(run("estimate " + header_only.string() + " --n-items 5"), 0) << err();
  EXPECT_EQ(lines(out()).size(), 1u);
}

TEST_F(Cli, GoldenTrajectories) {
  const auto votes = (fixtures / "three_tasks_votes.csv").string();
  const auto truth = (fixtures / "three_tasks_truth.csv").string();
  ASSERT_EQ(run("estimate " + votes + " --n-items 4 --truth " + truth), 0) << err();
  EXPECT_EQ(out(), slurp(fixtures / "three_tasks_w10.csv"));
  ASSERT_EQ(run("estimate " + votes + " --n-items 4 --trend-window 1 --truth " + truth +
                " --out " + path("w1.csv").string()),
            0)
      << err();
  EXPECT_EQ(slurp(path("w1.csv")), slurp(fixtures / "three_tasks_w1.csv"));
}

TEST_F(Cli, GoldenTrajectoryInProcess) {
  std::ifstream votes(fixtures / "three_tasks_votes.csv");
  std::ifstream truth(fixtures / "three_tasks_truth.csv");
  std::ostringstream out;
  cli::run_estimate(votes, 4, {1, 10}, &truth, out);
  EXPECT_EQ(out.str(), slurp(fixtures / "three_tasks_w10.csv"));
}

TEST_F(Cli, EstimateInputErrorsExitTwo) {
  const auto bad = write("bad.csv", "task_id,worker_id,item_id,label\n0,0,0,1\n0,1,9,1\n");
  EXPECT_EQ(run("estimate " + bad.string() + " --n-items 4"), 2);
  EXPECT_NE(err().find("line 3"), std::string::npos) << err();
  EXPECT_EQ(run("estimate " + bad.string() + " --n-items 0"), 2);
  EXPECT_EQ(run("estimate " + path("missing.csv").string() + " --n-items 4"), 2);
  EXPECT_EQ(run("estimate --n-items 4"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, SimulateIsByteIdenticalAcrossRuns) {
  const auto scenario = (fixtures / "fp_only.json").string();
  ASSERT_EQ(run("simulate " + scenario + " --out " + path("a.csv").string()), 0) << err();
  ASSERT_EQ(run("simulate " + scenario + " --out " + path("b.csv").string()), 0) << err();
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  ASSERT_EQ(run("simulate " + scenario + " --seed 8 --out " + path("c.csv").string()), 0);
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(Cli, SimulatedVotesReplayThroughEstimate) {
  const auto scenario = (fixtures / "fp_only.json").string();
  ASSERT_EQ(run("simulate " + scenario + " --permutations 1 --out " + path("sum.csv").string() +
                " --votes-out " + path("votes.csv").string() + " --truth-out " +
                path("truth.csv").string()),
            0)
      << err();
  ASSERT_EQ(run("estimate " + path("votes.csv").string() + " --n-items 1000 --truth " +
                path("truth.csv").string()),
            0)
      << err();
  const auto traj = lines(out());
  const auto summary = lines(slurp(path("sum.csv")));
  ASSERT_EQ(traj.size(), 301u);
  ASSERT_EQ(summary.size(), 1u + 300u * 7u);
  // with one permutation the summary means are the replayed trajectory
  const auto header = split(traj[0]);
  for (std::size_t k = 1; k < summary.size(); ++k) {
    const auto s = split(summary[k]);
    const auto row = split(traj[std::stoul(s[0])]);
    EXPECT_EQ(s[3], s[2].empty() ? "" : "0");
    const std::string col = s[1] == "chao92"    ? "chao92_total"
                            : s[1] == "vchao92" ? "vchao92_total"
                            : s[1] == "switch"  ? "switch_total"
                                                : s[1];
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == col) {
        ASSERT_EQ(s[2], row[c]) << summary[k];
      }
    }
  }
  const auto last = split(traj.back());
  EXPECT_EQ(last[9], "100");
  // false positives inflate chao92, the switch total stays near the truth
  EXPECT_GT(std::stod(last[3]), 125.0);
  EXPECT_NEAR(std::stod(last[5]), 100.0, 25.0);
}

TEST_F(Cli, SimulateRejectsUnknownKey) {
  const auto scenario = write("s.json", R"({"n_items": 10, "fp_rat": 0.1})");
  EXPECT_EQ(run("simulate " + scenario.string()), 2);
  EXPECT_NE(err().find("unknown scenario key 'fp_rat'"), std::string::npos) << err();
  const auto invalid = write("t.json", R"({"n_items": 10, "n_dirty": 11})");
  EXPECT_EQ(run("simulate " + invalid.string()), 2);
  EXPECT_EQ(run("simulate " + (fixtures / "fp_only.json").string() + " --epsilon 2"), 2);
}

TEST_F(Cli, PairsOverPlantedRecords) {
  const auto records = (fixtures / "planted_records.csv").string();
  ASSERT_EQ(run("pairs " + records + " --alpha 0.5 --beta 0.8"), 0) << err();
  const auto rows = lines(out());
  ASSERT_EQ(rows.size(), 46u);
  EXPECT_EQ(rows[0], "left_id,right_id,similarity,stratum");
  std::vector<std::string> dirty;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto f = split(rows[k]);
    ASSERT_EQ(f.size(), 4u);
    ASSERT_LT(f[0], f[1]);
    if (f[3] == "auto_dirty") dirty.push_back(f[0] + "-" + f[1]);
  }
  EXPECT_EQ(dirty, (std::vector<std::string>{"r0-r1", "r2-r3"}));
  EXPECT_EQ(rows[1].substr(0, 6), "r0,r1,");
}

TEST_F(Cli, PairsErrorsExitTwo) {
  const auto dup = write("dup.csv", "record_id,name\na,x\na,y\n");
  EXPECT_EQ(run("pairs " + dup.string()), 2);
  EXPECT_NE(err().find("duplicate record_id 'a'"), std::string::npos) << err();
  const auto ok = write("ok.csv", "record_id,name\na,x\nb,y\n");
  EXPECT_EQ(run("pairs " + ok.string() + " --alpha 0.9 --beta 0.5"), 2);
}

TEST(CliGuard, MapsExceptionsToExitCodes) {
  std::ostringstream err;
  EXPECT_EQ(cli::guarded(err, [] {}), cli::kOk);
  EXPECT_EQ(cli::guarded(err, [] { throw InputError("bad"); }), cli::kInputError);
  EXPECT_EQ(cli::guarded(err, [] { throw DomainError("bad"); }), cli::kInputError);
  EXPECT_EQ(cli::guarded(err, [] { throw std::runtime_error("boom"); }), cli::kInternalError);
  EXPECT_NE(err.str().find("internal error: boom"), std::string::npos);
}

}  // namespace
}  // namespace dqm
