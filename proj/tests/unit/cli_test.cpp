#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kToy = std::string(TEACHCERT_TEST_DATA) + "/toy.json";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = teachcert::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("teachcert-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<fs::path> reports() const {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir_))
      if (e.path().extension() == ".json") out.push_back(e.path());
    return out;
  }

  fs::path dir_;
};

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

TEST_F(CliTest, HelpAndUnknownCommand) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"verify"}).code, 2);  // --scenario is required
}

TEST_F(CliTest, ConfigurationErrorsExitTwo) {
  const std::string out = dir_.string();
  EXPECT_EQ(run({"verify", "--scenario", kToy, "--lambda", "1.5", "--out", out}).code, 2);
  EXPECT_EQ(run({"verify", "--scenario", kToy, "--degree", "3", "--out", out}).code, 2);
  EXPECT_EQ(run({"verify", "--scenario", (dir_ / "missing.json").string(), "--out", out}).code, 2);
  EXPECT_EQ(run({"verify", "--scenario", kToy, "--mode", "sideways", "--out", out}).code, 2);
  EXPECT_EQ(run({"lattice-gen", "--rows", "2", "--cols", "2", "--h0", "1,1", "--target", "3,3", "--out", out}).code,
            2);
}

TEST_F(CliTest, VerifyWritesReportOnce) {
  const std::vector<std::string> args{"verify", "--scenario", kToy, "--lambda", "0.4", "--t",
                                      "1",      "--out",      dir_.string()};
  const Result first = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("t*=1: verified"), std::string::npos) << first.out;
  EXPECT_NE(first.out.find("wrote "), std::string::npos);
  ASSERT_EQ(reports().size(), 1u);
  const auto doc = read_json(reports().front());
  EXPECT_EQ(doc.at("verdict").at("outcome"), "verified");
  EXPECT_EQ(doc.at("lambda"), "2/5");
  EXPECT_TRUE(fs::exists(doc.at("certificate_file").get<std::string>()));

  const auto before = fs::last_write_time(reports().front());
  const Result second = run(args);
  EXPECT_EQ(second.code, 0);
  EXPECT_NE(second.out.find("report exists: "), std::string::npos);
  EXPECT_EQ(reports().size(), 1u);
  EXPECT_EQ(fs::last_write_time(reports().front()), before);
}

TEST_F(CliTest, UnknownVerdictExitsZero) {
  const Result r = run({"verify", "--scenario", kToy, "--lambda", "0.9", "--t", "1", "--out", dir_.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("t*=1: unknown"), std::string::npos) << r.out;
}

TEST_F(CliTest, OracleWitness) {
  const Result bad = run({"oracle", "--scenario", kToy, "--lambda", "0.9", "--t", "1", "--out", dir_.string()});
  ASSERT_EQ(bad.code, 0) << bad.err;
  EXPECT_NE(bad.out.find("holds = false"), std::string::npos) << bad.out;
  const auto brace = bad.out.find('{');
  ASSERT_NE(brace, std::string::npos);
  const auto end = bad.out.find("\nwrote ", brace);
  const auto witness = nlohmann::json::parse(bad.out.substr(brace, end - brace));
  EXPECT_EQ(witness.at("t"), 1);
  ASSERT_EQ(witness.at("path").size(), 1u);
  EXPECT_EQ(witness.at("path")[0].at("example"), 1);
  EXPECT_EQ(witness.at("path")[0].at("observation"), "+1");

  const Result good = run({"oracle", "--scenario", kToy, "--lambda", "0.4", "--t", "1", "--out", dir_.string()});
  EXPECT_EQ(good.code, 0);
  EXPECT_NE(good.out.find("holds = true"), std::string::npos) << good.out;
}

TEST_F(CliTest, VerifiedNeverContradictedByOracle) {
  for (const std::string t : {"1", "2", "3"})
    for (const std::string lambda : {"0.2", "0.4", "0.5", "0.75", "0.9"}) {
      const Result v = run({"verify", "--scenario", kToy, "--lambda", lambda, "--t", t, "--out", dir_.string()});
      ASSERT_EQ(v.code, 0) << v.err;
      if (v.out.find(": verified") == std::string::npos) continue;
      const Result o = run({"oracle", "--scenario", kToy, "--lambda", lambda, "--t", t, "--out", dir_.string()});
      EXPECT_NE(o.out.find("holds = true"), std::string::npos) << "t=" << t << " lambda=" << lambda;
    }
}

TEST_F(CliTest, MinTrialsResumesFromArchive) {
  const std::vector<std::string> args{"min-trials", "--scenario", kToy,     "--lambda", "0.9",      "--mode",
                                      "policy",     "--policy",   "always:0", "--t-max",  "3",        "--out",
                                      dir_.string()};
  const Result first = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("min t*: 1"), std::string::npos) << first.out;
  const Result second = run(args);
  EXPECT_EQ(second.code, 0);
  EXPECT_NE(second.out.find("(resumed)"), std::string::npos);
  EXPECT_NE(second.out.find("min t*: 1"), std::string::npos);
}

TEST_F(CliTest, LatticeGenRoundTrip) {
  const fs::path scenario = dir_ / "lat.json";
  const Result r = run({"lattice-gen", "--rows", "2", "--cols", "2", "--h0", "1,1", "--target", "2,2", "--output",
                        scenario.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::regex_search(r.out, std::regex("digest [0-9a-f]+")));
  const auto doc = read_json(scenario);
  EXPECT_EQ(doc.at("hypotheses").size(), 4u);
  const Result o =
      run({"oracle", "--scenario", scenario.string(), "--lambda", "0.5", "--t", "1", "--out", dir_.string()});
  EXPECT_EQ(o.code, 0) << o.err;
}

TEST_F(CliTest, ExportAndSolveLp) {
  const Result e = run({"export-lp", "--scenario", kToy, "--lambda", "0.9", "--t", "2", "--out", dir_.string()});
  ASSERT_EQ(e.code, 0) << e.err;
  std::smatch m;
  ASSERT_TRUE(std::regex_search(e.out, m, std::regex("wrote (\\S+\\.lp) \\((\\d+) rows")));
  const std::string lp = m[1];
  const Result s = run({"solve-lp", lp, "--output", (dir_ / "sol.json").string()});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("feasible (audited)"), std::string::npos) << s.out;
}

TEST_F(CliTest, SimulateCsv) {
  const Result r = run({"simulate", "--scenario", kToy, "--policy", "myopic", "--runs", "200", "--horizon", "3",
                        "--csv", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("t=3 success="), std::string::npos);
  bool csv = false;
  for (const auto& e : fs::directory_iterator(dir_)) csv |= e.path().extension() == ".csv";
  EXPECT_TRUE(csv);
}

}  // namespace
