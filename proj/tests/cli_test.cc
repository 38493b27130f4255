// Copyright 2026 The LDHD Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldhd/cli.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gtest/gtest.h"
#include "ldhd/dataset.h"
#include "ldhd/pe_kernels.h"
#include "ldhd/report.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ldhd::cli;  // NOLINT

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result Call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("LDHD_SEED");
    dir_ = fs::path(::testing::TempDir()) /
           ("ldhd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { unsetenv("LDHD_SEED"); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Call({}).code, kExitUsage);
  EXPECT_EQ(Call({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Call({"verify", "rfmp", "--threshold", "abc"}).code, kExitUsage);
  EXPECT_EQ(Call({"verify", "nfl", "--n", "0"}).code, kExitUsage);
  EXPECT_EQ(Call({"gen", "--task", "urf-add", "--max-scale", "3"}).code, kExitUsage);
  EXPECT_EQ(Call({"gen", "--task", "subtract", "--max-scale", "3", "--out", Path("x")}).code,
            kExitUsage);
  EXPECT_EQ(Call({"--help"}).code, kExitPass);
}

TEST_F(CliTest, VerifyNflPasses) {
  const Result r = Call({"verify", "nfl", "--n", "3", "--n0", "2", "--pairs", "100", "--seed", "1"});
  EXPECT_EQ(r.code, kExitPass) << r.out << r.err;
  EXPECT_NE(r.out.find("[PASS]"), std::string::npos);
  EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos);
  EXPECT_NE(r.out.find("result: PASS"), std::string::npos);
}

TEST_F(CliTest, ReportsAreByteIdenticalAcrossRuns) {
  ASSERT_EQ(Call({"verify", "plaa-loss", "--seed", "4", "--report", Path("a.json")}).code, 0);
  ASSERT_EQ(Call({"verify", "plaa-loss", "--seed", "4", "--report", Path("b.json")}).code, 0);
  EXPECT_EQ(Slurp(Path("a.json")), Slurp(Path("b.json")));
  const json j = json::parse(Slurp(Path("a.json")));
  EXPECT_FALSE(j.contains("wall_seconds"));
  EXPECT_EQ(j["seed"], 4);
  ASSERT_EQ(Call({"verify", "plaa-loss", "--seed", "4", "--timing", "--report", Path("c.json")})
                .code,
            0);
  EXPECT_TRUE(json::parse(Slurp(Path("c.json"))).contains("wall_seconds"));
}

TEST_F(CliTest, SeedFromEnvironment) {
  setenv("LDHD_SEED", "77", 1);
  ASSERT_EQ(Call({"verify", "oracle", "--report", Path("env.json")}).code, 0);
  EXPECT_EQ(json::parse(Slurp(Path("env.json")))["seed"], 77);
  ASSERT_EQ(Call({"verify", "oracle", "--seed", "5", "--report", Path("flag.json")}).code, 0);
  EXPECT_EQ(json::parse(Slurp(Path("flag.json")))["seed"], 5);
  setenv("LDHD_SEED", "-3", 1);
  EXPECT_EQ(Call({"verify", "oracle"}).code, kExitUsage);
}

TEST_F(CliTest, CsvOutput) {
  ASSERT_EQ(Call({"verify", "pe", "--csv", Path("pe.csv")}).code, 0);
  const std::string csv = Slurp(Path("pe.csv"));
  EXPECT_EQ(csv.rfind("# checks\nname,measured,threshold,passed\n", 0), 0u) << csv.substr(0, 80);
}

TEST_F(CliTest, GenWritesRecordsAndManifest) {
  const Result r = Call({"gen", "--task", "urf-add", "--max-scale", "4", "--count", "10000",
                         "--seed", "0", "--out", Path("train.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(Path("train.jsonl"));
  const auto records = ldhd::tasks::ReadJsonl(in);
  EXPECT_EQ(records.size(), 10000u);
  for (const auto& rec : records) ASSERT_TRUE(ldhd::tasks::VerifyRecord(rec));
  const auto m = ldhd::tasks::ManifestFromJson(Slurp(Path("train.manifest.json")));
  EXPECT_EQ(m.count, 10000);
  EXPECT_EQ(m.scales, std::vector<int>{4});
  EXPECT_EQ(m.seed, 0u);

  ASSERT_EQ(Call({"gen", "--task", "urf-add", "--max-scale", "4", "--count", "10000", "--seed",
                  "0", "--threads", "3", "--out", Path("again.jsonl")})
                .code,
            0);
  EXPECT_EQ(Slurp(Path("train.jsonl")), Slurp(Path("again.jsonl")));
}

TEST_F(CliTest, GenZeroCount) {
  ASSERT_EQ(Call({"gen", "--task", "copy", "--scales", "1,2", "--count", "0", "--out",
                  Path("empty.jsonl"), "--manifest", Path("m.json")})
                .code,
            0);
  EXPECT_TRUE(Slurp(Path("empty.jsonl")).empty());
  const auto m = ldhd::tasks::ManifestFromJson(Slurp(Path("m.json")));
  EXPECT_EQ(m.count, 0);
  EXPECT_EQ(m.scales, (std::vector<int>{1, 2}));
}

TEST_F(CliTest, PeBiasWeightsRoundTrip) {
  ASSERT_EQ(Call({"pe", "bias", "--kernel", "rpe-square", "--n", "6", "--seed", "3",
                  "--dump-weights", Path("w.json"), "--out", Path("a.csv")})
                .code,
            0);
  ASSERT_EQ(Call({"pe", "bias", "--kernel", "rpe-square", "--weights", Path("w.json"), "--out",
                  Path("b.csv")})
                .code,
            0);
  EXPECT_EQ(Slurp(Path("a.csv")), Slurp(Path("b.csv")));
  const auto in = ldhd::pe::PeInputsFromJson(Slurp(Path("w.json")));
  const auto want = ldhd::pe::ComputeBias(ldhd::pe::Kernel::kRpeSquare, in);
  EXPECT_EQ(ldhd::pe::BiasFromCsv(Slurp(Path("a.csv"))), want);
  const Result s = Call({"pe", "bias", "--kernel", "alibi", "--n", "2", "--slope", "0.5"});
  EXPECT_EQ(s.out, "row,col,value\n0,0,0\n0,1,-0.5\n1,1,0\n");
  EXPECT_EQ(Call({"pe", "bias", "--kernel", "rpe", "--weights", Path("nope.json")}).code,
            kExitUsage);
}

TEST_F(CliTest, ReportMerge) {
  ASSERT_EQ(Call({"verify", "plaa-identity", "--report", Path("a.json")}).code, 0);
  ASSERT_EQ(Call({"verify", "nfl", "--report", Path("b.json")}).code, 0);
  const Result ok = Call({"report", "merge", Path("a.json"), Path("b.json")});
  EXPECT_EQ(ok.code, 0);
  const json merged = json::parse(ok.out);
  EXPECT_EQ(merged["passed"], true);
  EXPECT_EQ(merged["suites"].size(), 2u);

  VerificationReport bad;
  bad.suite = "x";
  bad.AtMost("err", 2.0, 1.0);
  std::ofstream(Path("bad.json")) << bad.ToJson();
  const Result fail = Call({"report", "merge", Path("a.json"), Path("bad.json"), "--out",
                            Path("m.json")});
  EXPECT_EQ(fail.code, kExitFail);
  EXPECT_EQ(json::parse(Slurp(Path("m.json")))["passed"], false);
}

TEST(ReportTest, TextAndJson) {
  VerificationReport r;
  r.suite = "demo";
  r.seed = 9;
  r.AtMost("gap", 1e-12, 1e-9);
  r.AtLeast("fraction", 0.5, 0.9);
  r.Holds("flag", true);
  r.Equals("count", 3, 3);
  r.notes.push_back("hello");
  EXPECT_FALSE(r.passed());
  const std::string text = r.ToText();
  EXPECT_NE(text.find("[PASS] gap: 1e-12 <= 1e-09"), std::string::npos) << text;
  EXPECT_NE(text.find("[FAIL] fraction"), std::string::npos);
  EXPECT_NE(text.find("result: FAIL"), std::string::npos);
  const VerificationReport back = VerificationReport::FromJson(r.ToJson());
  EXPECT_EQ(back.ToJson(), r.ToJson());
  EXPECT_EQ(back.checks.size(), 4u);
}

TEST(ReportTest, NonFiniteValuesSurviveJson) {
  VerificationReport r;
  r.suite = "nan";
  r.AtMost("a", std::numeric_limits<double>::quiet_NaN(), 1.0);
  r.AtMost("b", std::numeric_limits<double>::infinity(), 1.0);
  EXPECT_FALSE(r.checks[0].passed);
  const VerificationReport back = VerificationReport::FromJson(r.ToJson());
  EXPECT_TRUE(std::isnan(back.checks[0].measured));
  EXPECT_TRUE(std::isinf(back.checks[1].measured));
}

TEST(ReportTest, FormatNumber) {
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  EXPECT_EQ(FormatNumber(1e-10), "1e-10");
  EXPECT_EQ(std::stod(FormatNumber(1.0 / 3.0)), 1.0 / 3.0);
}

int Shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(BinaryTest, ExitCodes) {
  const std::string bin = LDHD_CLI_PATH;
  EXPECT_EQ(Shell(bin + " verify nfl --n 3 --n0 2 --pairs 100 --seed 1 > /dev/null"), 0);
  EXPECT_EQ(Shell(bin + " verify rfmp --threshold abc > /dev/null 2>&1"), 2);
  EXPECT_EQ(Shell(bin + " verify plaa-loss --threshold 0 > /dev/null"), 1);
}

}  // namespace
