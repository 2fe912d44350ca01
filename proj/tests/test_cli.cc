// Copyright 2026 The absa Authors.
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

#include <algorithm>
#include <iostream>
#include <sstream>

#include <gtest/gtest.h>
#include "json.hpp"

#include "absa/common.h"
#include "absa/util.h"
#include "cli.h"
#include "support.h"

namespace absa::cli {
namespace {

namespace fs = std::filesystem;
using absa::testing::ScratchDir;

// Runs the CLI with stderr captured.
struct Result {
  int code = 0;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "absa");
  std::ostringstream captured;
  auto* old = std::cerr.rdbuf(captured.rdbuf());
  const int code = run(args);
  std::cerr.rdbuf(old);
  return {code, captured.str()};
}

std::vector<std::string> quiet(std::vector<std::string> args) {
  args.insert(args.begin(), {"--log-level", "quiet"});
  return args;
}

// Small end-to-end fixture shared by the tests below.
class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScratchDir("cli");
    const auto& d = *dir_;
    ASSERT_EQ(invoke(quiet({"--out", (d / "synth").string(), "synth", "--businesses", "50", "--per", "40"})).code, 0);
    ASSERT_EQ(invoke(quiet({"--out", (d / "corpus").string(), "ingest", "--reviews",
                            (d / "synth" / "reviews.json").string(), "--business",
                            (d / "synth" / "business.json").string()}))
                  .code,
              0);
    ASSERT_EQ(invoke(quiet({"--out", (d / "emb").string(), "--set", "embedding.dim=16", "--set",
                            "embedding.bucket_count=4096", "--set", "embedding.epochs=2",
                            "train-embeddings", "--corpus", corpus()}))
                  .code,
              0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static std::string corpus() { return (*dir_ / "corpus" / "corpus.jsonl").string(); }
  static std::string labels() { return (*dir_ / "synth" / "labels.csv").string(); }
  static std::string emb() { return (*dir_ / "emb" / "embeddings.bin").string(); }
  static fs::path at(const std::string& name) { return *dir_ / name; }

  static ScratchDir* dir_;
};

ScratchDir* CliPipeline::dir_ = nullptr;

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(invoke({"ingest", "--bogus", "x"}).code, kExitUsage);
  ScratchDir d("cli");
  EXPECT_EQ(invoke({"--out", d.path().string(), "ingest"}).code, kExitUsage);  // missing --reviews
  EXPECT_EQ(invoke({"--out", d.path().string(), "--workers", "0", "synth"}).code, kExitUsage);
  EXPECT_EQ(invoke({"--out", d.path().string(), "--set", "nope=1", "synth"}).code, kExitUsage);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST(Cli, MissingFileExitsOneWithPath) {
  ScratchDir d("cli");
  const std::string missing = (d / "nowhere.json").string();
  const auto r = invoke({"--out", (d / "o").string(), "ingest", "--reviews", missing, "--business", missing});
  EXPECT_EQ(r.code, kExitDataError);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
  const auto line = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
  EXPECT_EQ(line["event"], "error");
}

TEST_F(CliPipeline, IngestCountsAndRunRecord) {
  const std::string lines = read_file(corpus());
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2000);
  const auto run = nlohmann::json::parse(read_file(at("corpus") / "run.json"));
  EXPECT_EQ(run["command"], "ingest");
  EXPECT_FALSE(run["outputs"].empty());
  const auto stats = nlohmann::json::parse(read_file(at("corpus") / "stats.json"));
  EXPECT_EQ(stats["artifact"], "corpus_stats");
}

TEST_F(CliPipeline, TrainTwiceIsByteIdentical) {
  for (const char* out : {"m1", "m2"}) {
    ASSERT_EQ(invoke(quiet({"--out", at(out).string(), "train", "--arch", "one-stage", "--labels", labels(),
                            "--corpus", corpus(), "--emb", emb()}))
                  .code,
              0);
  }
  EXPECT_EQ(absa::testing::read_tree(at("m1")), absa::testing::read_tree(at("m2")));
  EXPECT_TRUE(fs::exists(at("m1") / "manifest.json"));
}

TEST_F(CliPipeline, RegressAndReport) {
  ASSERT_EQ(invoke(quiet({"--out", at("agg").string(), "aggregate", "--labels", labels(), "--corpus", corpus()})).code, 0);
  ASSERT_EQ(invoke(quiet({"--out", at("reg").string(), "regress", "--aggregates", (at("agg") / "aggregates.csv").string(),
                          "--spec", "4"}))
                .code,
            0);
  const std::string coef = read_file(at("reg") / "coefficients_model4.csv");
  EXPECT_NE(coef.find("cuisine:"), std::string::npos);
  EXPECT_NE(coef.find("state:"), std::string::npos);
  EXPECT_FALSE(fs::exists(at("reg") / "coefficients_model1.csv"));

  ASSERT_EQ(invoke(quiet({"--out", at("m2s").string(), "train", "--arch", "two-stage", "--labels", labels(),
                          "--corpus", corpus(), "--emb", emb()}))
                .code,
            0);
  ASSERT_EQ(invoke(quiet({"--out", (at("art") / "eval").string(), "evaluate", "--model", at("m2s").string(),
                          "--labels", labels(), "--corpus", corpus(), "--emb", emb()}))
                .code,
            0);
  fs::copy(at("reg"), at("art") / "reg");
  ASSERT_EQ(invoke(quiet({"--out", at("rep").string(), "report", "--artifacts", at("art").string()})).code, 0);
  const std::string overall = read_file(at("rep") / "two_stage_overall.csv");
  EXPECT_EQ(overall.substr(0, overall.find('\n')), "class,metric,Service,Ambiance,Quality,Menu,Wait Time,Price");
  EXPECT_TRUE(fs::exists(at("rep") / "two_stage_relevance.csv"));
  EXPECT_TRUE(fs::exists(at("rep") / "report.md"));
  const auto effects = read_csv(at("rep") / "effects.csv");
  const auto stars_col = std::find(effects.header.begin(), effects.header.end(), "stars") - effects.header.begin();
  ASSERT_LT(static_cast<std::size_t>(stars_col), effects.header.size());
  for (const auto& row : effects.rows) {
    const auto& s = row[static_cast<std::size_t>(stars_col)];
    EXPECT_TRUE(s.empty() || s == "." || s == "*" || s == "**" || s == "***") << s;
  }
}

TEST(Cli, ReportOnEmptyDirWritesNothing) {
  ScratchDir d("cli");
  fs::create_directories(d / "empty");
  const auto r = invoke({"--out", (d / "rep").string(), "report", "--artifacts", (d / "empty").string()});
  EXPECT_EQ(r.code, kExitDataError);
  EXPECT_FALSE(fs::exists(d / "rep"));
}

}  // namespace
}  // namespace absa::cli
