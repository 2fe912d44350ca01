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

#include <gtest/gtest.h>

#include "absa/common.h"
#include "absa/config.h"
#include "absa/util.h"
#include "support.h"

namespace absa {
namespace {

TEST(Config, Defaults) {
  const auto c = RunConfig::defaults();
  EXPECT_EQ(c.get_u64("embedding.dim"), 100u);
  EXPECT_EQ(c.get_u64("embedding.bucket_count"), 1u << 21);
  EXPECT_EQ(c.get_double("classify.lambda"), 1e-4);
  EXPECT_EQ(c.get_u64("tfidf.max_features"), 400u);
  EXPECT_EQ(c.get_string("lda.mode"), "per_restaurant");
  EXPECT_EQ(c.get_double("synth.weights.food_quality"), 1.5);
  EXPECT_FALSE(c.get_bool("synth.lexical_overlap"));
}

TEST(Config, SetParsesByType) {
  auto c = RunConfig::defaults();
  c.set("embedding.dim=32");
  c.set("classify.lambda=1");  // integer accepted for a real key
  c.set("lda.mode = pooled");
  c.set("synth.lexical_overlap=true");
  EXPECT_EQ(c.get_u64("embedding.dim"), 32u);
  EXPECT_EQ(c.get_double("classify.lambda"), 1.0);
  EXPECT_EQ(c.get_string("lda.mode"), "pooled");
  EXPECT_TRUE(c.get_bool("synth.lexical_overlap"));
  EXPECT_THROW(c.set("embedding.dim=-3"), Error);
  EXPECT_THROW(c.set("embedding.dim=abc"), Error);
  EXPECT_THROW(c.set("embedding.dims=3"), Error);
  EXPECT_THROW(c.set("novalue"), Error);
  EXPECT_THROW(c.set("synth.lexical_overlap=1"), Error);
}

TEST(Config, MergeNestedAndFile) {
  auto c = RunConfig::defaults();
  c.merge({{"embedding", {{"epochs", 2}}}, {"seed", 9}}, "inline");
  EXPECT_EQ(c.get_u64("embedding.epochs"), 2u);
  EXPECT_EQ(c.get_u64("seed"), 9u);
  try {
    c.merge({{"embedding", {{"color", 2}}}}, "inline");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("embedding.color"), std::string::npos);
  }
  absa::testing::ScratchDir dir("cfg");
  write_file(dir / "c.json", R"({"lda": {"topics": 3}})");
  c.merge_file(dir / "c.json");
  EXPECT_EQ(c.get_u64("lda.topics"), 3u);
  write_file(dir / "bad.json", "{");
  EXPECT_THROW(c.merge_file(dir / "bad.json"), Error);
}

TEST(Config, EffectiveAndDigest) {
  auto a = RunConfig::defaults();
  auto b = RunConfig::defaults();
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_EQ(a.effective()["embedding"]["dim"], 100);
  b.set("seed=2");
  EXPECT_NE(a.digest(), b.digest());
  // Effective config merges back into itself unchanged.
  auto c = RunConfig::defaults();
  c.merge(b.effective(), "round trip");
  EXPECT_EQ(c.digest(), b.digest());
}

}  // namespace
}  // namespace absa
