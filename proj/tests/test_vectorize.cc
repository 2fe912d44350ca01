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
#include <array>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "absa/common.h"
#include "absa/embedding.h"
#include "absa/rng.h"
#include "absa/tfidf.h"
#include "absa/util.h"
#include "support.h"

namespace absa::vectorize {
namespace {

using textprep::TokenList;

TEST(Tfidf, HandIdfAndTransform) {
  const std::vector<TokenList> corpus = {{"a", "b", "a"}, {"b", "c"}};
  const auto m = fit_tfidf(corpus);
  ASSERT_EQ(m.vocabulary(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_NEAR(m.idf()[0], std::log(1.5) + 1.0, 1e-12);
  EXPECT_NEAR(m.idf()[0], 1.4055, 1e-4);
  EXPECT_DOUBLE_EQ(m.idf()[1], 1.0);
  const auto v = transform_tfidf(m, {"a", "a", "b"});
  EXPECT_EQ(v.space, FeatureSpace::kTfidf);
  EXPECT_NEAR(v.values[0], 0.9422, 5e-5);
  EXPECT_NEAR(v.values[1], 0.3352, 5e-5);
  EXPECT_EQ(v.values[2], 0.0);
  // Pre-norm (2.8109, 1.0, 0).
  const double pre0 = 2 * m.idf()[0];
  EXPECT_NEAR(pre0, 2.8109, 5e-5);
  EXPECT_NEAR(v.values[0] / v.values[1], pre0 / 1.0, 1e-12);
}

TEST(Tfidf, EdgeCases) {
  const auto all = fit_tfidf({{"t", "x"}, {"t"}, {"t", "y"}});
  EXPECT_DOUBLE_EQ(all.idf()[*all.column("t")], 1.0);
  const auto oov = transform_tfidf(all, {"zzz", "qq"});
  for (double x : oov.values) EXPECT_EQ(x, 0.0);
  const auto one = fit_tfidf({{"solo"}});
  EXPECT_EQ(transform_tfidf(one, {"solo"}).values, std::vector<double>{1.0});
  EXPECT_THROW(fit_tfidf({{}, {}}), Error);
  EXPECT_THROW(fit_tfidf({}), Error);
}

TEST(Tfidf, TruncatesTo400WithLexicographicTies) {
  std::vector<TokenList> corpus(1);
  for (int i = 0; i < 500; ++i) corpus[0].push_back("t" + std::to_string(1000 + i));
  const auto m = fit_tfidf(corpus);
  ASSERT_EQ(m.dim(), 400u);
  // All counts tie, so the 400 lexicographically smallest survive.
  EXPECT_EQ(m.vocabulary().front(), "t1000");
  EXPECT_EQ(m.vocabulary().back(), "t1399");
  for (double idf : m.idf()) EXPECT_GE(idf, 1.0);
}

TEST(TfidfProperty, MatchesOracleAndUnitNorm) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto corpus = absa::testing::random_corpus(rng, 50, 30, 12);
    const std::size_t cap = 1 + rng.uniform_index(25);
    const auto m = fit_tfidf(corpus, cap);
    const auto oracle = absa::testing::tfidf_oracle(corpus, cap);
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      const auto v = transform_tfidf(m, corpus[d]);
      ASSERT_EQ(v.values.size(), oracle[d].size());
      for (std::size_t j = 0; j < v.values.size(); ++j) {
        ASSERT_NEAR(v.values[j], oracle[d][j], 1e-9);
      }
      const double n = l2_norm(v.values);
      ASSERT_TRUE(n == 0.0 || std::abs(n - 1.0) < 1e-9);
    }
  }
}

TEST(Tfidf, JsonRoundTrip) {
  const auto m = fit_tfidf({{"a", "b", "a"}, {"b", "c"}});
  const auto back = tfidf_from_json(to_json(m));
  EXPECT_EQ(back.vocabulary(), m.vocabulary());
  EXPECT_EQ(back.idf(), m.idf());
  EXPECT_EQ(back.doc_count(), 2u);
}

TEST(Ngrams, Cat) {
  const auto g = char_ngrams("cat", 3, 6);
  const std::multiset<std::string> got(g.begin(), g.end());
  const std::multiset<std::string> want = {"<ca", "cat", "at>", "<cat", "cat>", "<cat>"};
  EXPECT_EQ(got, want);
}

TEST(Ngrams, CountsFollowLength) {
  // "<word>" has L+2 characters; n-grams of size n number L+3-n.
  for (std::size_t len = 1; len < 9; ++len) {
    const std::string w(len, 'x');
    std::size_t expected = 0;
    for (std::size_t n = 3; n <= 6; ++n) {
      if (n <= len + 2) expected += len + 3 - n;
    }
    EXPECT_EQ(char_ngrams(w, 3, 6).size(), expected);
  }
}

EmbeddingParams small_params() {
  EmbeddingParams p;
  p.dim = 8;
  p.bucket_count = 64;
  p.min_count = 1;
  p.epochs = 2;
  return p;
}

TEST(Embeddings, EmptyEffectiveVocabulary) {
  EmbeddingParams p = small_params();
  p.min_count = 5;
  std::vector<TokenList> corpus(4, TokenList{"lonely"});
  try {
    train_embeddings(corpus, p, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "empty effective vocabulary");
  }
}

std::vector<TokenList> toy_corpus() {
  std::vector<TokenList> c;
  Rng rng(4);
  const std::vector<std::string> a = {"pizza", "crust", "cheese", "oven"};
  const std::vector<std::string> b = {"waiter", "staff", "rude", "slow"};
  for (int i = 0; i < 60; ++i) {
    const auto& v = i % 2 ? a : b;
    TokenList d;
    for (int k = 0; k < 8; ++k) d.push_back(v[rng.uniform_index(v.size())]);
    c.push_back(d);
  }
  return c;
}

TEST(Embeddings, DeterministicAndRoundTrips) {
  absa::testing::ScratchDir dir("emb");
  const auto corpus = toy_corpus();
  const auto m1 = train_embeddings(corpus, small_params(), 7);
  const auto m2 = train_embeddings(corpus, small_params(), 7);
  EXPECT_EQ(m1.digest(), m2.digest());
  m1.save(dir / "a.bin");
  m2.save(dir / "b.bin");
  EXPECT_EQ(read_file(dir / "a.bin"), read_file(dir / "b.bin"));
  const auto back = EmbeddingModel::load(dir / "a.bin");
  EXPECT_EQ(back.digest(), m1.digest());
  EXPECT_EQ(back.vocab(), m1.vocab());
  EXPECT_EQ(back.seed(), 7u);
  const auto m3 = train_embeddings(corpus, small_params(), 8);
  EXPECT_NE(m3.digest(), m1.digest());
  // Vocabulary sorted by count, then text.
  EXPECT_EQ(m1.vocab().size(), 8u);
}

TEST(Embeddings, FileLayout) {
  absa::testing::ScratchDir dir("emb");
  EmbeddingModel m(2, 3, 4, 3, 0x0102030405060708ull, {"ab"}, std::vector<float>(8, 0.5f));
  m.save(dir / "m.bin");
  const std::string bytes = read_file(dir / "m.bin");
  ASSERT_EQ(bytes.substr(0, 8), "ABSAEMB1");
  auto u32 = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[off + i]);
    return v;
  };
  EXPECT_EQ(u32(8), 2u);   // dim
  EXPECT_EQ(u32(12), 1u);  // vocab size
  EXPECT_EQ(u32(16), 3u);  // buckets
  EXPECT_EQ(u32(20), 3u);  // min_n
  EXPECT_EQ(u32(24), 4u);  // max_n
  EXPECT_EQ(static_cast<unsigned char>(bytes[28]), 0x08);  // seed, little-endian
  // header 36 + vocab (4 + 2) + rows 4*2*4
  EXPECT_EQ(bytes.size(), 36u + 6u + 32u);
}

TEST(Embeddings, BucketIsFnv1aModulo) {
  EmbeddingModel m(1, 3, 3, 1000, 0, {}, std::vector<float>(1000, 0.0f));
  const auto rows = m.subword_rows("ab");
  ASSERT_EQ(rows.size(), 2u);  // "<ab", "ab>"
  EXPECT_EQ(rows[0], fnv1a32("<ab") % 1000);
  EXPECT_EQ(rows[1], fnv1a32("ab>") % 1000);
}

// Two-dimensional model whose words have no n-grams (min_n beyond any word
// length), so word vectors are exactly the word rows.
EmbeddingModel hand_model(const std::vector<std::string>& words,
                          const std::vector<std::vector<float>>& rows) {
  std::vector<float> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  flat.push_back(0.0f);
  flat.push_back(0.0f);  // one unused bucket row
  return EmbeddingModel(2, 20, 20, 1, 0, words, flat);
}

TEST(EmbedReview, HandArithmetic) {
  const auto m = hand_model({"w1", "w2"}, {{3, 0}, {1, 2}});
  const auto one = embed_review(m, {"w1"});
  EXPECT_NEAR(one.values[0], 1.0, 1e-12);
  EXPECT_NEAR(one.values[1], 0.0, 1e-12);
  // mean (2, 1), norm sqrt(5)
  const auto two = embed_review(m, {"w1", "w2"});
  EXPECT_NEAR(two.values[0], 2.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(two.values[1], 1.0 / std::sqrt(5.0), 1e-12);
  const auto none = embed_review(m, {});
  EXPECT_EQ(none.values, (std::vector<double>{0.0, 0.0}));
}

TEST(EmbedReview, NormIsZeroOrOne) {
  const auto m = train_embeddings(toy_corpus(), small_params(), 3);
  Rng rng(2);
  const std::vector<std::string> words = {"pizza", "oven", "unknownword", "rude", "zz"};
  for (int i = 0; i < 100; ++i) {
    TokenList d;
    const auto n = rng.uniform_index(6);
    for (std::uint64_t k = 0; k < n; ++k) d.push_back(words[rng.uniform_index(words.size())]);
    const double norm = l2_norm(embed_review(m, d).values);
    EXPECT_TRUE(norm == 0.0 || std::abs(norm - 1.0) < 1e-9) << norm;
  }
}

TEST(Neighbors, DuplicateOrthogonalAndOrdering) {
  const auto dup = hand_model({"w", "copy", "other"}, {{1, 1}, {1, 1}, {1, -1}});
  const auto nn = nearest_neighbors(dup, "w", 1);
  ASSERT_EQ(nn.size(), 1u);
  EXPECT_EQ(nn[0].first, "copy");
  EXPECT_NEAR(nn[0].second, 1.0, 1e-12);

  const auto orth = hand_model({"w", "a", "b"}, {{1, 0}, {0, 1}, {0, -2}});
  for (const auto& [t, s] : nearest_neighbors(orth, "w", 5)) EXPECT_NEAR(s, 0.0, 1e-12);
  // Ties resolve by token.
  EXPECT_EQ(nearest_neighbors(orth, "w", 5)[0].first, "a");

  // Angles 0, 30, 80 and 120 degrees from the query.
  auto at = [](double deg) {
    const double r = deg * M_PI / 180.0;
    return std::vector<float>{static_cast<float>(std::cos(r)), static_cast<float>(std::sin(r))};
  };
  const auto angled = hand_model({"q", "far", "mid", "near"}, {at(0), at(120), at(80), at(30)});
  const auto ranked = nearest_neighbors(angled, "q", 3);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].first, "near");
  EXPECT_EQ(ranked[1].first, "mid");
  EXPECT_EQ(ranked[2].first, "far");
  EXPECT_NEAR(ranked[0].second, std::cos(30 * M_PI / 180.0), 1e-6);
  EXPECT_NEAR(ranked[2].second, std::cos(120 * M_PI / 180.0), 1e-6);
}

TEST(SkipGram, GradientMatchesFiniteDifferences) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 6, k = 4;
    std::vector<double> h(d);
    std::vector<std::vector<double>> u(k, std::vector<double>(d));
    for (auto& x : h) x = rng.normal();
    for (auto& row : u) {
      for (auto& x : row) x = rng.normal();
    }
    auto loss = [&]() {
      std::vector<double*> ptrs;
      for (auto& row : u) ptrs.push_back(row.data());
      std::vector<double> scratch(d, 0.0);
      return negative_sampling_step<double>(h, ptrs, 0.0, scratch);
    };
    std::vector<double*> ptrs;
    for (auto& row : u) ptrs.push_back(row.data());
    std::vector<double> descent(d, 0.0), gu(k * d, 0.0);
    negative_sampling_step<double>(h, ptrs, 0.0, descent, gu);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_LT(absa::testing::relative_error(-descent[i], absa::testing::numeric_derivative(loss, h[i]), 1e-6), 1e-4);
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        EXPECT_LT(absa::testing::relative_error(gu[j * d + i], absa::testing::numeric_derivative(loss, u[j][i]), 1e-6),
                  1e-4);
      }
    }
  }
}

TEST(SkipGram, UpdateLowersLoss) {
  Rng rng(9);
  std::vector<double> h(5), u0(5), u1(5);
  for (auto* v : {&h, &u0, &u1}) {
    for (auto& x : *v) x = rng.normal();
  }
  std::vector<double*> ptrs = {u0.data(), u1.data()};
  std::vector<double> descent(5, 0.0);
  const double before = negative_sampling_step<double>(h, ptrs, 0.05, descent);
  std::vector<double> scratch(5, 0.0);
  const double after = negative_sampling_step<double>(h, ptrs, 0.0, scratch);
  EXPECT_LT(after, before);
}

TEST(SkipGram, FrozenBatchLossFallsDuringFirstEpoch) {
  // Ten two-word topics, one topic per document. The frozen batch pairs the
  // two words of each topic and draws negatives from the next two topics.
  std::vector<TokenList> corpus;
  Rng rng(12);
  std::vector<std::array<std::string, 2>> topics;
  for (int t = 0; t < 10; ++t) topics.push_back({"topic" + std::to_string(t) + "x", "word" + std::to_string(t) + "y"});
  for (int i = 0; i < 3000; ++i) {
    const auto& v = topics[static_cast<std::size_t>(i % 10)];
    TokenList d;
    for (int k = 0; k < 10; ++k) d.push_back(v[rng.uniform_index(2)]);
    corpus.push_back(d);
  }
  EmbeddingParams p;
  p.dim = 16;
  p.bucket_count = 256;
  p.min_count = 1;
  p.epochs = 1;
  p.lr = 0.05;
  std::vector<double> trace;
  TrainingOptions opts;
  opts.report_every = 100;
  opts.on_progress = [&](const EmbeddingModel& m, const TrainingProgress&) {
    auto id = [&](const std::string& w) { return static_cast<std::uint32_t>(m.word_id(w)); };
    double total = 0;
    for (std::size_t t = 0; t < topics.size(); ++t) {
      const auto& next = topics[(t + 1) % topics.size()];
      const auto& after = topics[(t + 2) % topics.size()];
      const std::uint32_t negs[] = {id(next[0]), id(after[1])};
      total += pair_loss(m, id(topics[t][0]), id(topics[t][1]), negs);
    }
    trace.push_back(total);
  };
  train_embeddings(corpus, p, 5, opts);
  ASSERT_GE(trace.size(), 20u);
  // 5-point moving average, then Kendall's tau against time: a clearly
  // decreasing trend, ending well below where it started.
  std::vector<double> smooth;
  for (std::size_t i = 0; i + 5 <= trace.size(); ++i) {
    double s = 0;
    for (std::size_t k = 0; k < 5; ++k) s += trace[i + k];
    smooth.push_back(s / 5);
  }
  EXPECT_LT(smooth.back(), 0.8 * smooth.front());
  double concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    for (std::size_t j = i + 1; j < smooth.size(); ++j) {
      (smooth[j] > smooth[i] ? concordant : discordant) += 1;
    }
  }
  EXPECT_LE((concordant - discordant) / (concordant + discordant), -0.5);
}

TEST(Embeddings, ParamsJsonAndValidation) {
  EmbeddingParams p;
  const auto back = embedding_params_from_json(to_json(p));
  EXPECT_EQ(back.dim, 100u);
  EXPECT_EQ(back.bucket_count, 1u << 21);
  EXPECT_EQ(back.min_count, 5u);
  p.min_n = 7;
  EXPECT_THROW(p.validate(), Error);
}

}  // namespace
}  // namespace absa::vectorize
