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

#ifndef ABSA_LDA_H_
#define ABSA_LDA_H_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absa/ingest.h"
#include "absa/rng.h"
#include "absa/textprep.h"
#include "json.hpp"

namespace absa::lda {

enum class SentimentGroup { kNegative = 0, kNeutral = 1, kPositive = 2 };

std::string_view group_name(SentimentGroup g);  // "negative" | "neutral" | "positive"
// Stars above 3 are positive, below 3 negative, 3 neutral.
SentimentGroup group_of(int stars);

// Corpus indices per group, keyed by business id.
using GroupedReviews = std::array<std::map<std::string, std::vector<std::size_t>>, 3>;
GroupedReviews group_by_sentiment(const std::vector<ingest::CorpusRecord>& corpus);

struct LdaParams {
  std::size_t topics = 5;
  double alpha = 0.1;
  double beta = 0.01;
  std::size_t iterations = 1000;
};

nlohmann::json to_json(const LdaParams& p);

class LdaModel {
 public:
  const LdaParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }  // sorted
  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t num_docs() const { return docs_.size(); }

  const std::vector<std::vector<std::uint32_t>>& docs() const { return docs_; }
  const std::vector<std::vector<std::uint32_t>>& assignments() const { return z_; }
  std::uint32_t doc_topic(std::size_t d, std::size_t k) const { return doc_topic_[d * K() + k]; }
  std::uint32_t topic_word(std::size_t k, std::size_t w) const { return topic_word_[k * V() + w]; }
  std::uint32_t topic_total(std::size_t k) const { return topic_total_[k]; }

  // (n_kw + beta) / (n_k + V beta)
  double word_probability(std::size_t k, std::size_t w) const;
  std::vector<double> topic_distribution(std::size_t k) const;
  // Joint log p(words, assignments) with topic/word and doc/topic
  // distributions integrated out.
  double log_likelihood() const;
  // Throws if any count table disagrees with the assignments.
  void check_counts() const;

  // Builds a model directly from count tables (no documents).
  static LdaModel from_counts(LdaParams params, std::vector<std::string> vocab,
                              const std::vector<std::vector<std::uint32_t>>& topic_word);

 private:
  friend LdaModel fit_lda(const std::vector<textprep::TokenList>& docs, const LdaParams& params,
                          std::uint64_t seed,
                          const std::function<void(const LdaModel&, std::size_t)>& on_sweep);
  std::size_t K() const { return params_.topics; }
  std::size_t V() const { return vocab_.size(); }
  void sweep(Rng& rng, std::vector<double>& scratch);

  LdaParams params_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> vocab_;
  std::vector<std::vector<std::uint32_t>> docs_;
  std::vector<std::vector<std::uint32_t>> z_;
  std::vector<std::uint32_t> doc_topic_;   // D x K
  std::vector<std::uint32_t> topic_word_;  // K x V
  std::vector<std::uint32_t> topic_total_; // K
};

// Collapsed Gibbs sampling. `on_sweep` (optional) runs after each sweep with
// the 1-based sweep number.
LdaModel fit_lda(const std::vector<textprep::TokenList>& docs, const LdaParams& params,
                 std::uint64_t seed,
                 const std::function<void(const LdaModel&, std::size_t)>& on_sweep = {});

using TopicWords = std::vector<std::pair<std::string, double>>;
// Highest-probability words per topic, ties lexicographic; k larger than the
// vocabulary returns the full ranking.
std::vector<TopicWords> top_words(const LdaModel& model, std::size_t k = 10);

nlohmann::json topics_json(SentimentGroup group, const std::string& business_id,
                           const std::vector<TopicWords>& topics);

}  // namespace absa::lda

#endif  // ABSA_LDA_H_
