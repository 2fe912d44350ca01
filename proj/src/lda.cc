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

#include "absa/lda.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "absa/common.h"
#include "absa/rng.h"

namespace absa::lda {

std::string_view group_name(SentimentGroup g) {
  switch (g) {
    case SentimentGroup::kNegative: return "negative";
    case SentimentGroup::kNeutral: return "neutral";
    case SentimentGroup::kPositive: return "positive";
  }
  return "";
}

SentimentGroup group_of(int stars) {
  if (stars > 3) return SentimentGroup::kPositive;
  if (stars < 3) return SentimentGroup::kNegative;
  return SentimentGroup::kNeutral;
}

GroupedReviews group_by_sentiment(const std::vector<ingest::CorpusRecord>& corpus) {
  GroupedReviews g;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    g[static_cast<std::size_t>(group_of(corpus[i].stars))][corpus[i].business_id].push_back(i);
  }
  return g;
}

nlohmann::json to_json(const LdaParams& p) {
  return {{"topics", p.topics}, {"alpha", p.alpha}, {"beta", p.beta}, {"iterations", p.iterations}};
}

double LdaModel::word_probability(std::size_t k, std::size_t w) const {
  return (topic_word(k, w) + params_.beta) /
         (topic_total(k) + static_cast<double>(V()) * params_.beta);
}

std::vector<double> LdaModel::topic_distribution(std::size_t k) const {
  std::vector<double> p(V());
  for (std::size_t w = 0; w < V(); ++w) p[w] = word_probability(k, w);
  return p;
}

double LdaModel::log_likelihood() const {
  const double a = params_.alpha, b = params_.beta;
  const double kd = static_cast<double>(K()), vd = static_cast<double>(V());
  double ll = 0.0;
  for (std::size_t k = 0; k < K(); ++k) {
    ll += std::lgamma(vd * b) - vd * std::lgamma(b);
    for (std::size_t w = 0; w < V(); ++w) ll += std::lgamma(topic_word(k, w) + b);
    ll -= std::lgamma(topic_total(k) + vd * b);
  }
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    ll += std::lgamma(kd * a) - kd * std::lgamma(a);
    for (std::size_t k = 0; k < K(); ++k) ll += std::lgamma(doc_topic(d, k) + a);
    ll -= std::lgamma(static_cast<double>(docs_[d].size()) + kd * a);
  }
  return ll;
}

void LdaModel::check_counts() const {
  std::vector<std::uint32_t> tw(K() * V(), 0), tt(K(), 0);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    std::vector<std::uint32_t> dt(K(), 0);
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const auto k = z_[d][i];
      ++dt[k];
      ++tw[k * V() + docs_[d][i]];
      ++tt[k];
    }
    std::uint32_t sum = 0;
    for (std::size_t k = 0; k < K(); ++k) {
      if (dt[k] != doc_topic(d, k)) throw Error("lda: doc-topic count mismatch in doc " + std::to_string(d));
      sum += doc_topic(d, k);
    }
    if (sum != docs_[d].size()) throw Error("lda: doc-topic counts do not sum to doc length");
  }
  if (tw != topic_word_) throw Error("lda: topic-word counts disagree with assignments");
  if (tt != topic_total_) throw Error("lda: topic totals disagree with assignments");
}

LdaModel LdaModel::from_counts(LdaParams params, std::vector<std::string> vocab,
                               const std::vector<std::vector<std::uint32_t>>& topic_word) {
  if (topic_word.size() != params.topics) throw Error("lda: count table has wrong topic count");
  LdaModel m;
  m.params_ = params;
  m.vocab_ = std::move(vocab);
  m.topic_total_.assign(params.topics, 0);
  for (std::size_t k = 0; k < params.topics; ++k) {
    if (topic_word[k].size() != m.vocab_.size()) throw Error("lda: count row has wrong width");
    for (auto c : topic_word[k]) {
      m.topic_word_.push_back(c);
      m.topic_total_[k] += c;
    }
  }
  return m;
}

void LdaModel::sweep(Rng& rng, std::vector<double>& p) {
  const double vb = static_cast<double>(V()) * params_.beta;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    std::uint32_t* dt = &doc_topic_[d * K()];
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const std::uint32_t w = docs_[d][i];
      std::uint32_t k = z_[d][i];
      --dt[k];
      --topic_word_[k * V() + w];
      --topic_total_[k];
      double total = 0.0;
      for (std::size_t t = 0; t < K(); ++t) {
        total += (dt[t] + params_.alpha) * (topic_word_[t * V() + w] + params_.beta) /
                 (topic_total_[t] + vb);
        p[t] = total;
      }
      const double u = rng.uniform01() * total;
      k = 0;
      while (k + 1 < K() && p[k] <= u) ++k;
      z_[d][i] = k;
      ++dt[k];
      ++topic_word_[k * V() + w];
      ++topic_total_[k];
    }
  }
}

LdaModel fit_lda(const std::vector<textprep::TokenList>& docs, const LdaParams& params,
                 std::uint64_t seed,
                 const std::function<void(const LdaModel&, std::size_t)>& on_sweep) {
  if (params.topics < 1) throw Error("lda: topic count must be positive");
  if (!(params.alpha > 0.0) || !(params.beta > 0.0)) throw Error("lda: alpha and beta must be positive");
  std::set<std::string> words;
  for (const auto& d : docs) words.insert(d.begin(), d.end());
  if (words.empty()) throw Error("lda: empty vocabulary");

  LdaModel m;
  m.params_ = params;
  m.seed_ = seed;
  m.vocab_.assign(words.begin(), words.end());
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < m.vocab_.size(); ++i) index[m.vocab_[i]] = static_cast<std::uint32_t>(i);

  const std::size_t k = params.topics, v = m.vocab_.size();
  m.doc_topic_.assign(docs.size() * k, 0);
  m.topic_word_.assign(k * v, 0);
  m.topic_total_.assign(k, 0);
  Rng rng(seed);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::vector<std::uint32_t> ids, z;
    for (const auto& t : docs[d]) {
      const auto w = index.at(t);
      const auto topic = static_cast<std::uint32_t>(rng.uniform_index(k));
      ids.push_back(w);
      z.push_back(topic);
      ++m.doc_topic_[d * k + topic];
      ++m.topic_word_[topic * v + w];
      ++m.topic_total_[topic];
    }
    m.docs_.push_back(std::move(ids));
    m.z_.push_back(std::move(z));
  }
  std::vector<double> scratch(k);
  for (std::size_t it = 1; it <= params.iterations; ++it) {
    m.sweep(rng, scratch);
    if (on_sweep) on_sweep(m, it);
  }
  return m;
}

std::vector<TopicWords> top_words(const LdaModel& model, std::size_t k) {
  std::vector<TopicWords> out;
  for (std::size_t t = 0; t < model.params().topics; ++t) {
    TopicWords ranked;
    for (std::size_t w = 0; w < model.vocab_size(); ++w) {
      ranked.emplace_back(model.vocabulary()[w], model.word_probability(t, w));
    }
    const std::size_t keep = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                      [](const auto& a, const auto& b) {
                        return a.second != b.second ? a.second > b.second : a.first < b.first;
                      });
    ranked.resize(keep);
    out.push_back(std::move(ranked));
  }
  return out;
}

nlohmann::json topics_json(SentimentGroup group, const std::string& business_id,
                           const std::vector<TopicWords>& topics) {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& topic : topics) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& [w, p] : topic) words.push_back({w, p});
    t.push_back(words);
  }
  return {{"group", group_name(group)}, {"business_id", business_id}, {"topics", t}};
}

}  // namespace absa::lda
