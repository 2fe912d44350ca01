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

#ifndef ABSA_EMBEDDING_H_
#define ABSA_EMBEDDING_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absa/features.h"
#include "absa/textprep.h"
#include "json.hpp"

namespace absa::vectorize {

struct EmbeddingParams {
  std::uint32_t dim = 100;
  std::uint32_t min_n = 3;
  std::uint32_t max_n = 6;
  std::uint32_t window = 5;
  std::uint32_t epochs = 5;
  double lr = 0.05;
  std::uint32_t negatives = 5;
  std::uint32_t min_count = 5;
  std::uint32_t bucket_count = 1u << 21;

  void validate() const;
};

nlohmann::json to_json(const EmbeddingParams& p);
EmbeddingParams embedding_params_from_json(const nlohmann::json& j);

// Character n-grams of "<word>" for n in [min_n, max_n], in order of
// increasing n then position. Repeated n-grams are kept.
std::vector<std::string> char_ngrams(std::string_view word, std::uint32_t min_n,
                                     std::uint32_t max_n);

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  // `input_rows` is (vocab.size() + bucket_count) x dim, row-major.
  EmbeddingModel(std::uint32_t dim, std::uint32_t min_n, std::uint32_t max_n,
                 std::uint32_t bucket_count, std::uint64_t seed,
                 std::vector<std::string> vocab, std::vector<float> input_rows);

  std::uint32_t dim() const { return dim_; }
  std::uint32_t min_n() const { return min_n_; }
  std::uint32_t max_n() const { return max_n_; }
  std::uint32_t bucket_count() const { return bucket_count_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::size_t row_count() const { return vocab_.size() + bucket_count_; }

  // Index into vocab(), or -1.
  std::int64_t word_id(std::string_view word) const;
  // Rows that make up a word: its own row (if in vocabulary) followed by one
  // bucket row per character n-gram.
  std::vector<std::uint32_t> subword_rows(std::string_view word) const;
  std::span<const float> row(std::size_t r) const;
  std::span<float> mutable_row(std::size_t r);
  std::vector<double> word_vector(std::string_view word) const;

  // Output (context) matrix, vocab_size x dim. Present after training, empty
  // for a loaded model.
  const std::vector<float>& output_rows() const { return output_; }
  void set_output_rows(std::vector<float> rows);

  // Stable digest of shape, vocabulary and input rows.
  std::string digest() const;

  void save(const std::filesystem::path& path) const;
  static EmbeddingModel load(const std::filesystem::path& path);

 private:
  std::uint32_t dim_ = 0;
  std::uint32_t min_n_ = 3;
  std::uint32_t max_n_ = 6;
  std::uint32_t bucket_count_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<float> input_;
  std::vector<float> output_;
};

// One skip-gram negative-sampling step for a hidden vector against
// `outputs[0]` (the true context, label 1) and outputs[1..] (negatives,
// label 0). Returns the loss -log s(u0.h) - sum log s(-uj.h).
//
// Adds (label - s(uj.h)) * uj to `descent_hidden`, which is minus the
// gradient of the loss with respect to h. If `grad_outputs` is non-empty it
// receives dLoss/duj for each output, row-major. If lr > 0 each output row is
// then moved by lr * (label - s) * h, after its contribution to
// `descent_hidden` has been taken.
template <typename Real>
Real negative_sampling_step(std::span<const Real> hidden, std::span<Real* const> outputs,
                            Real lr, std::span<Real> descent_hidden,
                            std::span<Real> grad_outputs = {}) {
  const std::size_t d = hidden.size();
  Real loss = 0;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    Real* out = outputs[j];
    Real score = 0;
    for (std::size_t i = 0; i < d; ++i) score += out[i] * hidden[i];
    const Real label = j == 0 ? Real(1) : Real(0);
    const Real sig = Real(1) / (Real(1) + std::exp(-score));
    // log s(x) = -log1p(exp(-x)), computed on the stable side.
    const Real signed_score = j == 0 ? score : -score;
    loss += signed_score > 0 ? std::log1p(std::exp(-signed_score))
                             : -signed_score + std::log1p(std::exp(signed_score));
    const Real g = label - sig;
    for (std::size_t i = 0; i < d; ++i) descent_hidden[i] += g * out[i];
    if (!grad_outputs.empty()) {
      for (std::size_t i = 0; i < d; ++i) grad_outputs[j * d + i] = -g * hidden[i];
    }
    if (lr > 0) {
      for (std::size_t i = 0; i < d; ++i) out[i] += lr * g * hidden[i];
    }
  }
  return loss;
}

// A corpus that can be replayed: calls the visitor once per document.
using CorpusSource =
    std::function<void(const std::function<void(const textprep::TokenList&)>&)>;

struct TrainingProgress {
  std::size_t epoch = 0;
  std::uint64_t tokens_processed = 0;
  double mean_loss = 0.0;  // over updates since the previous report
};

struct TrainingOptions {
  // Called after every `report_every` documents (0 disables).
  std::size_t report_every = 0;
  std::function<void(const EmbeddingModel&, const TrainingProgress&)> on_progress;
};

EmbeddingModel train_embeddings(const CorpusSource& corpus, const EmbeddingParams& params,
                                std::uint64_t seed, const TrainingOptions& options = {});
EmbeddingModel train_embeddings(const std::vector<textprep::TokenList>& corpus,
                                const EmbeddingParams& params, std::uint64_t seed,
                                const TrainingOptions& options = {});

// Loss of one (target, context, negatives) triple under the model's current
// input and output rows. Requires output rows.
double pair_loss(const EmbeddingModel& model, std::uint32_t target, std::uint32_t context,
                 std::span<const std::uint32_t> negatives);

FeatureVector embed_review(const EmbeddingModel& model, const textprep::TokenList& doc);

std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingModel& model,
                                                              std::string_view token,
                                                              std::size_t k);

}  // namespace absa::vectorize

#endif  // ABSA_EMBEDDING_H_
