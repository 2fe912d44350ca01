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

#ifndef ABSA_TFIDF_H_
#define ABSA_TFIDF_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "absa/features.h"
#include "absa/textprep.h"
#include "json.hpp"

namespace absa::vectorize {

inline constexpr std::size_t kDefaultTfidfFeatures = 400;

// Smoothed TF-IDF over a frequency-truncated vocabulary.
class TfidfModel {
 public:
  TfidfModel() = default;
  TfidfModel(std::vector<std::string> vocabulary, std::vector<double> idf,
             std::size_t doc_count);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  std::size_t doc_count() const { return doc_count_; }
  std::size_t dim() const { return vocabulary_.size(); }
  std::optional<std::size_t> column(const std::string& token) const;

 private:
  std::vector<std::string> vocabulary_;  // column order
  std::vector<double> idf_;
  std::size_t doc_count_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps the `max_features` tokens with the highest total count (ties broken
// lexicographically), columns in lexicographic order, and
// idf(t) = ln((1 + N) / (1 + df_t)) + 1.
TfidfModel fit_tfidf(const std::vector<textprep::TokenList>& corpus,
                     std::size_t max_features = kDefaultTfidfFeatures);

// Raw counts times idf, then L2-normalized. Out-of-vocabulary tokens are
// ignored; a document with none in vocabulary maps to the zero vector.
FeatureVector transform_tfidf(const TfidfModel& model, const textprep::TokenList& doc);

nlohmann::json to_json(const TfidfModel& model);
TfidfModel tfidf_from_json(const nlohmann::json& j);
void save_tfidf(const std::filesystem::path& path, const TfidfModel& model);
TfidfModel load_tfidf(const std::filesystem::path& path);

}  // namespace absa::vectorize

#endif  // ABSA_TFIDF_H_
