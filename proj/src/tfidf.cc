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

#include "absa/tfidf.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "absa/common.h"
#include "absa/util.h"

namespace absa {

std::string_view feature_space_name(FeatureSpace s) {
  return s == FeatureSpace::kTfidf ? "tfidf" : "embedding";
}

FeatureSpace parse_feature_space(std::string_view name) {
  if (name == "tfidf") return FeatureSpace::kTfidf;
  if (name == "embedding") return FeatureSpace::kEmbedding;
  throw Error("unknown feature space '" + std::string(name) + "'");
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void l2_normalize(std::vector<double>& v) {
  const double n = l2_norm(v);
  if (n == 0.0) return;
  for (double& x : v) x /= n;
}

namespace vectorize {

TfidfModel::TfidfModel(std::vector<std::string> vocabulary, std::vector<double> idf,
                       std::size_t doc_count)
    : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)), doc_count_(doc_count) {
  if (vocabulary_.size() != idf_.size()) throw Error("tfidf: vocabulary/idf size mismatch");
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!index_.emplace(vocabulary_[i], i).second) {
      throw Error("tfidf: duplicate vocabulary entry '" + vocabulary_[i] + "'");
    }
  }
}

std::optional<std::size_t> TfidfModel::column(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TfidfModel fit_tfidf(const std::vector<textprep::TokenList>& corpus, std::size_t max_features) {
  if (corpus.empty()) throw Error("fit_tfidf: empty corpus");
  std::map<std::string, std::pair<std::size_t, std::size_t>> stats;  // token -> (count, df)
  for (const auto& doc : corpus) {
    std::vector<std::string> seen(doc.begin(), doc.end());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (const auto& t : doc) ++stats[t].first;
    for (const auto& t : seen) ++stats[t].second;
  }
  if (stats.empty()) throw Error("fit_tfidf: empty vocabulary");

  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> ranked(
      stats.begin(), stats.end());
  // std::map iteration is lexicographic, so a stable sort on count keeps
  // equal-count tokens in lexicographic order.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second.first > b.second.first;
  });
  if (ranked.size() > max_features) ranked.resize(max_features);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double n = static_cast<double>(corpus.size());
  std::vector<std::string> vocab;
  std::vector<double> idf;
  for (const auto& [token, counts] : ranked) {
    vocab.push_back(token);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(counts.second))) + 1.0);
  }
  return TfidfModel(std::move(vocab), std::move(idf), corpus.size());
}

FeatureVector transform_tfidf(const TfidfModel& model, const textprep::TokenList& doc) {
  FeatureVector fv{FeatureSpace::kTfidf, std::vector<double>(model.dim(), 0.0)};
  for (const auto& t : doc) {
    if (auto col = model.column(t)) fv.values[*col] += 1.0;
  }
  for (std::size_t i = 0; i < fv.values.size(); ++i) fv.values[i] *= model.idf()[i];
  l2_normalize(fv.values);
  return fv;
}

nlohmann::json to_json(const TfidfModel& model) {
  return nlohmann::json{{"vocabulary", model.vocabulary()},
                        {"idf", model.idf()},
                        {"doc_count", model.doc_count()}};
}

TfidfModel tfidf_from_json(const nlohmann::json& j) {
  try {
    return TfidfModel(j.at("vocabulary").get<std::vector<std::string>>(),
                      j.at("idf").get<std::vector<double>>(),
                      j.at("doc_count").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed tfidf model: ") + e.what());
  }
}

void save_tfidf(const std::filesystem::path& path, const TfidfModel& model) {
  write_file(path, to_json(model).dump(2) + "\n");
}

TfidfModel load_tfidf(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(path.string() + ": not valid JSON");
  return tfidf_from_json(j);
}

}  // namespace vectorize
}  // namespace absa
