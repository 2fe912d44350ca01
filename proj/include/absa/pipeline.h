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

#ifndef ABSA_PIPELINE_H_
#define ABSA_PIPELINE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absa/classifier.h"
#include "absa/common.h"
#include "absa/embedding.h"
#include "absa/features.h"
#include "absa/ingest.h"
#include "absa/textprep.h"
#include "json.hpp"

namespace absa::classify {

enum class Architecture { kOneStage, kTwoStage };

std::string_view architecture_name(Architecture a);  // "one_stage" | "two_stage"
// Accepts "one_stage"/"one-stage" and "two_stage"/"two-stage".
Architecture parse_architecture(std::string_view name);

struct SentimentVector {
  std::string review_id;
  std::array<int, kNumAspects> values{};  // each in {-1, 0, 1}
};

struct LabeledExample {
  FeatureVector features;
  ingest::AspectLabelSet labels;
};

struct Split {
  std::vector<std::size_t> train;       // ascending
  std::vector<std::size_t> validation;  // ascending
};

// One split shared by every aspect. Rows are ordered by their six raw labels
// (random order within equal label tuples) and validation rows are taken at
// evenly spaced positions, so each aspect's label mix is preserved in both
// parts. Validation size is round(fraction * n).
Split stratified_split(const std::vector<ingest::AspectLabelSet>& labels,
                       double validation_fraction, std::uint64_t seed);

struct AspectModels {
  ClassifierModel sentiment;                // classes {-1, 0, 1} (or a subset)
  std::optional<ClassifierModel> relevance; // two-stage only; classes {0, 1}
};

struct PipelineOptions {
  ClassifierKind kind = ClassifierKind::kLogreg;
  Hyperparams hyperparams;
  double validation_fraction = 0.2;
  std::size_t workers = 1;  // aspects trained in parallel when > 1
};

struct AspectPipeline {
  Architecture architecture = Architecture::kOneStage;
  std::vector<AspectModels> aspects;  // kNumAspects entries, canonical order
  FeatureSpace space = FeatureSpace::kEmbedding;
  std::size_t num_features = 0;
  std::string embedding_digest;
  Split split;
  std::uint64_t seed = 0;

  const AspectModels& at(Aspect a) const { return aspects.at(index_of(a)); }
  void validate() const;
};

AspectPipeline train_one_stage(const std::vector<LabeledExample>& labeled, std::uint64_t seed,
                               const PipelineOptions& options = {});
AspectPipeline train_two_stage(const std::vector<LabeledExample>& labeled, std::uint64_t seed,
                               const PipelineOptions& options = {});
AspectPipeline train_pipeline(Architecture arch, const std::vector<LabeledExample>& labeled,
                              std::uint64_t seed, const PipelineOptions& options = {});

SentimentVector predict_sentiment_vector(const AspectPipeline& pipeline,
                                         const FeatureVector& review);
// Rows of predicted sentiments, one per feature row.
std::vector<std::array<int, kNumAspects>> predict_sentiments(const AspectPipeline& pipeline,
                                                             const FeatureMatrix& x);
// Output of the sentiment model alone (stage 2 for two-stage pipelines).
std::vector<int> predict_sentiment_stage(const AspectPipeline& pipeline, Aspect aspect,
                                         const FeatureMatrix& x);
// Stage-1 relevance (two-stage only).
std::vector<int> predict_relevance(const AspectPipeline& pipeline, Aspect aspect,
                                   const FeatureMatrix& x);

// Bundle directory: manifest.json plus <aspect>.sentiment.json and, for
// two-stage pipelines, <aspect>.relevance.json. `extra` is merged into the
// manifest.
void save_pipeline(const std::filesystem::path& dir, const AspectPipeline& pipeline,
                   const nlohmann::json& extra = nlohmann::json::object());
AspectPipeline load_pipeline(const std::filesystem::path& dir);

std::string prediction_csv_header();
std::string prediction_csv_row(const SentimentVector& v);

using Featurizer = std::function<FeatureVector(const std::string& text)>;
Featurizer embedding_featurizer(const vectorize::EmbeddingModel& model,
                                const textprep::Preprocessor& preprocessor);

// Replays a corpus, one record per call.
using RecordSource =
    std::function<void(const std::function<void(ingest::CorpusRecord&&)>&)>;

struct PredictStats {
  std::size_t rows = 0;
  double seconds = 0.0;
};

// Streams records in chunks, featurizes and predicts each chunk across
// `workers` threads, and writes the prediction CSV in input order.
PredictStats predict_corpus(const AspectPipeline& pipeline, const RecordSource& records,
                            const Featurizer& featurize, const std::filesystem::path& out,
                            std::size_t workers, std::size_t chunk_size = 2048);

}  // namespace absa::classify

#endif  // ABSA_PIPELINE_H_
