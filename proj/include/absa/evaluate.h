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

#ifndef ABSA_EVALUATE_H_
#define ABSA_EVALUATE_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "absa/classifier.h"
#include "absa/common.h"
#include "absa/ingest.h"
#include "absa/pipeline.h"
#include "absa/textprep.h"
#include "json.hpp"

namespace absa::evaluate {

struct ClassMetrics {
  int label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassificationReport {
  std::vector<ClassMetrics> classes;  // ascending label order
  double accuracy = 0.0;
  std::size_t total = 0;

  const ClassMetrics& of(int label) const;
};

// Classes default to the union of labels in truth and pred. Passing an
// explicit list also reports classes absent from both (all zeros).
ClassificationReport classification_report(const std::vector<int>& truth,
                                           const std::vector<int>& pred,
                                           const std::optional<std::vector<int>>& classes = {});

nlohmann::json to_json(const ClassificationReport& r);
ClassificationReport classification_report_from_json(const nlohmann::json& j);

// ---- agreement ----

struct KappaParts {
  double observed = 0.0;  // P_o
  double expected = 0.0;  // P_e
  double kappa = 0.0;
};

// `counts` is items x categories; each row sums to the same rater count n >= 2.
KappaParts fleiss_kappa_parts(const std::vector<std::vector<std::size_t>>& counts);
double fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts);

// Count table over {-1, 0, 1, NA} for one aspect; `raters` is raters x items.
std::vector<std::vector<std::size_t>> label_count_table(
    const std::vector<std::vector<AspectLabel>>& raters);

struct PairCorrelation {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t complete = 0;      // items rated by both
  std::optional<double> r;       // undefined: < 3 items or zero variance
  std::optional<double> p;       // two-sided, t distribution with m-2 df
};

struct PearsonReport {
  std::vector<std::vector<std::optional<double>>> matrix;  // raters x raters
  std::vector<PairCorrelation> pairs;                       // a < b
  std::optional<double> mean_r;                             // over defined pairs
};

// `scores` is raters x items; nullopt marks NA.
PearsonReport pearson_agreement(const std::vector<std::vector<std::optional<double>>>& scores);
double pearson_p_value(double r, std::size_t m);

struct AspectAgreement {
  Aspect aspect = Aspect::kService;
  KappaParts kappa;
  PearsonReport pearson;
};

// Each element of `raters` is one annotator's label set over the same review
// ids (matched by id).
std::vector<AspectAgreement> agreement_report(
    const std::vector<std::vector<ingest::AspectLabelSet>>& raters);

// ---- paired comparison ----

struct McNemarResult {
  std::size_t n01 = 0;  // a wrong, b right
  std::size_t n10 = 0;  // a right, b wrong
  double chi_square = 0.0;
  double z = 0.0;
  double one_sided_p = 0.5;  // evidence that b beats a
};

McNemarResult mcnemar_from_counts(std::size_t n01, std::size_t n10);
McNemarResult mcnemar_one_sided(const std::vector<int>& truth, const std::vector<int>& pred_a,
                                const std::vector<int>& pred_b);

struct ArchitectureComparison {
  Aspect aspect = Aspect::kService;
  std::size_t relevant_rows = 0;
  std::optional<McNemarResult> result;  // undefined when no relevant rows
};

// Per aspect, on rows whose ground truth is relevant: one-stage predictions
// (a) against the two-stage sentiment stage (b).
std::vector<ArchitectureComparison> compare_architectures(
    const classify::AspectPipeline& one_stage, const classify::AspectPipeline& two_stage,
    const classify::FeatureMatrix& x, const std::vector<ingest::AspectLabelSet>& truth);

// ---- pipeline evaluation ----

struct AspectEvaluation {
  Aspect aspect = Aspect::kService;
  // One-stage: 3-class report with NA folded into neutral. Two-stage: the
  // end-to-end sentiment vector against the same folded truth.
  ClassificationReport overall;
  std::optional<ClassificationReport> relevance;  // two-stage stage 1
  std::optional<ClassificationReport> sentiment;  // two-stage stage 2, relevant rows
};

std::vector<AspectEvaluation> evaluate_pipeline(const classify::AspectPipeline& pipeline,
                                                const classify::FeatureMatrix& x,
                                                const std::vector<ingest::AspectLabelSet>& truth);

nlohmann::json to_json(const std::vector<AspectEvaluation>& e);

// ---- model selection ----

struct SelectionResult {
  std::string classifier;  // mnb | logreg | linsvm
  std::string features;    // tfidf | tfidf+smote | embedding
  Aspect aspect = Aspect::kService;
  std::optional<ClassificationReport> report;
  std::string error;  // set when the combination cannot be trained
};

// One-stage labels per aspect; TF-IDF fitted on the training rows only.
std::vector<SelectionResult> model_selection(const std::vector<textprep::TokenList>& docs,
                                             const std::vector<FeatureVector>& embedded,
                                             const std::vector<ingest::AspectLabelSet>& labels,
                                             const classify::Split& split, std::uint64_t seed);

// ---- report tables ----

// Column order of the metric tables: Service, Ambiance, Quality, Menu,
// Wait Time, Price.
const std::array<Aspect, kNumAspects>& report_column_order();
std::string report_column_title(Aspect a);

// Rows "<class>,<metric>" for precision/recall/f1/support, then accuracy.
std::string metrics_table_csv(const std::vector<ClassificationReport>& by_aspect,
                              const std::vector<int>& classes);
std::string metrics_table_markdown(const std::string& title,
                                   const std::vector<ClassificationReport>& by_aspect,
                                   const std::vector<int>& classes);
std::string class_title(int label, bool relevance);

}  // namespace absa::evaluate

#endif  // ABSA_EVALUATE_H_
