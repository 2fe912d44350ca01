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

#ifndef ABSA_REGRESS_H_
#define ABSA_REGRESS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absa/common.h"
#include "absa/ingest.h"
#include "absa/pipeline.h"
#include "json.hpp"

namespace absa::regress {

struct RestaurantAggregate {
  std::string business_id;
  std::array<double, kNumAspects> means{};  // each in [-1, 1]
  double overall_rating = 0.0;
  std::string state;
  std::string cuisine;
  std::size_t n_reviews = 0;
};

struct AggregateDiagnostics {
  std::size_t prediction_rows = 0;
  std::size_t unknown_reviews = 0;
};

inline constexpr double kMaxUnknownFraction = 0.01;

// Mean of each aspect column per business, sorted by business_id. Rows whose
// review is not in the corpus are tallied; more than 1% aborts.
std::vector<RestaurantAggregate> aggregate_restaurants(
    const std::vector<classify::SentimentVector>& predictions,
    const std::vector<ingest::CorpusRecord>& corpus, AggregateDiagnostics* diag = nullptr);

// Streams a prediction CSV against a corpus JSONL file.
std::vector<RestaurantAggregate> aggregate_restaurants(const std::filesystem::path& predictions_csv,
                                                       const std::filesystem::path& corpus_jsonl,
                                                       AggregateDiagnostics* diag = nullptr);

std::vector<classify::SentimentVector> read_predictions(const std::filesystem::path& csv);
// Ground-truth labels as sentiment vectors (NA folded into 0).
std::vector<classify::SentimentVector> labels_as_sentiments(
    const std::vector<ingest::AspectLabelSet>& labels);

std::string aggregates_csv(const std::vector<RestaurantAggregate>& rows);
void write_aggregates(const std::filesystem::path& path, const std::vector<RestaurantAggregate>& rows);
std::vector<RestaurantAggregate> read_aggregates(const std::filesystem::path& path);

inline constexpr const char* kCuisineReference = "American";
inline constexpr const char* kStateReference = "AB";

struct DesignMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> terms;
  std::optional<std::string> cuisine_reference;  // set for specs 2 and 4
  std::optional<std::string> state_reference;    // set for specs 3 and 4
};

// spec 1: intercept + six aspect means; 2: + cuisine dummies; 3: + state
// dummies; 4: both. Levels are sorted; the reference level (American / AB,
// or the first level when that one is absent) has no column.
DesignMatrix encode_design_matrix(const std::vector<RestaurantAggregate>& rows, int spec);

struct Coefficient {
  std::string term;
  double estimate = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double p = 1.0;
  std::string stars;
};

struct OlsFit {
  std::vector<Coefficient> coefficients;
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  Eigen::VectorXd residuals;
  double r_squared = 0.0;
  double sigma2 = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
};

std::string significance_stars(double p);  // "***", "**", "*", ".", ""

// Least squares via column-pivoted QR. Optional per-row weights give
// weighted least squares.
OlsFit fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
               const std::vector<std::string>& terms,
               const std::optional<Eigen::VectorXd>& weights = std::nullopt);

struct RegressionReport {
  int spec = 1;
  OlsFit fit;
  std::optional<std::string> cuisine_reference;
  std::optional<std::string> state_reference;

  const Coefficient& term(const std::string& name) const;
};

RegressionReport run_model(const std::vector<RestaurantAggregate>& rows, int spec);
// Specs 1-4, fitted concurrently.
std::vector<RegressionReport> run_model_suite(const std::vector<RestaurantAggregate>& rows);

nlohmann::json to_json(const RegressionReport& r);
RegressionReport regression_report_from_json(const nlohmann::json& j);
std::string coefficients_csv(const RegressionReport& r);
// Aspects, then cuisine effects, then state effects; one column per report.
std::string regression_markdown(const std::string& title,
                                const std::vector<RegressionReport>& reports);
// model,group,term,estimate,ci_lo,ci_hi,stars
std::string effect_plot_csv(const std::vector<RegressionReport>& reports);

// Term names used for the aspect columns ("Food Quality").
std::string aspect_term(Aspect a);

}  // namespace absa::regress

#endif  // ABSA_REGRESS_H_
