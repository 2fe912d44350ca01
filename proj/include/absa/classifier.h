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

#ifndef ABSA_CLASSIFIER_H_
#define ABSA_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "absa/features.h"
#include "json.hpp"

namespace absa::classify {

// Rows are samples.
using FeatureMatrix = Eigen::MatrixXd;

enum class ClassifierKind { kMnb, kLogreg, kLinsvm };

std::string_view kind_name(ClassifierKind k);  // "mnb" | "logreg" | "linsvm"
ClassifierKind parse_kind(std::string_view name);

struct Hyperparams {
  double alpha = 1.0;        // mnb smoothing
  double lambda = 1e-4;      // logreg / linsvm L2 strength
  int max_iterations = 1000; // logreg
  double tolerance = 1e-6;   // logreg, gradient inf-norm
  int epochs = 100;          // linsvm
};

nlohmann::json to_json(const Hyperparams& h);
Hyperparams hyperparams_from_json(const nlohmann::json& j);

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::kLogreg;
  std::vector<int> classes;     // ascending; argmax ties go to the earlier class
  Eigen::MatrixXd weights;      // classes x features
  Eigen::VectorXd bias;         // one per class
  FeatureSpace space = FeatureSpace::kEmbedding;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  std::vector<double> loss_history;  // logreg: objective after each accepted step

  std::size_t num_features() const { return static_cast<std::size_t>(weights.cols()); }
};

ClassifierModel train_classifier(ClassifierKind kind, const FeatureMatrix& x,
                                 const std::vector<int>& y, FeatureSpace space,
                                 const Hyperparams& hp = {}, std::uint64_t seed = 0);

struct Prediction {
  std::vector<int> labels;
  Eigen::MatrixXd probabilities;  // samples x classes; empty for linsvm
};

Eigen::MatrixXd decision_scores(const ClassifierModel& model, const FeatureMatrix& x);
Prediction predict(const ClassifierModel& model, const FeatureMatrix& x);
std::vector<int> predict_labels(const ClassifierModel& model, const FeatureMatrix& x);
int predict_one(const ClassifierModel& model, const std::vector<double>& features);

// Softmax objective: mean negative log-likelihood + lambda/2 * ||W||^2, bias
// unpenalized. `targets` are class indices. Gradients are written when the
// pointers are non-null.
double logreg_objective(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                        const FeatureMatrix& x, const std::vector<int>& targets,
                        double lambda, Eigen::MatrixXd* grad_weights = nullptr,
                        Eigen::VectorXd* grad_bias = nullptr);

nlohmann::json to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const nlohmann::json& j);
void save_classifier(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel load_classifier(const std::filesystem::path& path);

// Stacks feature rows into a matrix; all rows must share width and space.
FeatureMatrix stack_features(const std::vector<FeatureVector>& rows);

// ---- class rebalancing ----

struct Dataset {
  FeatureMatrix x;
  std::vector<int> y;
};

// Duplicates randomly chosen minority rows until every class matches the
// majority count, then shuffles all rows.
Dataset random_oversample(const FeatureMatrix& x, const std::vector<int>& y, std::uint64_t seed);

// Appends interpolated minority rows until class counts are equal. Input rows
// keep their order; balanced input is returned unchanged.
Dataset smote(const FeatureMatrix& x, const std::vector<int>& y, std::size_t k,
              std::uint64_t seed);

// a + u * (b - a)
Eigen::VectorXd smote_interpolate(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double u);

std::vector<std::pair<int, std::size_t>> class_histogram(const std::vector<int>& y);

}  // namespace absa::classify

#endif  // ABSA_CLASSIFIER_H_
