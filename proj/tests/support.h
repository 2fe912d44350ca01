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

#ifndef ABSA_TESTS_SUPPORT_H_
#define ABSA_TESTS_SUPPORT_H_

// Shared helpers for the unit and acceptance tests: scratch directories,
// seeded generators for property tests, and reference implementations that
// recompute results directly from their textbook formulas.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absa/rng.h"
#include "absa/textprep.h"

namespace absa::testing {

// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag);
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Random corpus over a small alphabet of words ("w0".."w{vocab-1}").
std::vector<textprep::TokenList> random_corpus(Rng& rng, std::size_t max_docs,
                                               std::size_t vocab, std::size_t max_len);

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

// TF-IDF computed per document straight from the definition: the
// `max_features` most frequent tokens (ties by text), sorted columns,
// idf = ln((1+N)/(1+df)) + 1, counts times idf, then unit length.
std::vector<std::vector<double>> tfidf_oracle(const std::vector<textprep::TokenList>& corpus,
                                              std::size_t max_features);

// Least squares through the explicit normal equations.
struct NormalEquations {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  double r_squared = 0.0;
};
NormalEquations normal_equations_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// |a - b| / max(|a|, |b|, floor)
double relative_error(double a, double b, double floor = 1e-8);

// Five-point central difference of f with respect to *slot, which is restored.
double numeric_derivative(const std::function<double()>& f, double& slot, double h = 1e-3);

// Files of a directory tree keyed by relative path.
std::map<std::string, std::string> read_tree(const std::filesystem::path& root);

}  // namespace absa::testing

#endif  // ABSA_TESTS_SUPPORT_H_
