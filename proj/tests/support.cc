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

#include "support.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace absa::testing {

namespace fs = std::filesystem;

ScratchDir::ScratchDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("absa-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<textprep::TokenList> random_corpus(Rng& rng, std::size_t max_docs,
                                               std::size_t vocab, std::size_t max_len) {
  const std::size_t docs = 1 + rng.uniform_index(max_docs);
  std::vector<textprep::TokenList> out(docs);
  for (auto& d : out) {
    const std::size_t len = rng.uniform_index(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) d.push_back("w" + std::to_string(rng.uniform_index(vocab)));
  }
  // At least one token somewhere.
  if (std::all_of(out.begin(), out.end(), [](const auto& d) { return d.empty(); })) {
    out[0].push_back("w0");
  }
  return out;
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

std::vector<std::vector<double>> tfidf_oracle(const std::vector<textprep::TokenList>& corpus,
                                              std::size_t max_features) {
  std::map<std::string, double> total;
  for (const auto& d : corpus) {
    for (const auto& t : d) total[t] += 1;
  }
  std::vector<std::pair<std::string, double>> ranked(total.begin(), total.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > max_features) ranked.resize(max_features);
  std::vector<std::string> cols;
  for (const auto& r : ranked) cols.push_back(r.first);
  std::sort(cols.begin(), cols.end());

  const double n = static_cast<double>(corpus.size());
  std::vector<std::vector<double>> rows;
  for (const auto& d : corpus) {
    std::vector<double> row;
    for (const auto& c : cols) {
      double df = 0;
      for (const auto& other : corpus) {
        if (std::find(other.begin(), other.end(), c) != other.end()) df += 1;
      }
      const double idf = std::log((1 + n) / (1 + df)) + 1;
      row.push_back(static_cast<double>(std::count(d.begin(), d.end(), c)) * idf);
    }
    double norm = 0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0) {
      for (double& v : row) v /= norm;
    }
    rows.push_back(row);
  }
  return rows;
}

NormalEquations normal_equations_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
  NormalEquations out;
  out.beta = xtx_inv * x.transpose() * y;
  const Eigen::VectorXd resid = y - x * out.beta;
  const double n = static_cast<double>(x.rows());
  const double k = static_cast<double>(x.cols());
  const double sigma2 = resid.squaredNorm() / (n - k);
  out.se = (sigma2 * xtx_inv.diagonal().array()).sqrt();
  const double mean = y.mean();
  out.r_squared = 1.0 - resid.squaredNorm() / (y.array() - mean).square().sum();
  return out;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double numeric_derivative(const std::function<double()>& f, double& slot, double h) {
  const double keep = slot;
  auto at = [&](double dx) {
    slot = keep + dx;
    return f();
  };
  const double d = (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h);
  slot = keep;
  return d;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

}  // namespace absa::testing
