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

#include "absa/classifier.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "absa/common.h"
#include "absa/rng.h"

namespace absa::classify {

std::vector<std::pair<int, std::size_t>> class_histogram(const std::vector<int>& y) {
  std::map<int, std::size_t> h;
  for (int v : y) ++h[v];
  return {h.begin(), h.end()};
}

Dataset random_oversample(const FeatureMatrix& x, const std::vector<int>& y, std::uint64_t seed) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw Error("oversample: row/label mismatch");
  const auto hist = class_histogram(y);
  if (hist.size() < 2) throw Error("oversample requires at least 2 classes");
  std::size_t majority = 0;
  for (const auto& [label, count] : hist) majority = std::max(majority, count);

  Rng rng(seed);
  std::vector<std::size_t> rows(y.size());
  std::iota(rows.begin(), rows.end(), 0);
  for (const auto& [label, count] : hist) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == label) members.push_back(i);
    }
    for (std::size_t extra = count; extra < majority; ++extra) {
      rows.push_back(members[rng.uniform_index(members.size())]);
    }
  }
  rng.shuffle(std::span<std::size_t>(rows));
  Dataset out{FeatureMatrix(static_cast<Eigen::Index>(rows.size()), x.cols()), {}};
  out.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(y[rows[i]]);
  }
  return out;
}

Eigen::VectorXd smote_interpolate(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double u) {
  return a + u * (b - a);
}

Dataset smote(const FeatureMatrix& x, const std::vector<int>& y, std::size_t k,
              std::uint64_t seed) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw Error("smote: row/label mismatch");
  if (k == 0) throw Error("smote: k must be at least 1");
  const auto hist = class_histogram(y);
  if (hist.size() < 2) throw Error("smote requires at least 2 classes");
  std::size_t majority = 0;
  for (const auto& [label, count] : hist) majority = std::max(majority, count);

  std::size_t needed = 0;
  for (const auto& [label, count] : hist) {
    if (count < majority && count < 2) {
      throw Error("smote: class " + std::to_string(label) + " has only 1 sample");
    }
    needed += majority - count;
  }
  Dataset out{x, y};
  if (needed == 0) return out;
  out.x.conservativeResize(x.rows() + static_cast<Eigen::Index>(needed), Eigen::NoChange);
  Eigen::Index next = x.rows();

  Rng rng(seed);
  for (const auto& [label, count] : hist) {
    if (count == majority) continue;
    std::vector<Eigen::Index> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == label) members.push_back(static_cast<Eigen::Index>(i));
    }
    const std::size_t kk = std::min(k, members.size() - 1);
    // Same-class neighbors by squared distance, ties by position.
    std::vector<std::vector<Eigen::Index>> neighbors(members.size());
    for (std::size_t a = 0; a < members.size(); ++a) {
      std::vector<std::pair<double, std::size_t>> d;
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (a != b) d.emplace_back((x.row(members[a]) - x.row(members[b])).squaredNorm(), b);
      }
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
      for (std::size_t q = 0; q < kk; ++q) neighbors[a].push_back(members[d[q].second]);
    }
    for (std::size_t s = count; s < majority; ++s) {
      const auto a = static_cast<std::size_t>(rng.uniform_index(members.size()));
      const Eigen::Index b = neighbors[a][rng.uniform_index(kk)];
      const double u = rng.uniform01();
      out.x.row(next++) = smote_interpolate(x.row(members[a]).transpose(), x.row(b).transpose(), u).transpose();
      out.y.push_back(label);
    }
  }
  return out;
}

}  // namespace absa::classify
