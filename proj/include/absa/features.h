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

#ifndef ABSA_FEATURES_H_
#define ABSA_FEATURES_H_

#include <string_view>
#include <vector>

namespace absa {

enum class FeatureSpace { kTfidf, kEmbedding };

std::string_view feature_space_name(FeatureSpace s);  // "tfidf" | "embedding"
FeatureSpace parse_feature_space(std::string_view name);

// Dense feature row tagged with the space it was produced in.
struct FeatureVector {
  FeatureSpace space = FeatureSpace::kEmbedding;
  std::vector<double> values;
};

double l2_norm(const std::vector<double>& v);
// Scales to unit L2 norm; the zero vector stays zero.
void l2_normalize(std::vector<double>& v);

}  // namespace absa

#endif  // ABSA_FEATURES_H_
