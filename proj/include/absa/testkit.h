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

#ifndef ABSA_TESTKIT_H_
#define ABSA_TESTKIT_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "absa/common.h"
#include "absa/ingest.h"
#include "json.hpp"

namespace absa::testkit {

// Polarity slots of the template bank.
enum class Polarity { kNegative = 0, kNeutral = 1, kPositive = 2, kAbsent = 3 };

struct TemplateBank {
  // [aspect][polarity] -> sentences
  std::array<std::array<std::vector<std::string>, 4>, kNumAspects> sentences;

  // Each (aspect, polarity) cell uses its own vocabulary.
  static TemplateBank disjoint();
  // Adds cross-aspect generic sentiment words ("good", "bad", "okay").
  static TemplateBank lexical_overlap();
  void validate() const;  // throws on an empty cell
};

struct SynthSpec {
  std::size_t n_businesses = 200;
  std::size_t reviews_per_business = 30;
  // Canonical aspect order: service, food_quality, ambiance, wait_time,
  // price, menu_variety.
  std::array<double, kNumAspects> weights = {0.7, 1.5, 0.0, 0.0, 0.0, 0.0};
  double noise_sigma = 0.1;
  std::uint64_t seed = 1;
  // Chance that a review mentions each aspect.
  std::array<double, kNumAspects> presence = {0.4, 0.9, 0.37, 0.22, 0.3, 0.3};
  // Chance that a mentioned aspect is neutral.
  double neutral_share = 0.3;
  // Each business draws a lean m ~ U(-r, r) per aspect; a non-neutral
  // mention is positive with probability (1 + m) / 2.
  double lean_range = 0.9;
  TemplateBank templates = TemplateBank::disjoint();

  void validate() const;
};

nlohmann::json to_json(const SynthSpec& s);

struct SynthOutput {
  std::vector<ingest::Review> reviews;
  std::vector<ingest::Business> businesses;
  std::vector<ingest::AspectLabelSet> labels;
  nlohmann::json truth;

  std::string reviews_jsonl() const;
  std::string business_jsonl() const;
  std::string labels_csv() const;
};

// clamp(floor(3 + sum w*s + noise + 0.5), 1, 5)
int star_rating(const std::array<double, kNumAspects>& weights,
                const std::array<int, kNumAspects>& sentiments, double noise);
// Mean rounded to the nearest 0.5.
double business_rating(const std::vector<int>& stars);

SynthOutput generate(const SynthSpec& spec);

// reviews.json, business.json, labels.csv, truth.json under `dir`.
void write_synth(const std::filesystem::path& dir, const SynthOutput& out);

}  // namespace absa::testkit

#endif  // ABSA_TESTKIT_H_
