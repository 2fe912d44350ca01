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

#ifndef ABSA_INGEST_H_
#define ABSA_INGEST_H_

// Review-corpus ingestion: Yelp-layout JSON-lines parsing, the
// review/business join with the restaurant filter, cuisine normalization,
// corpus statistics, seeded sampling and annotation CSVs.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "absa/common.h"
#include "json.hpp"

namespace absa::ingest {

struct Review {
  std::string review_id;
  std::string user_id;
  std::string business_id;
  int stars = 0;  // 1..5
  std::string text;
  std::string date;
};

struct Business {
  std::string business_id;
  std::string name;
  std::string address;
  std::string city;
  std::string state;  // "??" when missing
  std::string postal_code;
  double overall_rating = 0.0;
  std::int64_t review_count = 0;
  std::string categories;
};

struct CorpusRecord {
  std::string review_id;
  std::string user_id;
  std::string business_id;
  int stars = 0;
  std::string text;
  std::string date;
  std::string state;
  double overall_rating = 0.0;
  std::string cuisine;
};

inline constexpr std::string_view kMissingState = "??";

// Tallies of everything parse_corpus dropped.
struct ParseDiagnostics {
  std::size_t business_lines = 0;
  std::size_t business_malformed = 0;
  std::size_t restaurants = 0;
  std::size_t businesses_missing_state = 0;
  std::size_t review_lines = 0;
  std::size_t review_malformed = 0;
  std::size_t unknown_business = 0;
  std::size_t non_restaurant = 0;
  std::size_t emitted = 0;
};

// Fraction of malformed lines (per file) above which parsing fails.
inline constexpr double kMaxMalformedFraction = 0.01;

// Line parsers. Return nullopt for malformed objects (bad JSON, missing or
// mistyped fields, stars outside 1..5).
std::optional<Review> parse_review_line(std::string_view line);
std::optional<Business> parse_business_line(std::string_view line);

// Case-insensitive "restaurant" substring test on a categories field.
bool is_restaurant(std::string_view categories);

// Streams the joined, restaurant-filtered corpus into `sink` in review-file
// order. Throws Error if either file is missing or more than 1% of a file's
// lines are malformed.
ParseDiagnostics parse_corpus(const std::filesystem::path& reviews_path,
                              const std::filesystem::path& business_path,
                              const std::function<void(CorpusRecord&&)>& sink);

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& reviews_path,
                                      const std::filesystem::path& business_path,
                                      ParseDiagnostics* diagnostics = nullptr);

// CorpusRecord JSON-lines, the hand-off format between pipeline stages.
nlohmann::json to_json(const CorpusRecord& r);
CorpusRecord corpus_record_from_json(const nlohmann::json& j);
void write_corpus_jsonl(const std::filesystem::path& path,
                        const std::vector<CorpusRecord>& records);
void for_each_corpus_record(const std::filesystem::path& path,
                            const std::function<void(CorpusRecord&&)>& sink);
std::vector<CorpusRecord> read_corpus_jsonl(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Cuisine normalization.

inline constexpr std::string_view kOtherCuisine = "Other";
// Canonical cuisines in the order they are reported, followed by "Other".
const std::vector<std::string>& canonical_cuisines();

class CuisineNormalizer {
 public:
  // Alias table text: "alias<TAB>Canonical" lines, '#' comments; a canonical
  // of "-" shadows shorter aliases without mapping to a cuisine.
  explicit CuisineNormalizer(std::string_view alias_table);
  static const CuisineNormalizer& bundled();

  // Canonical label of the earliest-listed matching alias, else "Other".
  std::string normalize(std::string_view categories) const;

 private:
  struct Alias {
    std::string text;  // lowercase
    std::string canonical;
  };
  std::vector<Alias> aliases_;
};

std::string normalize_cuisine(std::string_view categories);

// ---------------------------------------------------------------------------
// Corpus statistics.

struct CorpusStats {
  std::size_t reviews = 0;
  std::size_t users = 0;
  std::size_t businesses = 0;
  std::map<std::string, std::size_t> reviews_per_state;
  std::optional<double> mean_review_rating;    // nullopt on empty corpus
  std::optional<double> mean_business_rating;  // over distinct businesses
  // Share (percent) of distinct businesses per canonical cuisine.
  std::map<std::string, double> cuisine_share_pct;
  std::size_t missing_state_reviews = 0;
};

class CorpusStatsAccumulator {
 public:
  void add(const CorpusRecord& r);
  CorpusStats finish() const;

 private:
  std::size_t reviews_ = 0;
  double star_sum_ = 0.0;
  std::unordered_map<std::string, char> users_;
  struct BusinessInfo {
    double rating;
    std::string cuisine;
  };
  std::unordered_map<std::string, BusinessInfo> businesses_;
  std::map<std::string, std::size_t> per_state_;
};

CorpusStats corpus_stats(const std::vector<CorpusRecord>& corpus);
nlohmann::json to_json(const CorpusStats& s);

// ---------------------------------------------------------------------------
// Sampling.

struct UniformSample {
  std::size_t n = 0;
};
struct PerBusinessSample {
  std::size_t businesses = 0;
  std::size_t per_business = 0;
  std::optional<std::string> state;  // restrict to one state code
};
using SampleStrategy = std::variant<UniformSample, PerBusinessSample>;

// Deterministic for a fixed seed and independent of input order for the
// per-business strategy. Throws Error naming the shortfall when the
// population is too small.
std::vector<CorpusRecord> sample_reviews(const std::vector<CorpusRecord>& corpus,
                                         const SampleStrategy& strategy,
                                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Aspect annotations.

struct AspectLabelSet {
  std::string review_id;
  std::array<AspectLabel, kNumAspects> labels{};

  AspectLabel operator[](Aspect a) const { return labels[index_of(a)]; }
  AspectLabel& operator[](Aspect a) { return labels[index_of(a)]; }
};

// Header: review_id,service,food_quality,ambiance,wait_time,price,menu_variety
std::string label_csv_header();
std::vector<AspectLabelSet> load_labels(const std::filesystem::path& path);
std::vector<AspectLabelSet> parse_labels(std::string_view csv_text);
std::string format_labels(const std::vector<AspectLabelSet>& labels);
void write_labels(const std::filesystem::path& path,
                  const std::vector<AspectLabelSet>& labels);

}  // namespace absa::ingest

#endif  // ABSA_INGEST_H_
