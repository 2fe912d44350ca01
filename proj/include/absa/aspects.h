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

#ifndef ABSA_ASPECTS_H_
#define ABSA_ASPECTS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absa/common.h"
#include "absa/ingest.h"
#include "json.hpp"

namespace absa::aspects {

// Instruction appended after the numbered reviews.
inline constexpr std::string_view kDiscoveryPrompt =
    "From the customer reviews above, identify key aspects of the dining experience for "
    "labeling purposes. For each identified aspect, assign a rating to each review on a "
    "5-point scale.";

// "Review 1: ...\n" per review (newlines inside a text become spaces), a
// blank line, then the instruction. The output ends with the instruction.
std::string emit_prompt(const std::vector<ingest::CorpusRecord>& reviews);

struct AspectResponse {
  std::string business_id;
  std::string model_tag;
  std::vector<std::string> aspects;                      // raw names
  std::map<std::string, std::vector<int>> ratings;       // raw name -> 1..5 per review
};

// A JSON array of response objects, or one object per line.
std::vector<AspectResponse> parse_responses(std::string_view text, const std::string& source);
std::vector<AspectResponse> load_responses(const std::filesystem::path& path);
nlohmann::json to_json(const AspectResponse& r);

inline constexpr std::string_view kOtherAspect = "other";

struct CanonicalAspect {
  std::optional<Aspect> aspect;  // nullopt means "other"
  std::string raw;

  std::string name() const;  // aspect key or "other"
};

class AspectCanonicalizer {
 public:
  // "raw name<TAB>aspect key" lines, '#' comments.
  explicit AspectCanonicalizer(std::string_view alias_table);
  static const AspectCanonicalizer& bundled();

  CanonicalAspect canonicalize(std::string_view raw) const;

 private:
  std::map<std::string, Aspect, std::less<>> aliases_;
};

CanonicalAspect canonicalize_aspect(std::string_view raw);

struct AspectAgreementRow {
  std::string aspect;  // aspect key
  std::size_t businesses = 0;
  std::size_t either = 0;
  std::size_t both = 0;
  double occurrence_pct = 0.0;
  std::optional<double> agreement_pct;  // undefined when no model lists it
};

// Occurrence: share of businesses where either model lists the aspect.
// Agreement: among those, the share where both do.
std::vector<AspectAgreementRow> aspect_agreement(const std::vector<AspectResponse>& model_a,
                                                 const std::vector<AspectResponse>& model_b);

// Marker for an undefined agreement cell (U+2014).
inline constexpr std::string_view kUndefinedCell = "\u2014";

// aspect,occurrence_pct,agreement_pct; undefined agreement is kUndefinedCell.
std::string agreement_csv(const std::vector<AspectAgreementRow>& rows);

}  // namespace absa::aspects

#endif  // ABSA_ASPECTS_H_
