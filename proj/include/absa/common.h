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

#ifndef ABSA_COMMON_H_
#define ABSA_COMMON_H_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace absa {

// Raised for bad input data, violated preconditions and I/O failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The six dining aspects, in canonical column order.
enum class Aspect : std::uint8_t {
  kService = 0,
  kFoodQuality,
  kAmbiance,
  kWaitTime,
  kPrice,
  kMenuVariety,
};

inline constexpr std::size_t kNumAspects = 6;
inline constexpr std::array<Aspect, kNumAspects> kAllAspects = {
    Aspect::kService,  Aspect::kFoodQuality, Aspect::kAmbiance,
    Aspect::kWaitTime, Aspect::kPrice,       Aspect::kMenuVariety};

inline std::size_t index_of(Aspect a) { return static_cast<std::size_t>(a); }

// Machine name used in CSV headers and file names ("food_quality").
std::string_view aspect_key(Aspect a);
// Human-readable name used in reports ("Food Quality").
std::string_view aspect_title(Aspect a);
std::optional<Aspect> parse_aspect_key(std::string_view key);

// One annotated aspect: negative, neutral, positive, or not mentioned.
enum class AspectLabel : std::int8_t {
  kNegative = -1,
  kNeutral = 0,
  kPositive = 1,
  kNotApplicable = 2,
};

inline bool is_relevant(AspectLabel l) { return l != AspectLabel::kNotApplicable; }
// Sentiment value with NA folded into neutral.
inline int sentiment_or_neutral(AspectLabel l) {
  return is_relevant(l) ? static_cast<int>(l) : 0;
}
std::string_view label_text(AspectLabel l);  // "-1", "0", "1", "NA"
std::optional<AspectLabel> parse_label(std::string_view text);

// Class ids used by relevance classifiers.
inline constexpr int kIrrelevant = 0;
inline constexpr int kRelevant = 1;

}  // namespace absa

#endif  // ABSA_COMMON_H_
