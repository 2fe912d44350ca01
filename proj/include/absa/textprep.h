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

#ifndef ABSA_TEXTPREP_H_
#define ABSA_TEXTPREP_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace absa::textprep {

// Normalized tokens over [a-z0-9'], apostrophes only inside a token.
using TokenList = std::vector<std::string>;

// Deterministic text normalizer. The pipeline is, in order: Unicode NFC,
// simple case folding, every character outside [a-z0-9'] becomes a space,
// whitespace split, stopword removal, lexicon + suffix-rule lemmatization.
// Immutable after construction and safe to share between threads.
class Preprocessor {
 public:
  // Both arguments are newline-delimited file contents ('#' comments).
  // Lemma lines are "form lemma" pairs or a single known base form.
  Preprocessor(std::string_view stopwords, std::string_view lemmas);

  static const Preprocessor& bundled();
  // Bundled data unless a path is given for either file.
  static Preprocessor load(const std::optional<std::filesystem::path>& stopwords,
                           const std::optional<std::filesystem::path>& lemmas);

  TokenList preprocess(std::string_view text) const;

  bool is_stopword(std::string_view token) const;
  // Lemma of one already-normalized token, applied to a fixed point.
  std::string lemmatize(std::string_view token) const;

 private:
  std::string lemmatize_once(std::string_view token) const;
  bool known(std::string_view word) const;

  std::unordered_set<std::string> stopwords_;
  std::unordered_map<std::string, std::string> lemmas_;  // form -> lemma
};

// Uses the bundled stopword list and lemma lexicon.
TokenList preprocess(std::string_view text);

std::string join(const TokenList& tokens);

}  // namespace absa::textprep

#endif  // ABSA_TEXTPREP_H_
