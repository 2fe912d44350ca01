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

#include "absa/textprep.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "absa/common.h"
#include "absa/data.h"
#include "absa/util.h"

namespace absa::textprep {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string_view strip_apostrophes(std::string_view s) {
  while (!s.empty() && s.front() == '\'') s.remove_prefix(1);
  while (!s.empty() && s.back() == '\'') s.remove_suffix(1);
  return s;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Steps 1-3: NFC, simple case fold, map everything outside [a-z0-9'] to a
// space. Curly single quotes count as apostrophes.
std::string fold_to_token_alphabet(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");

  std::string out;
  out.reserve(text.size());
  for (int32_t i = 0; i < normalized.length();) {
    UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    c = u_foldCase(c, U_FOLD_CASE_DEFAULT);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      out.push_back(static_cast<char>(c));
    } else if (c == '\'' || c == 0x2018 || c == 0x2019) {
      out.push_back('\'');
    } else {
      out.push_back(' ');
    }
  }
  return out;
}

}  // namespace

Preprocessor::Preprocessor(std::string_view stopwords, std::string_view lemmas) {
  for (std::string_view line : data_lines(stopwords)) {
    stopwords_.insert(to_lower_ascii(trim(line)));
  }
  for (std::string_view line : data_lines(lemmas)) {
    line = trim(line);
    const std::size_t sp = line.find_first_of(" \t");
    std::string form = to_lower_ascii(line.substr(0, sp));
    std::string lemma =
        sp == std::string_view::npos ? form : to_lower_ascii(trim(line.substr(sp + 1)));
    if (lemma.find_first_of(" \t") != std::string::npos) {
      throw Error("lemma lexicon: malformed line '" + std::string(line) + "'");
    }
    auto [it, inserted] = lemmas_.emplace(form, lemma);
    if (!inserted && it->second != lemma) {
      throw Error("lemma lexicon: conflicting entries for '" + form + "'");
    }
  }
  // Every lemma is its own lemma, so lookups land on a fixed point.
  std::vector<std::string> targets;
  for (const auto& [form, lemma] : lemmas_) targets.push_back(lemma);
  for (const auto& lemma : targets) {
    auto [it, inserted] = lemmas_.emplace(lemma, lemma);
    if (!inserted && it->second != lemma) {
      throw Error("lemma lexicon: lemma '" + lemma + "' is itself mapped to '" + it->second +
                  "'");
    }
  }
}

const Preprocessor& Preprocessor::bundled() {
  static const Preprocessor kBundled(bundled_stopwords(), bundled_lemmas());
  return kBundled;
}

Preprocessor Preprocessor::load(const std::optional<std::filesystem::path>& stopwords,
                                const std::optional<std::filesystem::path>& lemmas) {
  const std::string sw = stopwords ? read_file(*stopwords) : std::string(bundled_stopwords());
  const std::string lx = lemmas ? read_file(*lemmas) : std::string(bundled_lemmas());
  return Preprocessor(sw, lx);
}

bool Preprocessor::is_stopword(std::string_view token) const {
  return stopwords_.count(std::string(token)) > 0;
}

bool Preprocessor::known(std::string_view word) const {
  return lemmas_.count(std::string(word)) > 0;
}

std::string Preprocessor::lemmatize_once(std::string_view w) const {
  if (auto it = lemmas_.find(std::string(w)); it != lemmas_.end()) return it->second;
  const std::size_t n = w.size();
  if (ends_with(w, "'s")) return std::string(w.substr(0, n - 2));
  if (ends_with(w, "ies") && n > 4) return std::string(w.substr(0, n - 3)) + "y";
  if (ends_with(w, "sses")) return std::string(w.substr(0, n - 2));
  if (ends_with(w, "s") && n > 3 && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    return std::string(w.substr(0, n - 1));
  }
  // Inflected verb forms reduce only onto stems the lexicon knows.
  const auto try_stems = [&](std::string_view stem) -> std::optional<std::string> {
    if (stem.size() < 3) return std::nullopt;
    if (known(stem)) return std::string(stem);
    std::string with_e = std::string(stem) + "e";
    if (known(with_e)) return with_e;
    const std::size_t m = stem.size();
    if (m >= 4 && stem[m - 1] == stem[m - 2] && !is_vowel(stem[m - 1]) &&
        known(stem.substr(0, m - 1))) {
      return std::string(stem.substr(0, m - 1));
    }
    return std::nullopt;
  };
  if (ends_with(w, "ing")) {
    if (auto s = try_stems(w.substr(0, n - 3))) return *s;
  } else if (ends_with(w, "ed")) {
    if (auto s = try_stems(w.substr(0, n - 2))) return *s;
  }
  return std::string(w);
}

std::string Preprocessor::lemmatize(std::string_view token) const {
  std::string cur(strip_apostrophes(token));
  // Every rule shortens the token or lands on a lexicon fixed point.
  for (int i = 0; i < 16 && !cur.empty(); ++i) {
    std::string next(strip_apostrophes(lemmatize_once(cur)));
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

TokenList Preprocessor::preprocess(std::string_view text) const {
  const std::string folded = fold_to_token_alphabet(text);
  TokenList out;
  std::size_t i = 0;
  while (i < folded.size()) {
    while (i < folded.size() && folded[i] == ' ') ++i;
    std::size_t j = i;
    while (j < folded.size() && folded[j] != ' ') ++j;
    if (j > i) {
      std::string_view raw(folded.data() + i, j - i);
      std::string_view token = strip_apostrophes(raw);
      if (!token.empty() && !is_stopword(raw) && !is_stopword(token)) {
        std::string lemma = lemmatize(token);
        // A lemma can itself be a stopword.
        if (!lemma.empty() && !is_stopword(lemma)) out.push_back(std::move(lemma));
      }
    }
    i = j;
  }
  return out;
}

TokenList preprocess(std::string_view text) { return Preprocessor::bundled().preprocess(text); }

std::string join(const TokenList& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace absa::textprep
