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

#include "absa/aspects.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "absa/data.h"
#include "absa/util.h"

namespace absa::aspects {
namespace {

std::string normalize_name(std::string_view raw) {
  std::string s = to_lower_ascii(trim(raw));
  // "Food Quality (general)" -> "food quality"
  if (!s.empty() && s.back() == ')') {
    if (auto open = s.rfind('('); open != std::string::npos && open > 0) {
      s = std::string(trim(std::string_view(s).substr(0, open)));
    }
  }
  std::string collapsed;
  for (char c : s) {
    if (c == ' ' && !collapsed.empty() && collapsed.back() == ' ') continue;
    collapsed.push_back(c);
  }
  return collapsed;
}

AspectResponse response_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw Error(where + ": response must be a JSON object");
  AspectResponse r;
  try {
    r.business_id = j.at("business_id").get<std::string>();
    r.model_tag = j.value("model_tag", std::string());
    r.aspects = j.at("aspects").get<std::vector<std::string>>();
    if (j.contains("ratings") && !j["ratings"].is_null()) {
      r.ratings = j["ratings"].get<std::map<std::string, std::vector<int>>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(where + ": " + e.what());
  }
  if (r.business_id.empty()) throw Error(where + ": empty business_id");
  for (const auto& a : r.aspects) {
    if (trim(a).empty()) throw Error(where + ": empty aspect name");
  }
  for (const auto& [name, values] : r.ratings) {
    for (int v : values) {
      if (v < 1 || v > 5) {
        throw Error(where + ": rating " + std::to_string(v) + " for '" + name + "' is outside 1..5");
      }
    }
  }
  return r;
}

std::map<std::string, std::set<Aspect>> aspects_by_business(const std::vector<AspectResponse>& rs) {
  std::map<std::string, std::set<Aspect>> out;
  for (const auto& r : rs) {
    auto& set = out[r.business_id];
    for (const auto& raw : r.aspects) {
      if (auto c = canonicalize_aspect(raw); c.aspect) set.insert(*c.aspect);
    }
  }
  return out;
}

}  // namespace

std::string emit_prompt(const std::vector<ingest::CorpusRecord>& reviews) {
  if (reviews.empty()) throw Error("emit_prompt needs at least one review");
  std::string out;
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    std::string text = reviews[i].text;
    for (char& c : text) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    out += "Review " + std::to_string(i + 1) + ": " + text + "\n";
  }
  out += "\n";
  out += kDiscoveryPrompt;
  return out;
}

std::vector<AspectResponse> parse_responses(std::string_view text, const std::string& source) {
  std::vector<AspectResponse> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return out;
  if (text[first] == '[') {
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(source + ": not valid JSON");
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(response_from_json(j[i], source + " element " + std::to_string(i + 1)));
    }
    return out;
  }
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    if (!line.empty()) {
      const std::string where = source + " line " + std::to_string(line_no);
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) throw Error(where + ": not valid JSON");
      out.push_back(response_from_json(j, where));
    }
    pos = end + 1;
  }
  return out;
}

std::vector<AspectResponse> load_responses(const std::filesystem::path& path) {
  return parse_responses(read_file(path), path.string());
}

nlohmann::json to_json(const AspectResponse& r) {
  return {{"business_id", r.business_id},
          {"model_tag", r.model_tag},
          {"aspects", r.aspects},
          {"ratings", r.ratings}};
}

std::string CanonicalAspect::name() const {
  return aspect ? std::string(aspect_key(*aspect)) : std::string(kOtherAspect);
}

AspectCanonicalizer::AspectCanonicalizer(std::string_view alias_table) {
  for (auto line : data_lines(alias_table)) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error("aspect alias line without a tab: '" + std::string(line) + "'");
    }
    const auto key = normalize_name(line.substr(0, tab));
    const auto target = trim(line.substr(tab + 1));
    auto aspect = parse_aspect_key(target);
    if (!aspect) throw Error("aspect alias '" + key + "' maps to unknown aspect '" + std::string(target) + "'");
    aliases_[key] = *aspect;
  }
  for (Aspect a : kAllAspects) aliases_.emplace(std::string(aspect_key(a)), a);
}

const AspectCanonicalizer& AspectCanonicalizer::bundled() {
  static const AspectCanonicalizer c(bundled_aspect_aliases());
  return c;
}

CanonicalAspect AspectCanonicalizer::canonicalize(std::string_view raw) const {
  CanonicalAspect c;
  c.raw = std::string(raw);
  const auto name = normalize_name(raw);
  if (auto it = aliases_.find(name); it != aliases_.end()) {
    c.aspect = it->second;
  } else if (name.size() > 8 && name.compare(name.size() - 8, 8, " quality") == 0) {
    c.aspect = Aspect::kFoodQuality;
  }
  return c;
}

CanonicalAspect canonicalize_aspect(std::string_view raw) {
  return AspectCanonicalizer::bundled().canonicalize(raw);
}

std::vector<AspectAgreementRow> aspect_agreement(const std::vector<AspectResponse>& model_a,
                                                 const std::vector<AspectResponse>& model_b) {
  const auto a = aspects_by_business(model_a);
  const auto b = aspects_by_business(model_b);
  std::vector<std::string> only_a, only_b;
  for (const auto& [id, _] : a) {
    if (!b.count(id)) only_a.push_back(id);
  }
  for (const auto& [id, _] : b) {
    if (!a.count(id)) only_b.push_back(id);
  }
  if (!only_a.empty() || !only_b.empty()) {
    auto join = [](const std::vector<std::string>& ids) {
      std::string s;
      for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
      return s.empty() ? std::string("none") : s;
    };
    throw Error("response sets cover different businesses; only in first: " + join(only_a) +
                "; only in second: " + join(only_b));
  }
  if (a.empty()) throw Error("no responses to compare");
  std::vector<AspectAgreementRow> rows;
  for (Aspect asp : kAllAspects) {
    AspectAgreementRow r;
    r.aspect = std::string(aspect_key(asp));
    r.businesses = a.size();
    for (const auto& [id, set_a] : a) {
      const bool in_a = set_a.count(asp) > 0;
      const bool in_b = b.at(id).count(asp) > 0;
      r.either += in_a || in_b;
      r.both += in_a && in_b;
    }
    r.occurrence_pct = 100.0 * static_cast<double>(r.either) / static_cast<double>(r.businesses);
    if (r.either > 0) {
      r.agreement_pct = 100.0 * static_cast<double>(r.both) / static_cast<double>(r.either);
    }
    rows.push_back(r);
  }
  return rows;
}

std::string agreement_csv(const std::vector<AspectAgreementRow>& rows) {
  std::ostringstream os;
  os << "aspect,occurrence_pct,agreement_pct\n";
  for (const auto& r : rows) {
    os << r.aspect << ',' << format_fixed(r.occurrence_pct, 2) << ','
       << (r.agreement_pct ? format_fixed(*r.agreement_pct, 2) : std::string(kUndefinedCell)) << '\n';
  }
  return os.str();
}

}  // namespace absa::aspects
