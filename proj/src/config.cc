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

#include "absa/config.h"

#include "absa/common.h"
#include "absa/util.h"

namespace absa {
namespace {

void flatten(const nlohmann::json& node, const std::string& prefix,
             std::map<std::string, nlohmann::json>& out) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else {
    out[prefix] = node;
  }
}

bool same_kind(const nlohmann::json& def, const nlohmann::json& v) {
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_number_float()) return v.is_number();
  if (def.is_number_unsigned()) return v.is_number_unsigned() ||
                                       (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (def.is_number_integer()) return v.is_number_integer();
  return false;
}

const char* kind_name(const nlohmann::json& def) {
  if (def.is_boolean()) return "boolean";
  if (def.is_string()) return "string";
  if (def.is_number_float()) return "number";
  if (def.is_number_unsigned()) return "non-negative integer";
  return "integer";
}

}  // namespace

RunConfig RunConfig::defaults() {
  const nlohmann::json tree = {
      {"seed", std::uint64_t{1}},
      {"workers", std::uint64_t{1}},
      {"textprep", {{"stopwords", ""}, {"lemmas", ""}}},
      {"tfidf", {{"max_features", std::uint64_t{400}}}},
      {"embedding",
       {{"dim", std::uint64_t{100}},
        {"min_n", std::uint64_t{3}},
        {"max_n", std::uint64_t{6}},
        {"window", std::uint64_t{5}},
        {"epochs", std::uint64_t{5}},
        {"lr", 0.05},
        {"negatives", std::uint64_t{5}},
        {"min_count", std::uint64_t{5}},
        {"bucket_count", std::uint64_t{1} << 21}}},
      {"classify",
       {{"kind", "logreg"},
        {"alpha", 1.0},
        {"lambda", 1e-4},
        {"max_iterations", std::uint64_t{1000}},
        {"tolerance", 1e-6},
        {"svm_epochs", std::uint64_t{100}},
        {"validation_fraction", 0.2},
        {"smote_k", std::uint64_t{5}}}},
      {"predict", {{"chunk_size", std::uint64_t{2048}}}},
      {"lda",
       {{"topics", std::uint64_t{5}},
        {"alpha", 0.1},
        {"beta", 0.01},
        {"iterations", std::uint64_t{1000}},
        {"top_words", std::uint64_t{10}},
        {"mode", "per_restaurant"}}},
      {"synth",
       {{"businesses", std::uint64_t{200}},
        {"per", std::uint64_t{30}},
        {"noise_sigma", 0.1},
        {"neutral_share", 0.3},
        {"lean_range", 0.9},
        {"lexical_overlap", false},
        {"weights",
         {{"service", 0.7}, {"food_quality", 1.5}, {"ambiance", 0.0},
          {"wait_time", 0.0}, {"price", 0.0}, {"menu_variety", 0.0}}},
        {"presence",
         {{"service", 0.4}, {"food_quality", 0.9}, {"ambiance", 0.37},
          {"wait_time", 0.22}, {"price", 0.3}, {"menu_variety", 0.3}}}}},
  };
  std::map<std::string, nlohmann::json> flat;
  flatten(tree, "", flat);
  RunConfig c;
  for (auto& [k, v] : flat) c.values_.emplace(k, v);
  return c;
}

void RunConfig::assign(const std::string& key, const nlohmann::json& value, const std::string& source) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(source + ": unknown config key '" + key + "'");
  if (!same_kind(it->second, value)) {
    throw Error(source + ": config key '" + key + "' expects a " + kind_name(it->second));
  }
  if (it->second.is_number_float()) {
    it->second = value.get<double>();
  } else if (it->second.is_number_unsigned()) {
    it->second = value.get<std::uint64_t>();
  } else {
    it->second = value;
  }
}

void RunConfig::merge(const nlohmann::json& tree, const std::string& source) {
  if (!tree.is_object()) throw Error(source + ": config must be a JSON object");
  std::map<std::string, nlohmann::json> flat;
  flatten(tree, "", flat);
  for (const auto& [k, v] : flat) assign(k, v, source);
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(path.string() + ": not valid JSON");
  merge(j, path.string());
}

void RunConfig::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string text(trim(assignment.substr(eq + 1)));
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("--set: unknown config key '" + key + "'");
  nlohmann::json value;
  if (it->second.is_string()) {
    value = text;
  } else {
    value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) {
      throw Error("--set: config key '" + key + "' expects a " + kind_name(it->second));
    }
  }
  assign(key, value, "--set");
}

bool RunConfig::has(std::string_view key) const { return values_.find(key) != values_.end(); }

const nlohmann::json& RunConfig::at(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("unknown config key '" + std::string(key) + "'");
  return it->second;
}

std::int64_t RunConfig::get_int(std::string_view key) const { return at(key).get<std::int64_t>(); }
std::uint64_t RunConfig::get_u64(std::string_view key) const { return at(key).get<std::uint64_t>(); }
double RunConfig::get_double(std::string_view key) const { return at(key).get<double>(); }
std::string RunConfig::get_string(std::string_view key) const { return at(key).get<std::string>(); }
bool RunConfig::get_bool(std::string_view key) const { return at(key).get<bool>(); }

nlohmann::json RunConfig::effective() const {
  nlohmann::json tree = nlohmann::json::object();
  for (const auto& [k, v] : values_) tree[nlohmann::json::json_pointer("/" + [&] {
    std::string p = k;
    for (auto& c : p) {
      if (c == '.') c = '/';
    }
    return p;
  }())] = v;
  return tree;
}

std::string RunConfig::digest() const { return hex_digest(fnv1a64(effective().dump())); }

}  // namespace absa
