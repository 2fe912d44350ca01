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

#ifndef ABSA_CONFIG_H_
#define ABSA_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"

namespace absa {

// Flat dotted-key configuration ("embedding.dim") with typed defaults.
// Keys outside the default set are rejected; values must keep the default's
// type (integers are accepted for real-valued keys).
class RunConfig {
 public:
  static RunConfig defaults();

  // Merges a nested JSON object; `source` names it in errors.
  void merge(const nlohmann::json& tree, const std::string& source);
  void merge_file(const std::filesystem::path& path);
  // "key=value" with the value parsed by the key's type.
  void set(std::string_view assignment);

  bool has(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::string get_string(std::string_view key) const;
  bool get_bool(std::string_view key) const;

  // Nested form of the effective configuration.
  nlohmann::json effective() const;
  // Digest of the canonical effective configuration.
  std::string digest() const;

 private:
  const nlohmann::json& at(std::string_view key) const;
  void assign(const std::string& key, const nlohmann::json& value, const std::string& source);

  std::map<std::string, nlohmann::json, std::less<>> values_;
};

}  // namespace absa

#endif  // ABSA_CONFIG_H_
