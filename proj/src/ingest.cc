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

#include "absa/ingest.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "absa/data.h"
#include "absa/rng.h"
#include "absa/util.h"

namespace absa::ingest {

using nlohmann::json;

namespace {

std::string optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return "";
  if (!it->is_string()) throw Error(std::string("field ") + key + " is not a string");
  return it->get<std::string>();
}

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(std::string("missing string field ") + key);
  }
  return it->get<std::string>();
}

double required_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw Error(std::string("missing numeric field ") + key);
  }
  return it->get<double>();
}

bool too_many_malformed(std::size_t malformed, std::size_t lines) {
  return lines > 0 &&
         static_cast<double>(malformed) > kMaxMalformedFraction * static_cast<double>(lines);
}

}  // namespace

std::optional<Review> parse_review_line(std::string_view line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    Review r;
    r.review_id = required_string(j, "review_id");
    r.user_id = required_string(j, "user_id");
    r.business_id = required_string(j, "business_id");
    const double stars = required_number(j, "stars");
    if (stars != std::floor(stars) || stars < 1 || stars > 5) return std::nullopt;
    r.stars = static_cast<int>(stars);
    r.text = optional_string(j, "text");
    r.date = optional_string(j, "date");
    if (r.review_id.empty() || r.business_id.empty()) return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<Business> parse_business_line(std::string_view line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    Business b;
    b.business_id = required_string(j, "business_id");
    if (b.business_id.empty()) return std::nullopt;
    b.name = optional_string(j, "name");
    b.address = optional_string(j, "address");
    b.city = optional_string(j, "city");
    b.state = std::string(trim(optional_string(j, "state")));
    if (b.state.empty()) b.state = std::string(kMissingState);
    b.postal_code = optional_string(j, "postal_code");
    b.overall_rating = required_number(j, "stars");
    if (b.overall_rating < 1.0 || b.overall_rating > 5.0) return std::nullopt;
    auto rc = j.find("review_count");
    if (rc != j.end() && !rc->is_null()) {
      if (!rc->is_number_integer()) return std::nullopt;
      b.review_count = rc->get<std::int64_t>();
      if (b.review_count < 0) return std::nullopt;
    }
    b.categories = optional_string(j, "categories");
    return b;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool is_restaurant(std::string_view categories) {
  return to_lower_ascii(categories).find("restaurant") != std::string::npos;
}

ParseDiagnostics parse_corpus(const std::filesystem::path& reviews_path,
                              const std::filesystem::path& business_path,
                              const std::function<void(CorpusRecord&&)>& sink) {
  ParseDiagnostics diag;

  std::ifstream biz_in(business_path);
  if (!biz_in) throw Error("cannot open business file " + business_path.string());
  std::unordered_map<std::string, Business> businesses;
  std::string line;
  while (std::getline(biz_in, line)) {
    if (trim(line).empty()) continue;
    ++diag.business_lines;
    auto b = parse_business_line(line);
    if (!b) {
      ++diag.business_malformed;
      continue;
    }
    if (is_restaurant(b->categories)) {
      ++diag.restaurants;
      if (b->state == kMissingState) ++diag.businesses_missing_state;
    }
    std::string id = b->business_id;
    businesses.insert_or_assign(std::move(id), std::move(*b));
  }
  if (biz_in.bad()) throw Error("read error in " + business_path.string());
  if (too_many_malformed(diag.business_malformed, diag.business_lines)) {
    throw Error(business_path.string() + ": " + std::to_string(diag.business_malformed) +
                " of " + std::to_string(diag.business_lines) +
                " lines malformed (limit 1%)");
  }

  // Cuisine is a function of the business, so resolve it once per business.
  std::unordered_map<std::string, std::string> cuisine_cache;
  const CuisineNormalizer& normalizer = CuisineNormalizer::bundled();

  std::ifstream rev_in(reviews_path);
  if (!rev_in) throw Error("cannot open review file " + reviews_path.string());
  while (std::getline(rev_in, line)) {
    if (trim(line).empty()) continue;
    ++diag.review_lines;
    auto r = parse_review_line(line);
    if (!r) {
      ++diag.review_malformed;
      continue;
    }
    auto it = businesses.find(r->business_id);
    if (it == businesses.end()) {
      ++diag.unknown_business;
      continue;
    }
    const Business& b = it->second;
    if (!is_restaurant(b.categories)) {
      ++diag.non_restaurant;
      continue;
    }
    auto [cit, inserted] = cuisine_cache.try_emplace(b.business_id);
    if (inserted) cit->second = normalizer.normalize(b.categories);

    CorpusRecord rec;
    rec.review_id = std::move(r->review_id);
    rec.user_id = std::move(r->user_id);
    rec.business_id = std::move(r->business_id);
    rec.stars = r->stars;
    rec.text = std::move(r->text);
    rec.date = std::move(r->date);
    rec.state = b.state;
    rec.overall_rating = b.overall_rating;
    rec.cuisine = cit->second;
    ++diag.emitted;
    sink(std::move(rec));
  }
  if (rev_in.bad()) throw Error("read error in " + reviews_path.string());
  if (too_many_malformed(diag.review_malformed, diag.review_lines)) {
    throw Error(reviews_path.string() + ": " + std::to_string(diag.review_malformed) +
                " of " + std::to_string(diag.review_lines) + " lines malformed (limit 1%)");
  }
  return diag;
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& reviews_path,
                                      const std::filesystem::path& business_path,
                                      ParseDiagnostics* diagnostics) {
  std::vector<CorpusRecord> out;
  ParseDiagnostics d = parse_corpus(reviews_path, business_path,
                                    [&](CorpusRecord&& r) { out.push_back(std::move(r)); });
  if (diagnostics != nullptr) *diagnostics = d;
  return out;
}

json to_json(const CorpusRecord& r) {
  return json{{"review_id", r.review_id}, {"user_id", r.user_id},
              {"business_id", r.business_id}, {"stars", r.stars},
              {"text", r.text}, {"date", r.date},
              {"state", r.state}, {"overall_rating", r.overall_rating},
              {"cuisine", r.cuisine}};
}

CorpusRecord corpus_record_from_json(const json& j) {
  CorpusRecord r;
  r.review_id = j.at("review_id").get<std::string>();
  r.user_id = j.at("user_id").get<std::string>();
  r.business_id = j.at("business_id").get<std::string>();
  r.stars = j.at("stars").get<int>();
  r.text = j.at("text").get<std::string>();
  r.date = j.at("date").get<std::string>();
  r.state = j.at("state").get<std::string>();
  r.overall_rating = j.at("overall_rating").get<double>();
  r.cuisine = j.at("cuisine").get<std::string>();
  return r;
}

void write_corpus_jsonl(const std::filesystem::path& path,
                        const std::vector<CorpusRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records) {
    out << to_json(r).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

void for_each_corpus_record(const std::filesystem::path& path,
                            const std::function<void(CorpusRecord&&)>& sink) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      sink(corpus_record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw Error("read error in " + path.string());
}

std::vector<CorpusRecord> read_corpus_jsonl(const std::filesystem::path& path) {
  std::vector<CorpusRecord> out;
  for_each_corpus_record(path, [&](CorpusRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& canonical_cuisines() {
  static const std::vector<std::string> kCuisines = {
      "American", "Italian",    "Mexican",      "Chinese",    "Japanese", "Thai",
      "Mediterranean", "Indian", "Cajun/Creole", "Vietnamese", "Other"};
  return kCuisines;
}

CuisineNormalizer::CuisineNormalizer(std::string_view alias_table) {
  const auto& canon = canonical_cuisines();
  for (std::string_view line : data_lines(alias_table)) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error("cuisine alias table: missing tab in line '" + std::string(line) + "'");
    }
    Alias a{to_lower_ascii(trim(line.substr(0, tab))), std::string(trim(line.substr(tab + 1)))};
    if (a.text.empty()) throw Error("cuisine alias table: empty alias");
    if (a.canonical != "-" &&
        std::find(canon.begin(), canon.end(), a.canonical) == canon.end()) {
      throw Error("cuisine alias table: unknown cuisine '" + a.canonical + "'");
    }
    aliases_.push_back(std::move(a));
  }
}

const CuisineNormalizer& CuisineNormalizer::bundled() {
  static const CuisineNormalizer kBundled(bundled_cuisine_aliases());
  return kBundled;
}

std::string CuisineNormalizer::normalize(std::string_view categories) const {
  const std::string text = to_lower_ascii(categories);
  const auto boundary = [&](std::size_t pos) {
    if (pos == 0 || pos >= text.size()) return true;
    const unsigned char c = static_cast<unsigned char>(text[pos]);
    const unsigned char p = static_cast<unsigned char>(text[pos - 1]);
    return !(std::isalnum(c) && std::isalnum(p));
  };
  struct Match {
    std::size_t pos, len;
    const Alias* alias;
  };
  std::vector<Match> matches;
  for (const Alias& a : aliases_) {
    for (std::size_t pos = text.find(a.text); pos != std::string::npos;
         pos = text.find(a.text, pos + 1)) {
      if (boundary(pos) && boundary(pos + a.text.size())) {
        matches.push_back({pos, a.text.size(), &a});
      }
    }
  }
  std::sort(matches.begin(), matches.end(), [](const Match& x, const Match& y) {
    return x.pos != y.pos ? x.pos < y.pos : x.len > y.len;
  });
  std::size_t covered_until = 0;
  for (const Match& m : matches) {
    // Shadowed by an earlier, longer match covering the same span.
    if (m.pos + m.len <= covered_until) continue;
    covered_until = std::max(covered_until, m.pos + m.len);
    if (m.alias->canonical != "-") return m.alias->canonical;
  }
  return std::string(kOtherCuisine);
}

std::string normalize_cuisine(std::string_view categories) {
  return CuisineNormalizer::bundled().normalize(categories);
}

// ---------------------------------------------------------------------------

void CorpusStatsAccumulator::add(const CorpusRecord& r) {
  ++reviews_;
  star_sum_ += r.stars;
  users_.try_emplace(r.user_id, 0);
  businesses_.try_emplace(r.business_id, BusinessInfo{r.overall_rating, r.cuisine});
  ++per_state_[r.state];
}

CorpusStats CorpusStatsAccumulator::finish() const {
  CorpusStats s;
  s.reviews = reviews_;
  s.users = users_.size();
  s.businesses = businesses_.size();
  s.reviews_per_state = per_state_;
  if (auto it = per_state_.find(std::string(kMissingState)); it != per_state_.end()) {
    s.missing_state_reviews = it->second;
  }
  if (reviews_ > 0) s.mean_review_rating = star_sum_ / static_cast<double>(reviews_);
  if (!businesses_.empty()) {
    double sum = 0.0;
    std::map<std::string, std::size_t> cuisine_counts;
    for (const auto& [id, info] : businesses_) {
      sum += info.rating;
      ++cuisine_counts[info.cuisine];
    }
    const double n = static_cast<double>(businesses_.size());
    s.mean_business_rating = sum / n;
    for (const auto& [c, count] : cuisine_counts) {
      s.cuisine_share_pct[c] = 100.0 * static_cast<double>(count) / n;
    }
  }
  return s;
}

CorpusStats corpus_stats(const std::vector<CorpusRecord>& corpus) {
  CorpusStatsAccumulator acc;
  for (const auto& r : corpus) acc.add(r);
  return acc.finish();
}

json to_json(const CorpusStats& s) {
  json j;
  j["reviews"] = s.reviews;
  j["users"] = s.users;
  j["businesses"] = s.businesses;
  j["reviews_per_state"] = s.reviews_per_state;
  j["missing_state_reviews"] = s.missing_state_reviews;
  j["mean_review_rating"] = s.mean_review_rating ? json(*s.mean_review_rating) : json(nullptr);
  j["mean_business_rating"] =
      s.mean_business_rating ? json(*s.mean_business_rating) : json(nullptr);
  j["cuisine_share_pct"] = s.cuisine_share_pct;
  return j;
}

// ---------------------------------------------------------------------------

std::vector<CorpusRecord> sample_reviews(const std::vector<CorpusRecord>& corpus,
                                         const SampleStrategy& strategy,
                                         std::uint64_t seed) {
  if (corpus.empty()) throw Error("cannot sample from an empty corpus");
  Rng rng(seed);

  if (const auto* uniform = std::get_if<UniformSample>(&strategy)) {
    if (uniform->n > corpus.size()) {
      throw Error("requested " + std::to_string(uniform->n) + " reviews but only " +
                  std::to_string(corpus.size()) + " available (short by " +
                  std::to_string(uniform->n - corpus.size()) + ")");
    }
    std::vector<std::size_t> idx(corpus.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<CorpusRecord> out;
    out.reserve(uniform->n);
    for (std::size_t i = 0; i < uniform->n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(idx.size() - i));
      std::swap(idx[i], idx[j]);
      out.push_back(corpus[idx[i]]);
    }
    return out;
  }

  const auto& per = std::get<PerBusinessSample>(strategy);
  std::map<std::string, std::vector<const CorpusRecord*>> by_business;
  for (const auto& r : corpus) {
    if (per.state && r.state != *per.state) continue;
    by_business[r.business_id].push_back(&r);
  }
  std::vector<std::string> eligible;
  for (const auto& [id, recs] : by_business) {
    if (recs.size() >= per.per_business) eligible.push_back(id);
  }
  if (eligible.size() < per.businesses) {
    throw Error("requested " + std::to_string(per.businesses) + " businesses with >= " +
                std::to_string(per.per_business) + " reviews" +
                (per.state ? " in " + *per.state : std::string()) + " but only " +
                std::to_string(eligible.size()) + " qualify (short by " +
                std::to_string(per.businesses - eligible.size()) + ")");
  }
  Rng business_rng = rng.split(0);
  std::vector<CorpusRecord> out;
  out.reserve(per.businesses * per.per_business);
  for (std::size_t i = 0; i < per.businesses; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(business_rng.uniform_index(eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
    auto recs = by_business[eligible[i]];
    std::sort(recs.begin(), recs.end(), [](const CorpusRecord* a, const CorpusRecord* b) {
      return a->review_id < b->review_id;
    });
    // Each business draws from its own stream so the result does not depend
    // on the order businesses appear in the corpus.
    Rng review_rng = rng.split(fnv1a64(eligible[i]));
    for (std::size_t k = 0; k < per.per_business; ++k) {
      const std::size_t m =
          k + static_cast<std::size_t>(review_rng.uniform_index(recs.size() - k));
      std::swap(recs[k], recs[m]);
      out.push_back(*recs[k]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string label_csv_header() {
  std::string h = "review_id";
  for (Aspect a : kAllAspects) {
    h += ',';
    h += aspect_key(a);
  }
  return h;
}

std::vector<AspectLabelSet> parse_labels(std::string_view csv_text) {
  std::vector<AspectLabelSet> out;
  std::unordered_set<std::string> seen;
  bool have_header = false;
  std::size_t line_no = 0;
  while (!csv_text.empty()) {
    const std::size_t end = csv_text.find('\n');
    std::string_view line = csv_text.substr(0, end);
    csv_text = end == std::string_view::npos ? std::string_view{} : csv_text.substr(end + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    for (auto& f : fields) f = std::string(trim(f));
    if (!have_header) {
      std::vector<std::string> expected = split_csv_line(label_csv_header());
      if (fields != expected) {
        throw Error("label CSV header must be '" + label_csv_header() + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != kNumAspects + 1) {
      throw Error("label CSV row " + std::to_string(line_no) + ": expected " +
                  std::to_string(kNumAspects + 1) + " columns, got " +
                  std::to_string(fields.size()));
    }
    AspectLabelSet set;
    set.review_id = fields[0];
    if (set.review_id.empty()) {
      throw Error("label CSV row " + std::to_string(line_no) + ": empty review_id");
    }
    for (Aspect a : kAllAspects) {
      const std::string& cell = fields[index_of(a) + 1];
      auto label = parse_label(cell);
      if (!label) {
        throw Error("label CSV row " + std::to_string(line_no) + ", column " +
                    std::string(aspect_key(a)) + ": invalid label " + cell);
      }
      set[a] = *label;
    }
    if (!seen.insert(set.review_id).second) {
      throw Error("label CSV row " + std::to_string(line_no) + ": duplicate review_id " +
                  set.review_id);
    }
    out.push_back(std::move(set));
  }
  if (!have_header) throw Error("label CSV is empty (no header)");
  return out;
}

std::vector<AspectLabelSet> load_labels(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_labels(text);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string format_labels(const std::vector<AspectLabelSet>& labels) {
  std::string out = label_csv_header() + "\n";
  for (const auto& set : labels) {
    out += csv_field(set.review_id);
    for (Aspect a : kAllAspects) {
      out += ',';
      out += label_text(set[a]);
    }
    out += '\n';
  }
  return out;
}

void write_labels(const std::filesystem::path& path,
                  const std::vector<AspectLabelSet>& labels) {
  write_file(path, format_labels(labels));
}

}  // namespace absa::ingest
