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

#include "absa/testkit.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "absa/rng.h"
#include "absa/util.h"

namespace absa::testkit {
namespace {

using Cell = std::vector<std::string>;

const Cell kFiller = {
    "we came here on a friday evening", "my cousin recommended this spot",
    "we parked across the street",      "it was our first visit",
    "we celebrated a birthday here",    "the restaurant sits near downtown"};

// Category strings paired with the canonical cuisine they normalize to.
const char* const kCategories[] = {
    "American (Traditional), Restaurants", "Italian, Pizza, Restaurants",
    "Mexican, Restaurants",                "Chinese, Restaurants",
    "Sushi Bars, Japanese, Restaurants",   "Thai, Restaurants",
    "Indian, Restaurants",                 "Restaurants, Cafes"};

const char* const kStates[] = {"AB", "PA", "FL", "CA", "TN", "NV", "AZ", "LA"};

std::size_t polarity_slot(int s) { return static_cast<std::size_t>(s + 1); }

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace

TemplateBank TemplateBank::disjoint() {
  TemplateBank b;
  auto set = [&](Aspect a, Cell neg, Cell neu, Cell pos) {
    auto& row = b.sentences[index_of(a)];
    row[0] = std::move(neg);
    row[1] = std::move(neu);
    row[2] = std::move(pos);
    row[3] = kFiller;
  };
  set(Aspect::kService,
      {"the waiter was rude and dismissive", "a surly waiter acted careless",
       "the waiter ignored diners looking annoyed"},
      {"the host took our order", "a host brought the check", "the host cleared plates"},
      {"the staff were attentive and courteous", "gracious staff made guests welcome",
       "friendly helpful staff"});
  set(Aspect::kFoodQuality,
      {"the food was bland and greasy", "stale soggy food", "burnt inedible food"},
      {"the entree was edible", "the entree arrived as described", "an average entree"},
      {"every dish was delicious and flavorful", "each dish seemed fresh and savory",
       "a superb dish perfectly seasoned"});
  set(Aspect::kAmbiance,
      {"the decor was shabby and dingy", "dingy decor with harsh glare", "cramped gloomy decor"},
      {"the room had plain walls", "a simple room", "the room looked ordinary"},
      {"the atmosphere was charming and cozy", "a romantic atmosphere with warm candles",
       "an elegant inviting atmosphere"});
  set(Aspect::kWaitTime,
      {"we waited over an hour", "we waited forever at the door", "waited painfully long"},
      {"a fifteen minute delay for a table", "the usual delay before appetizers",
       "a typical delay"},
      {"we were seated immediately", "seated quickly without any line",
       "seated promptly and efficiently"});
  set(Aspect::kPrice,
      {"prices were outrageous and overpriced", "outrageous prices",
       "a ripoff at these prices"},
      {"the bill totaled about forty dollars", "the bill matched expectations",
       "an unremarkable bill"},
      {"excellent value and a great bargain", "affordable value", "reasonable value for money"});
  set(Aspect::kMenuVariety,
      {"the menu was limited with few options", "a tiny menu", "a sparse repetitive menu"},
      {"the selection was standard", "a standard selection", "the selection had several sections"},
      {"an impressive variety of choices", "plenty of diverse choices",
       "extensive choices for everyone"});
  return b;
}

TemplateBank TemplateBank::lexical_overlap() {
  TemplateBank b = disjoint();
  const char* nouns[] = {"service", "food", "atmosphere", "wait", "price", "menu"};
  const char* words[] = {"bad", "okay", "good"};
  for (std::size_t a = 0; a < kNumAspects; ++a) {
    for (std::size_t p = 0; p < 3; ++p) {
      b.sentences[a][p].push_back(std::string("the ") + nouns[a] + " was " + words[p]);
    }
  }
  return b;
}

void TemplateBank::validate() const {
  for (std::size_t a = 0; a < kNumAspects; ++a) {
    for (std::size_t p = 0; p < 4; ++p) {
      if (sentences[a][p].empty()) {
        static const char* names[] = {"negative", "neutral", "positive", "absent"};
        throw Error("template bank cell (" + std::string(aspect_key(kAllAspects[a])) + ", " +
                    names[p] + ") is empty");
      }
    }
  }
}

void SynthSpec::validate() const {
  if (n_businesses == 0 || reviews_per_business == 0) {
    throw Error("synth needs at least one business and one review per business");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw Error("noise sigma must be non-negative");
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error("aspect weights must be finite");
  }
  for (double p : presence) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("presence probabilities must lie in [0, 1]");
  }
  if (!(neutral_share >= 0.0 && neutral_share <= 1.0)) throw Error("neutral share must lie in [0, 1]");
  if (!(lean_range >= 0.0 && lean_range <= 1.0)) throw Error("lean range must lie in [0, 1]");
  templates.validate();
}

nlohmann::json to_json(const SynthSpec& s) {
  nlohmann::json w = nlohmann::json::object(), pr = nlohmann::json::object();
  for (Aspect a : kAllAspects) {
    w[std::string(aspect_key(a))] = s.weights[index_of(a)];
    pr[std::string(aspect_key(a))] = s.presence[index_of(a)];
  }
  return {{"n_businesses", s.n_businesses},
          {"reviews_per_business", s.reviews_per_business},
          {"weights", w},
          {"intercept", 3.0},
          {"noise_sigma", s.noise_sigma},
          {"seed", s.seed},
          {"presence", pr},
          {"neutral_share", s.neutral_share},
          {"lean_range", s.lean_range}};
}

int star_rating(const std::array<double, kNumAspects>& weights,
                const std::array<int, kNumAspects>& sentiments, double noise) {
  double x = 3.0 + noise;
  for (std::size_t a = 0; a < kNumAspects; ++a) x += weights[a] * sentiments[a];
  return static_cast<int>(std::clamp(std::floor(x + 0.5), 1.0, 5.0));
}

double business_rating(const std::vector<int>& stars) {
  if (stars.empty()) throw Error("business_rating: no reviews");
  double sum = 0.0;
  for (int s : stars) sum += s;
  return std::floor(2.0 * sum / static_cast<double>(stars.size()) + 0.5) / 2.0;
}

SynthOutput generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SynthOutput out;
  const std::size_t total = spec.n_businesses * spec.reviews_per_business;
  const std::size_t users = std::max<std::size_t>(1, total / 3);
  char buf[64];
  for (std::size_t b = 0; b < spec.n_businesses; ++b) {
    ingest::Business biz;
    std::snprintf(buf, sizeof(buf), "b%05zu", b);
    biz.business_id = buf;
    biz.name = "Synthetic Diner " + std::to_string(b);
    biz.address = std::to_string(100 + b) + " Main St";
    biz.city = "Springfield";
    biz.state = kStates[rng.uniform_index(std::size(kStates))];
    biz.postal_code = "00000";
    biz.categories = kCategories[rng.uniform_index(std::size(kCategories))];
    biz.review_count = static_cast<std::int64_t>(spec.reviews_per_business);

    std::array<double, kNumAspects> lean{};
    for (auto& m : lean) m = rng.uniform(-spec.lean_range, spec.lean_range);

    std::vector<int> stars;
    for (std::size_t r = 0; r < spec.reviews_per_business; ++r) {
      ingest::AspectLabelSet labels;
      std::array<int, kNumAspects> s{};
      std::vector<std::string> sentences;
      std::vector<std::size_t> absent;
      for (std::size_t a = 0; a < kNumAspects; ++a) {
        if (rng.uniform01() < spec.presence[a]) {
          int v = 0;
          if (rng.uniform01() >= spec.neutral_share) v = rng.uniform01() < (1.0 + lean[a]) / 2.0 ? 1 : -1;
          s[a] = v;
          labels.labels[a] = static_cast<AspectLabel>(v);
          const auto& cell = spec.templates.sentences[a][polarity_slot(v)];
          sentences.push_back(cell[rng.uniform_index(cell.size())]);
        } else {
          labels.labels[a] = AspectLabel::kNotApplicable;
          absent.push_back(a);
        }
      }
      const std::size_t filler_aspect =
          absent.empty() ? rng.uniform_index(kNumAspects) : absent[rng.uniform_index(absent.size())];
      const auto& filler = spec.templates.sentences[filler_aspect][3];
      sentences.push_back(filler[rng.uniform_index(filler.size())]);
      rng.shuffle(std::span<std::string>(sentences));

      std::string text;
      for (const auto& sentence : sentences) {
        if (!text.empty()) text += ' ';
        text += capitalize(sentence) + '.';
      }
      const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
      ingest::Review review;
      std::snprintf(buf, sizeof(buf), "r%07zu", out.reviews.size());
      review.review_id = buf;
      labels.review_id = review.review_id;
      std::snprintf(buf, sizeof(buf), "u%06llu",
                    static_cast<unsigned long long>(rng.uniform_index(users)));
      review.user_id = buf;
      review.business_id = biz.business_id;
      review.stars = star_rating(spec.weights, s, noise);
      review.text = std::move(text);
      std::snprintf(buf, sizeof(buf), "2021-%02zu-%02zu", 1 + r % 12, 1 + (b + r) % 28);
      review.date = buf;
      stars.push_back(review.stars);
      out.reviews.push_back(std::move(review));
      out.labels.push_back(std::move(labels));
    }
    biz.overall_rating = business_rating(stars);
    out.businesses.push_back(std::move(biz));
  }
  out.truth = to_json(spec);
  return out;
}

std::string SynthOutput::reviews_jsonl() const {
  std::string s;
  for (const auto& r : reviews) {
    s += nlohmann::json{{"review_id", r.review_id}, {"user_id", r.user_id},
                        {"business_id", r.business_id}, {"stars", r.stars},
                        {"text", r.text}, {"date", r.date}}
             .dump();
    s += '\n';
  }
  return s;
}

std::string SynthOutput::business_jsonl() const {
  std::string s;
  for (const auto& b : businesses) {
    s += nlohmann::json{{"business_id", b.business_id}, {"name", b.name},
                        {"address", b.address},         {"city", b.city},
                        {"state", b.state},             {"postal_code", b.postal_code},
                        {"stars", b.overall_rating},    {"review_count", b.review_count},
                        {"categories", b.categories}}
             .dump();
    s += '\n';
  }
  return s;
}

std::string SynthOutput::labels_csv() const { return ingest::format_labels(labels); }

void write_synth(const std::filesystem::path& dir, const SynthOutput& out) {
  std::filesystem::create_directories(dir);
  write_file(dir / "reviews.json", out.reviews_jsonl());
  write_file(dir / "business.json", out.business_jsonl());
  write_file(dir / "labels.csv", out.labels_csv());
  write_file(dir / "truth.json", out.truth.dump(2) + "\n");
}

}  // namespace absa::testkit
