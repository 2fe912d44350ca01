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

#include "absa/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>

#include "absa/rng.h"
#include "absa/util.h"

namespace absa::classify {
namespace {

std::string with_aspect(Aspect a, const std::string& what) {
  return "aspect " + std::string(aspect_key(a)) + ": " + what;
}

FeatureMatrix rows_of(const FeatureMatrix& x, const std::vector<std::size_t>& idx) {
  FeatureMatrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

struct Prepared {
  FeatureMatrix x;
  std::vector<ingest::AspectLabelSet> labels;
  FeatureSpace space;
};

Prepared prepare(const std::vector<LabeledExample>& labeled) {
  if (labeled.empty()) throw Error("no labeled examples");
  Prepared p;
  std::vector<FeatureVector> rows;
  rows.reserve(labeled.size());
  for (const auto& e : labeled) {
    rows.push_back(e.features);
    p.labels.push_back(e.labels);
  }
  p.x = stack_features(rows);
  p.space = labeled.front().features.space;
  return p;
}

// Runs fn(aspect_index) for all aspects, in parallel when workers > 1.
std::vector<AspectModels> for_each_aspect(std::size_t workers,
                                          const std::function<AspectModels(std::size_t)>& fn) {
  std::vector<AspectModels> out(kNumAspects);
  if (workers <= 1) {
    for (std::size_t a = 0; a < kNumAspects; ++a) out[a] = fn(a);
    return out;
  }
  std::vector<std::future<AspectModels>> jobs;
  for (std::size_t a = 0; a < kNumAspects; ++a) {
    jobs.push_back(std::async(std::launch::async, fn, a));
  }
  for (std::size_t a = 0; a < kNumAspects; ++a) out[a] = jobs[a].get();
  return out;
}

ClassifierModel train_for_aspect(Aspect a, const PipelineOptions& opt, const FeatureMatrix& x,
                                 const std::vector<int>& y, FeatureSpace space,
                                 std::uint64_t seed) {
  try {
    return train_classifier(opt.kind, x, y, space, opt.hyperparams, seed);
  } catch (const Error& e) {
    throw Error(with_aspect(a, e.what()));
  }
}

}  // namespace

std::string_view architecture_name(Architecture a) {
  return a == Architecture::kOneStage ? "one_stage" : "two_stage";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "one_stage" || name == "one-stage") return Architecture::kOneStage;
  if (name == "two_stage" || name == "two-stage") return Architecture::kTwoStage;
  throw Error("unknown architecture '" + std::string(name) + "'");
}

Split stratified_split(const std::vector<ingest::AspectLabelSet>& labels,
                       double validation_fraction, std::uint64_t seed) {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error("validation fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = labels.size();
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n)));
  if (n_val == 0 || n_val >= n) {
    throw Error("cannot split " + std::to_string(n) + " rows with validation fraction " +
                format_fixed(validation_fraction, 3));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return labels[a].labels < labels[b].labels;
  });
  std::vector<char> is_val(n, 0);
  for (std::size_t j = 0; j < n_val; ++j) {
    const auto pos = static_cast<std::size_t>(
        std::floor((static_cast<double>(j) + 0.5) * static_cast<double>(n) / static_cast<double>(n_val)));
    is_val[order[std::min(pos, n - 1)]] = 1;
  }
  Split s;
  for (std::size_t i = 0; i < n; ++i) (is_val[i] ? s.validation : s.train).push_back(i);
  return s;
}

void AspectPipeline::validate() const {
  if (aspects.size() != kNumAspects) throw Error("pipeline must hold exactly six aspects");
  for (Aspect a : kAllAspects) {
    const auto& m = at(a);
    if (m.sentiment.num_features() != num_features) {
      throw Error(with_aspect(a, "sentiment model width differs from pipeline"));
    }
    const bool needs_relevance = architecture == Architecture::kTwoStage;
    if (needs_relevance != m.relevance.has_value()) {
      throw Error(with_aspect(a, needs_relevance ? "missing relevance model"
                                                 : "unexpected relevance model"));
    }
    if (m.relevance && m.relevance->num_features() != num_features) {
      throw Error(with_aspect(a, "relevance model width differs from pipeline"));
    }
  }
}

AspectPipeline train_one_stage(const std::vector<LabeledExample>& labeled, std::uint64_t seed,
                               const PipelineOptions& options) {
  const Prepared data = prepare(labeled);
  AspectPipeline p;
  p.architecture = Architecture::kOneStage;
  p.space = data.space;
  p.num_features = static_cast<std::size_t>(data.x.cols());
  p.seed = seed;
  p.split = stratified_split(data.labels, options.validation_fraction, seed);
  const FeatureMatrix x_train = rows_of(data.x, p.split.train);
  const Rng root(seed);
  p.aspects = for_each_aspect(options.workers, [&](std::size_t ai) {
    const Aspect a = kAllAspects[ai];
    std::vector<int> y;
    for (std::size_t i : p.split.train) y.push_back(sentiment_or_neutral(data.labels[i][a]));
    AspectModels m;
    m.sentiment = train_for_aspect(a, options, x_train, y, data.space, root.split(ai).next());
    return m;
  });
  p.validate();
  return p;
}

AspectPipeline train_two_stage(const std::vector<LabeledExample>& labeled, std::uint64_t seed,
                               const PipelineOptions& options) {
  const Prepared data = prepare(labeled);
  AspectPipeline p;
  p.architecture = Architecture::kTwoStage;
  p.space = data.space;
  p.num_features = static_cast<std::size_t>(data.x.cols());
  p.seed = seed;
  p.split = stratified_split(data.labels, options.validation_fraction, seed);
  const FeatureMatrix x_train = rows_of(data.x, p.split.train);
  const Rng root(seed);
  p.aspects = for_each_aspect(options.workers, [&](std::size_t ai) {
    const Aspect a = kAllAspects[ai];
    Rng rng = root.split(ai);
    std::vector<int> relevance;
    std::vector<std::size_t> relevant_rows;
    std::vector<int> sentiment;
    for (std::size_t i : p.split.train) {
      const AspectLabel l = data.labels[i][a];
      relevance.push_back(is_relevant(l) ? kRelevant : kIrrelevant);
      if (is_relevant(l)) {
        relevant_rows.push_back(i);
        sentiment.push_back(static_cast<int>(l));
      }
    }
    AspectModels m;
    m.relevance = train_for_aspect(a, options, x_train, relevance, data.space, rng.next());
    if (relevant_rows.empty()) throw Error(with_aspect(a, "no relevant training rows"));
    Dataset balanced;
    try {
      balanced = random_oversample(rows_of(data.x, relevant_rows), sentiment, rng.next());
    } catch (const Error& e) {
      throw Error(with_aspect(a, e.what()));
    }
    m.sentiment = train_for_aspect(a, options, balanced.x, balanced.y, data.space, rng.next());
    return m;
  });
  p.validate();
  return p;
}

AspectPipeline train_pipeline(Architecture arch, const std::vector<LabeledExample>& labeled,
                              std::uint64_t seed, const PipelineOptions& options) {
  return arch == Architecture::kOneStage ? train_one_stage(labeled, seed, options)
                                         : train_two_stage(labeled, seed, options);
}

std::vector<int> predict_sentiment_stage(const AspectPipeline& pipeline, Aspect aspect,
                                         const FeatureMatrix& x) {
  return predict_labels(pipeline.at(aspect).sentiment, x);
}

std::vector<int> predict_relevance(const AspectPipeline& pipeline, Aspect aspect,
                                   const FeatureMatrix& x) {
  const auto& m = pipeline.at(aspect);
  if (!m.relevance) throw Error("predict_relevance: pipeline has no relevance stage");
  return predict_labels(*m.relevance, x);
}

std::vector<std::array<int, kNumAspects>> predict_sentiments(const AspectPipeline& pipeline,
                                                             const FeatureMatrix& x) {
  std::vector<std::array<int, kNumAspects>> out(static_cast<std::size_t>(x.rows()));
  for (Aspect a : kAllAspects) {
    const auto sentiment = predict_sentiment_stage(pipeline, a, x);
    std::vector<int> relevance;
    if (pipeline.architecture == Architecture::kTwoStage) relevance = predict_relevance(pipeline, a, x);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const bool irrelevant = !relevance.empty() && relevance[i] == kIrrelevant;
      out[i][index_of(a)] = irrelevant ? 0 : sentiment[i];
    }
  }
  return out;
}

SentimentVector predict_sentiment_vector(const AspectPipeline& pipeline,
                                         const FeatureVector& review) {
  FeatureMatrix x = stack_features({review});
  SentimentVector v;
  v.values = predict_sentiments(pipeline, x).front();
  return v;
}

void save_pipeline(const std::filesystem::path& dir, const AspectPipeline& pipeline,
                   const nlohmann::json& extra) {
  pipeline.validate();
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = extra;
  manifest["architecture"] = architecture_name(pipeline.architecture);
  manifest["feature_space"] = feature_space_name(pipeline.space);
  manifest["num_features"] = pipeline.num_features;
  manifest["embedding_digest"] = pipeline.embedding_digest;
  manifest["seed"] = pipeline.seed;
  manifest["train_indices"] = pipeline.split.train;
  manifest["validation_indices"] = pipeline.split.validation;
  nlohmann::json files = nlohmann::json::object();
  for (Aspect a : kAllAspects) {
    const std::string key(aspect_key(a));
    const auto& m = pipeline.at(a);
    save_classifier(dir / (key + ".sentiment.json"), m.sentiment);
    nlohmann::json entry{{"sentiment", key + ".sentiment.json"}};
    if (m.relevance) {
      save_classifier(dir / (key + ".relevance.json"), *m.relevance);
      entry["relevance"] = key + ".relevance.json";
    }
    files[key] = entry;
  }
  manifest["models"] = files;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

AspectPipeline load_pipeline(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  auto j = nlohmann::json::parse(read_file(manifest_path), nullptr, false);
  if (j.is_discarded()) throw Error(manifest_path.string() + ": not valid JSON");
  AspectPipeline p;
  try {
    p.architecture = parse_architecture(j.at("architecture").get<std::string>());
    p.space = parse_feature_space(j.at("feature_space").get<std::string>());
    p.num_features = j.at("num_features").get<std::size_t>();
    p.embedding_digest = j.value("embedding_digest", std::string());
    p.seed = j.value("seed", std::uint64_t{0});
    p.split.train = j.value("train_indices", std::vector<std::size_t>{});
    p.split.validation = j.value("validation_indices", std::vector<std::size_t>{});
    for (Aspect a : kAllAspects) {
      const auto& entry = j.at("models").at(std::string(aspect_key(a)));
      AspectModels m;
      m.sentiment = load_classifier(dir / entry.at("sentiment").get<std::string>());
      if (entry.contains("relevance")) {
        m.relevance = load_classifier(dir / entry.at("relevance").get<std::string>());
      }
      p.aspects.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(manifest_path.string() + ": " + e.what());
  }
  p.validate();
  return p;
}

std::string prediction_csv_header() {
  std::string h = "review_id";
  for (Aspect a : kAllAspects) {
    h += ',';
    h += aspect_key(a);
  }
  return h;
}

std::string prediction_csv_row(const SentimentVector& v) {
  std::string row = csv_field(v.review_id);
  for (int s : v.values) {
    row += ',';
    row += std::to_string(s);
  }
  return row;
}

Featurizer embedding_featurizer(const vectorize::EmbeddingModel& model,
                                const textprep::Preprocessor& preprocessor) {
  return [&model, &preprocessor](const std::string& text) {
    return vectorize::embed_review(model, preprocessor.preprocess(text));
  };
}

PredictStats predict_corpus(const AspectPipeline& pipeline, const RecordSource& records,
                            const Featurizer& featurize, const std::filesystem::path& out,
                            std::size_t workers, std::size_t chunk_size) {
  pipeline.validate();
  workers = std::max<std::size_t>(workers, 1);
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const auto start = std::chrono::steady_clock::now();
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + out.string() + " for writing");
  std::uint64_t offset = 0;
  auto emit = [&](const std::string& line) {
    os << line << '\n';
    if (!os) throw Error(out.string() + ": write failed at byte offset " + std::to_string(offset));
    offset += line.size() + 1;
  };
  emit(prediction_csv_header());

  PredictStats stats;
  std::vector<ingest::CorpusRecord> chunk;
  auto flush = [&] {
    if (chunk.empty()) return;
    std::vector<std::string> lines(chunk.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
      if (lo == hi) return;
      std::vector<FeatureVector> rows;
      rows.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) rows.push_back(featurize(chunk[i].text));
      const auto preds = predict_sentiments(pipeline, stack_features(rows));
      for (std::size_t i = lo; i < hi; ++i) {
        lines[i] = prediction_csv_row(SentimentVector{chunk[i].review_id, preds[i - lo]});
      }
    };
    if (workers == 1) {
      work(0, chunk.size());
    } else {
      std::vector<std::future<void>> jobs;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = chunk.size() * w / workers;
        const std::size_t hi = chunk.size() * (w + 1) / workers;
        jobs.push_back(std::async(std::launch::async, work, lo, hi));
      }
      for (auto& j : jobs) j.get();
    }
    for (const auto& l : lines) emit(l);
    stats.rows += chunk.size();
    chunk.clear();
  };
  records([&](ingest::CorpusRecord&& r) {
    chunk.push_back(std::move(r));
    if (chunk.size() >= chunk_size) flush();
  });
  flush();
  os.close();
  if (!os) throw Error(out.string() + ": write failed at byte offset " + std::to_string(offset));
  stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log_event("predict_corpus", {{"rows", stats.rows},
                               {"seconds", stats.seconds},
                               {"rows_per_second",
                                stats.seconds > 0 ? stats.rows / stats.seconds : 0.0},
                               {"workers", workers}});
  return stats;
}

}  // namespace absa::classify
