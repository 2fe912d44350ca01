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

#include "cli.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "absa/aspects.h"
#include "absa/classifier.h"
#include "absa/common.h"
#include "absa/config.h"
#include "absa/embedding.h"
#include "absa/evaluate.h"
#include "absa/ingest.h"
#include "absa/lda.h"
#include "absa/pipeline.h"
#include "absa/regress.h"
#include "absa/testkit.h"
#include "absa/textprep.h"
#include "absa/util.h"
#include "json.hpp"

namespace absa::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for bad flag combinations and configuration problems (exit 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> workers;
  std::string out;
  std::vector<std::string> sets;
  std::string log_level = "info";
};

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::exists(path)) throw Error("missing input file: " + path);
}

void require_dir(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::is_directory(path)) throw Error("missing input directory: " + path);
}

std::string file_digest(const fs::path& p) { return hex_digest(fnv1a64(read_file(p))); }

// Everything a subcommand writes goes through here. Names are relative to
// --out; run.json lists each output with its content digest.
class OutputDir {
 public:
  OutputDir(const std::string& dir, const RunConfig& config, std::string command)
      : config_(config), command_(std::move(command)) {
    if (dir.empty()) throw UsageError("--out is required");
    root_ = dir;
    fs::create_directories(root_);
  }

  fs::path path(const std::string& name) {
    const fs::path rel(name);
    if (rel.is_absolute() || name.find("..") != std::string::npos) {
      throw Error("refusing to write outside --out: " + name);
    }
    const fs::path full = root_ / rel;
    if (full.has_parent_path()) fs::create_directories(full.parent_path());
    return full;
  }

  void write(const std::string& name, std::string_view contents) {
    write_file(path(name), contents);
    outputs_.push_back(name);
  }

  // JSON artifacts carry the config digest inline.
  void write_json(const std::string& name, json j) {
    j["config_digest"] = config_.digest();
    write(name, j.dump(2) + "\n");
  }

  // For files written by library code through path().
  void record(const std::string& name) { outputs_.push_back(name); }

  void add_input(const std::string& flag, const std::string& value) { inputs_[flag] = value; }

  void finish() {
    json outputs = json::array();
    std::sort(outputs_.begin(), outputs_.end());
    for (const auto& name : outputs_) {
      outputs.push_back({{"file", name}, {"digest", file_digest(root_ / name)}});
    }
    json run{{"command", command_},
             {"config_digest", config_.digest()},
             {"config", config_.effective()},
             {"inputs", inputs_},
             {"outputs", outputs}};
    write_file(root_ / "run.json", run.dump(2) + "\n");
    log_event("done", {{"command", command_}, {"outputs", outputs_.size()}});
  }

 private:
  const RunConfig& config_;
  std::string command_;
  fs::path root_;
  std::vector<std::string> outputs_;
  json inputs_ = json::object();
};

RunConfig build_config(const GlobalFlags& g, const std::vector<std::string>& command_sets) {
  RunConfig c = RunConfig::defaults();
  try {
    if (!g.config_path.empty()) {
      if (!fs::exists(g.config_path)) throw Error("missing input file: " + g.config_path);
      c.merge_file(g.config_path);
    }
    for (const auto& s : g.sets) c.set(s);
    for (const auto& s : command_sets) c.set(s);
    if (g.seed) c.set("seed=" + std::to_string(*g.seed));
    if (g.workers) {
      if (*g.workers == 0) throw UsageError("--workers must be at least 1");
      c.set("workers=" + std::to_string(*g.workers));
    }
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    if (std::string(e.what()).rfind("missing input file", 0) == 0) throw;
    throw UsageError(e.what());
  }
  return c;
}

textprep::Preprocessor make_preprocessor(const RunConfig& c) {
  auto opt = [&](const char* key) -> std::optional<fs::path> {
    const std::string v = c.get_string(key);
    if (v.empty()) return std::nullopt;
    if (!fs::exists(v)) throw Error("missing input file: " + v);
    return fs::path(v);
  };
  return textprep::Preprocessor::load(opt("textprep.stopwords"), opt("textprep.lemmas"));
}

vectorize::EmbeddingParams embedding_params(const RunConfig& c) {
  vectorize::EmbeddingParams p;
  p.dim = static_cast<std::uint32_t>(c.get_u64("embedding.dim"));
  p.min_n = static_cast<std::uint32_t>(c.get_u64("embedding.min_n"));
  p.max_n = static_cast<std::uint32_t>(c.get_u64("embedding.max_n"));
  p.window = static_cast<std::uint32_t>(c.get_u64("embedding.window"));
  p.epochs = static_cast<std::uint32_t>(c.get_u64("embedding.epochs"));
  p.lr = c.get_double("embedding.lr");
  p.negatives = static_cast<std::uint32_t>(c.get_u64("embedding.negatives"));
  p.min_count = static_cast<std::uint32_t>(c.get_u64("embedding.min_count"));
  p.bucket_count = static_cast<std::uint32_t>(c.get_u64("embedding.bucket_count"));
  try {
    p.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return p;
}

classify::Hyperparams hyperparams(const RunConfig& c) {
  classify::Hyperparams h;
  h.alpha = c.get_double("classify.alpha");
  h.lambda = c.get_double("classify.lambda");
  h.max_iterations = static_cast<int>(c.get_u64("classify.max_iterations"));
  h.tolerance = c.get_double("classify.tolerance");
  h.epochs = static_cast<int>(c.get_u64("classify.svm_epochs"));
  return h;
}

// Labeled reviews joined to their text, in label-file order.
struct LabeledCorpus {
  std::vector<ingest::AspectLabelSet> labels;
  std::vector<std::string> texts;
};

LabeledCorpus join_labels(const std::string& labels_path, const std::string& corpus_path) {
  LabeledCorpus lc;
  lc.labels = ingest::load_labels(labels_path);
  if (lc.labels.empty()) throw Error(labels_path + ": no labeled reviews");
  std::unordered_map<std::string, std::size_t> want;
  for (std::size_t i = 0; i < lc.labels.size(); ++i) {
    if (!want.emplace(lc.labels[i].review_id, i).second) {
      throw Error(labels_path + ": duplicate review_id " + lc.labels[i].review_id);
    }
  }
  lc.texts.assign(lc.labels.size(), {});
  std::vector<char> found(lc.labels.size(), 0);
  ingest::for_each_corpus_record(corpus_path, [&](ingest::CorpusRecord&& r) {
    auto it = want.find(r.review_id);
    if (it == want.end()) return;
    lc.texts[it->second] = std::move(r.text);
    found[it->second] = 1;
  });
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (!found[i]) {
      throw Error("labeled review " + lc.labels[i].review_id + " is not in " + corpus_path);
    }
  }
  return lc;
}

classify::FeatureMatrix embed_texts(const std::vector<std::string>& texts,
                                    const vectorize::EmbeddingModel& emb,
                                    const textprep::Preprocessor& pre) {
  const auto featurize = classify::embedding_featurizer(emb, pre);
  std::vector<FeatureVector> rows;
  rows.reserve(texts.size());
  for (const auto& t : texts) rows.push_back(featurize(t));
  return classify::stack_features(rows);
}

vectorize::EmbeddingModel load_embeddings(const std::string& path) {
  require_file(path, "--emb");
  auto m = vectorize::EmbeddingModel::load(path);
  log_event("embeddings_loaded", {{"path", path}, {"vocab", m.vocab().size()}, {"digest", m.digest()}});
  return m;
}

classify::AspectPipeline load_bundle(const std::string& dir, const std::string& flag,
                                     const vectorize::EmbeddingModel& emb) {
  require_dir(dir, flag);
  if (!fs::exists(fs::path(dir) / "manifest.json")) {
    throw Error("missing input file: " + (fs::path(dir) / "manifest.json").string());
  }
  auto p = classify::load_pipeline(dir);
  if (p.embedding_digest != emb.digest()) {
    throw Error(dir + ": model was trained on embeddings " + p.embedding_digest +
                ", got " + emb.digest());
  }
  return p;
}

// Validation rows of a bundle's split over the labeled corpus.
std::vector<std::size_t> validation_rows(const classify::AspectPipeline& p, std::size_t n,
                                         const std::string& dir) {
  const auto& v = p.split.validation;
  const std::size_t total = p.split.train.size() + v.size();
  if (total != n) {
    throw Error(dir + ": model was trained on " + std::to_string(total) +
                " labeled reviews, labels file has " + std::to_string(n));
  }
  if (v.empty()) throw Error(dir + ": model has an empty validation split");
  return v;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, const std::vector<std::size_t>& rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (std::size_t i : rows) out.push_back(v.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands. Each takes the parsed flags and returns normally on success.

struct IngestFlags {
  std::string reviews, business;
};

void cmd_ingest(const GlobalFlags& g, const IngestFlags& f) {
  require_file(f.reviews, "--reviews");
  require_file(f.business, "--business");
  const RunConfig cfg = build_config(g, {});
  OutputDir out(g.out, cfg, "ingest");
  out.add_input("reviews", f.reviews);
  out.add_input("business", f.business);

  const fs::path corpus_path = out.path("corpus.jsonl");
  std::ofstream corpus(corpus_path, std::ios::binary);
  if (!corpus) throw Error("cannot write " + corpus_path.string());
  ingest::CorpusStatsAccumulator stats;
  const auto diag = ingest::parse_corpus(f.reviews, f.business, [&](ingest::CorpusRecord&& r) {
    stats.add(r);
    corpus << ingest::to_json(r).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  });
  corpus.close();
  if (!corpus) throw Error("write failed for " + corpus_path.string());
  out.record("corpus.jsonl");

  json d{{"business_lines", diag.business_lines},
         {"business_malformed", diag.business_malformed},
         {"restaurants", diag.restaurants},
         {"businesses_missing_state", diag.businesses_missing_state},
         {"review_lines", diag.review_lines},
         {"review_malformed", diag.review_malformed},
         {"unknown_business", diag.unknown_business},
         {"non_restaurant", diag.non_restaurant},
         {"emitted", diag.emitted}};
  const auto s = stats.finish();
  out.write_json("stats.json", {{"artifact", "corpus_stats"},
                                {"stats", ingest::to_json(s)},
                                {"diagnostics", d}});
  log_event("ingest", {{"reviews", s.reviews}, {"businesses", s.businesses}, {"users", s.users}});
  out.finish();
}

struct SampleFlags {
  std::string corpus;
  std::optional<std::size_t> n;
  std::optional<std::size_t> businesses, per;
  std::string state;
};

void cmd_sample(const GlobalFlags& g, const SampleFlags& f) {
  require_file(f.corpus, "--corpus");
  if (f.n.has_value() == (f.businesses.has_value() || f.per.has_value())) {
    throw UsageError("sample: give either --n or --businesses with --per");
  }
  if (f.businesses.has_value() != f.per.has_value()) {
    throw UsageError("sample: --businesses and --per go together");
  }
  if (!f.state.empty() && f.n) throw UsageError("sample: --state applies to --businesses");
  const RunConfig cfg = build_config(g, {});
  OutputDir out(g.out, cfg, "sample");
  out.add_input("corpus", f.corpus);
  const auto corpus = ingest::read_corpus_jsonl(f.corpus);
  ingest::SampleStrategy strategy;
  if (f.n) {
    strategy = ingest::UniformSample{*f.n};
  } else {
    ingest::PerBusinessSample s{*f.businesses, *f.per, std::nullopt};
    if (!f.state.empty()) s.state = f.state;
    strategy = s;
  }
  const auto sample = ingest::sample_reviews(corpus, strategy, cfg.get_u64("seed"));
  ingest::write_corpus_jsonl(out.path("sample.jsonl"), sample);
  out.record("sample.jsonl");
  log_event("sample", {{"population", corpus.size()}, {"sampled", sample.size()}});
  out.finish();
}

struct SynthFlags {
  std::optional<std::size_t> businesses, per;
  std::optional<double> noise;
  bool lexical_overlap = false;
};

void cmd_synth(const GlobalFlags& g, const SynthFlags& f) {
  std::vector<std::string> sets;
  if (f.businesses) sets.push_back("synth.businesses=" + std::to_string(*f.businesses));
  if (f.per) sets.push_back("synth.per=" + std::to_string(*f.per));
  if (f.noise) sets.push_back("synth.noise_sigma=" + format_roundtrip(*f.noise));
  if (f.lexical_overlap) sets.push_back("synth.lexical_overlap=true");
  const RunConfig cfg = build_config(g, sets);

  testkit::SynthSpec spec;
  spec.n_businesses = cfg.get_u64("synth.businesses");
  spec.reviews_per_business = cfg.get_u64("synth.per");
  spec.noise_sigma = cfg.get_double("synth.noise_sigma");
  spec.neutral_share = cfg.get_double("synth.neutral_share");
  spec.lean_range = cfg.get_double("synth.lean_range");
  spec.seed = cfg.get_u64("seed");
  for (Aspect a : kAllAspects) {
    const std::string k(aspect_key(a));
    spec.weights[index_of(a)] = cfg.get_double("synth.weights." + k);
    spec.presence[index_of(a)] = cfg.get_double("synth.presence." + k);
  }
  if (cfg.get_bool("synth.lexical_overlap")) spec.templates = testkit::TemplateBank::lexical_overlap();
  try {
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  OutputDir out(g.out, cfg, "synth");
  const auto data = testkit::generate(spec);
  out.write("reviews.json", data.reviews_jsonl());
  out.write("business.json", data.business_jsonl());
  out.write("labels.csv", data.labels_csv());
  out.write_json("truth.json", {{"artifact", "synth_truth"}, {"truth", data.truth}});
  log_event("synth", {{"businesses", data.businesses.size()}, {"reviews", data.reviews.size()}});
  out.finish();
}

struct PromptFlags {
  std::string corpus;
  bool per_business = false;
};

void cmd_prompt(const GlobalFlags& g, const PromptFlags& f) {
  require_file(f.corpus, "--corpus");
  const RunConfig cfg = build_config(g, {});
  OutputDir out(g.out, cfg, "prompt");
  out.add_input("corpus", f.corpus);
  const auto corpus = ingest::read_corpus_jsonl(f.corpus);
  if (corpus.empty()) throw Error(f.corpus + ": no reviews");
  if (!f.per_business) {
    out.write("prompt.txt", aspects::emit_prompt(corpus));
  } else {
    std::map<std::string, std::vector<ingest::CorpusRecord>> by_business;
    for (const auto& r : corpus) by_business[r.business_id].push_back(r);
    for (const auto& [id, reviews] : by_business) {
      out.write("prompts/" + id + ".txt", aspects::emit_prompt(reviews));
    }
  }
  out.finish();
}

struct AgreeFlags {
  std::string a, b;
};

void cmd_aspects_agree(const GlobalFlags& g, const AgreeFlags& f) {
  require_file(f.a, "--a");
  require_file(f.b, "--b");
  const RunConfig cfg = build_config(g, {});
  OutputDir out(g.out, cfg, "aspects-agree");
  out.add_input("a", f.a);
  out.add_input("b", f.b);
  const auto rows = aspects::aspect_agreement(aspects::load_responses(f.a),
                                              aspects::load_responses(f.b));
  out.write("aspect_agreement.csv", aspects::agreement_csv(rows));
  json j = json::array();
  for (const auto& r : rows) {
    j.push_back({{"aspect", r.aspect},
                 {"businesses", r.businesses},
                 {"either", r.either},
                 {"both", r.both},
                 {"occurrence_pct", r.occurrence_pct},
                 {"agreement_pct", r.agreement_pct ? json(*r.agreement_pct) : json(nullptr)}});
  }
  out.write_json("aspect_agreement.json", {{"artifact", "aspect_agreement"}, {"rows", j}});
  out.finish();
}

struct EmbFlags {
  std::string corpus;
};

void cmd_train_embeddings(const GlobalFlags& g, const EmbFlags& f) {
  require_file(f.corpus, "--corpus");
  const RunConfig cfg = build_config(g, {});
  const auto params = embedding_params(cfg);
  const auto pre = make_preprocessor(cfg);
  OutputDir out(g.out, cfg, "train-embeddings");
  out.add_input("corpus", f.corpus);

  const vectorize::CorpusSource source = [&](const auto& visit) {
    ingest::for_each_corpus_record(f.corpus, [&](ingest::CorpusRecord&& r) {
      visit(pre.preprocess(r.text));
    });
  };
  vectorize::TrainingOptions opts;
  opts.report_every = 20000;
  opts.on_progress = [](const vectorize::EmbeddingModel&, const vectorize::TrainingProgress& p) {
    log_event("embedding_progress", {{"epoch", p.epoch},
                                     {"tokens", p.tokens_processed},
                                     {"mean_loss", p.mean_loss}});
  };
  const auto model = vectorize::train_embeddings(source, params, cfg.get_u64("seed"), opts);
  model.save(out.path("embeddings.bin"));
  out.record("embeddings.bin");
  out.write_json("embeddings.json", {{"artifact", "embeddings"},
                                     {"params", vectorize::to_json(params)},
                                     {"seed", cfg.get_u64("seed")},
                                     {"vocab_size", model.vocab().size()},
                                     {"digest", model.digest()}});
  out.finish();
}

struct TrainFlags {
  std::string arch, labels, corpus, emb, kind;
};

void cmd_train(const GlobalFlags& g, const TrainFlags& f) {
  if (f.arch.empty()) throw UsageError("--arch is required");
  classify::Architecture arch;
  try {
    arch = classify::parse_architecture(f.arch);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  require_file(f.labels, "--labels");
  require_file(f.corpus, "--corpus");
  std::vector<std::string> sets;
  if (!f.kind.empty()) sets.push_back("classify.kind=" + f.kind);
  const RunConfig cfg = build_config(g, sets);
  classify::PipelineOptions opts;
  try {
    opts.kind = classify::parse_kind(cfg.get_string("classify.kind"));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  opts.hyperparams = hyperparams(cfg);
  opts.validation_fraction = cfg.get_double("classify.validation_fraction");
  opts.workers = cfg.get_u64("workers");
  const auto emb = load_embeddings(f.emb);
  const auto pre = make_preprocessor(cfg);

  const auto lc = join_labels(f.labels, f.corpus);
  const auto x = embed_texts(lc.texts, emb, pre);
  std::vector<classify::LabeledExample> examples;
  examples.reserve(lc.labels.size());
  for (std::size_t i = 0; i < lc.labels.size(); ++i) {
    FeatureVector fv{FeatureSpace::kEmbedding,
                     std::vector<double>(x.row(static_cast<Eigen::Index>(i)).begin(),
                                         x.row(static_cast<Eigen::Index>(i)).end())};
    examples.push_back({std::move(fv), lc.labels[i]});
  }
  auto pipeline = classify::train_pipeline(arch, examples, cfg.get_u64("seed"), opts);
  pipeline.embedding_digest = emb.digest();

  OutputDir out(g.out, cfg, "train");
  out.add_input("labels", f.labels);
  out.add_input("corpus", f.corpus);
  out.add_input("emb", f.emb);
  classify::save_pipeline(out.path("manifest.json").parent_path(), pipeline,
                          {{"config_digest", cfg.digest()},
                           {"labels_digest", file_digest(f.labels)}});
  out.record("manifest.json");
  for (Aspect a : kAllAspects) {
    const std::string k(aspect_key(a));
    out.record(k + ".sentiment.json");
    if (arch == classify::Architecture::kTwoStage) out.record(k + ".relevance.json");
  }
  log_event("train", {{"architecture", classify::architecture_name(arch)},
                      {"labeled", examples.size()},
                      {"validation", pipeline.split.validation.size()}});
  out.finish();
}

struct PredictFlags {
  std::string model, corpus, emb;
};

void cmd_predict(const GlobalFlags& g, const PredictFlags& f) {
  require_file(f.corpus, "--corpus");
  const RunConfig cfg = build_config(g, {});
  const auto emb = load_embeddings(f.emb);
  const auto pipeline = load_bundle(f.model, "--model", emb);
  const auto pre = make_preprocessor(cfg);
  OutputDir out(g.out, cfg, "predict");
  out.add_input("model", f.model);
  out.add_input("corpus", f.corpus);
  out.add_input("emb", f.emb);
  const classify::RecordSource records = [&](const auto& sink) {
    ingest::for_each_corpus_record(f.corpus, sink);
  };
  const auto stats = classify::predict_corpus(
      pipeline, records, classify::embedding_featurizer(emb, pre), out.path("predictions.csv"),
      cfg.get_u64("workers"), cfg.get_u64("predict.chunk_size"));
  out.record("predictions.csv");
  log_event("predict", {{"rows", stats.rows}, {"seconds", stats.seconds}});
  out.finish();
}

struct EvaluateFlags {
  std::string model, labels, corpus, emb;
  std::vector<std::string> annotators;
  bool select = false;
};

std::vector<int> class_list(bool relevance) {
  return relevance ? std::vector<int>{kIrrelevant, kRelevant} : std::vector<int>{-1, 0, 1};
}

void evaluate_bundle(const GlobalFlags& g, const EvaluateFlags& f, const RunConfig& cfg) {
  require_file(f.labels, "--labels");
  require_file(f.corpus, "--corpus");
  const auto emb = load_embeddings(f.emb);
  const auto pipeline = load_bundle(f.model, "--model", emb);
  const auto pre = make_preprocessor(cfg);
  const auto lc = join_labels(f.labels, f.corpus);
  const auto rows = validation_rows(pipeline, lc.labels.size(), f.model);
  const auto x = embed_texts(take(lc.texts, rows), emb, pre);
  const auto evals = evaluate::evaluate_pipeline(pipeline, x, take(lc.labels, rows));

  OutputDir out(g.out, cfg, "evaluate");
  out.add_input("model", f.model);
  out.add_input("labels", f.labels);
  out.add_input("corpus", f.corpus);
  out.add_input("emb", f.emb);
  const std::string arch(classify::architecture_name(pipeline.architecture));
  out.write_json("evaluation.json", {{"artifact", "evaluation"},
                                     {"architecture", arch},
                                     {"rows", rows.size()},
                                     {"aspects", evaluate::to_json(evals)}});
  auto gather = [&](auto pick) {
    std::vector<evaluate::ClassificationReport> v;
    for (const auto& e : evals) v.push_back(pick(e));
    return v;
  };
  out.write("metrics_overall.csv",
            evaluate::metrics_table_csv(gather([](const auto& e) { return e.overall; }),
                                        class_list(false)));
  if (pipeline.architecture == classify::Architecture::kTwoStage) {
    out.write("metrics_relevance.csv",
              evaluate::metrics_table_csv(gather([](const auto& e) { return *e.relevance; }),
                                          class_list(true)));
    out.write("metrics_sentiment.csv",
              evaluate::metrics_table_csv(gather([](const auto& e) { return *e.sentiment; }),
                                          class_list(false)));
  }
  json acc = json::object();
  for (const auto& e : evals) acc[std::string(aspect_key(e.aspect))] = e.overall.accuracy;
  log_event("evaluate", {{"architecture", arch}, {"accuracy", acc}});
  out.finish();
}

json pearson_json(const evaluate::PearsonReport& p) {
  json m = json::array();
  for (const auto& row : p.matrix) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
    m.push_back(r);
  }
  json pairs = json::array();
  for (const auto& pc : p.pairs) {
    pairs.push_back({{"a", pc.a},
                     {"b", pc.b},
                     {"complete", pc.complete},
                     {"r", pc.r ? json(*pc.r) : json(nullptr)},
                     {"p", pc.p ? json(*pc.p) : json(nullptr)}});
  }
  return {{"matrix", m}, {"pairs", pairs}, {"mean_r", p.mean_r ? json(*p.mean_r) : json(nullptr)}};
}

void evaluate_annotators(const GlobalFlags& g, const EvaluateFlags& f, const RunConfig& cfg) {
  if (f.annotators.size() < 2) throw UsageError("--annotators needs at least two label files");
  std::vector<std::vector<ingest::AspectLabelSet>> raters;
  for (const auto& p : f.annotators) {
    require_file(p, "--annotators");
    raters.push_back(ingest::load_labels(p));
  }
  const auto report = evaluate::agreement_report(raters);
  OutputDir out(g.out, cfg, "evaluate");
  for (std::size_t i = 0; i < f.annotators.size(); ++i) {
    out.add_input("annotator_" + std::to_string(i + 1), f.annotators[i]);
  }
  json aspects_j = json::array();
  std::ostringstream kappa_csv, pearson_csv;
  kappa_csv << "aspect,observed,expected,kappa\n";
  pearson_csv << "aspect,rater_a,rater_b,complete,r,p\n";
  for (const auto& a : report) {
    const std::string key(aspect_key(a.aspect));
    aspects_j.push_back({{"aspect", key},
                         {"kappa",
                          {{"observed", a.kappa.observed},
                           {"expected", a.kappa.expected},
                           {"kappa", a.kappa.kappa}}},
                         {"pearson", pearson_json(a.pearson)}});
    kappa_csv << key << ',' << format_roundtrip(a.kappa.observed) << ','
              << format_roundtrip(a.kappa.expected) << ',' << format_roundtrip(a.kappa.kappa)
              << '\n';
    for (const auto& pc : a.pearson.pairs) {
      pearson_csv << key << ',' << pc.a + 1 << ',' << pc.b + 1 << ',' << pc.complete << ','
                  << (pc.r ? format_roundtrip(*pc.r) : "") << ','
                  << (pc.p ? format_roundtrip(*pc.p) : "") << '\n';
    }
  }
  out.write_json("agreement.json", {{"artifact", "annotator_agreement"},
                                    {"raters", f.annotators.size()},
                                    {"aspects", aspects_j}});
  out.write("kappa.csv", kappa_csv.str());
  out.write("pearson.csv", pearson_csv.str());
  out.finish();
}

void evaluate_selection(const GlobalFlags& g, const EvaluateFlags& f, const RunConfig& cfg) {
  require_file(f.labels, "--labels");
  require_file(f.corpus, "--corpus");
  const auto emb = load_embeddings(f.emb);
  const auto pre = make_preprocessor(cfg);
  const auto lc = join_labels(f.labels, f.corpus);
  std::vector<textprep::TokenList> docs;
  std::vector<FeatureVector> embedded;
  for (const auto& t : lc.texts) {
    docs.push_back(pre.preprocess(t));
    embedded.push_back(vectorize::embed_review(emb, docs.back()));
  }
  const std::uint64_t seed = cfg.get_u64("seed");
  const auto split =
      classify::stratified_split(lc.labels, cfg.get_double("classify.validation_fraction"), seed);
  const auto results = evaluate::model_selection(docs, embedded, lc.labels, split, seed);

  OutputDir out(g.out, cfg, "evaluate");
  out.add_input("labels", f.labels);
  out.add_input("corpus", f.corpus);
  out.add_input("emb", f.emb);
  std::ostringstream csv;
  csv << "classifier,features,aspect,accuracy,macro_f1,error\n";
  json rows = json::array();
  for (const auto& r : results) {
    std::optional<double> macro;
    if (r.report) {
      double s = 0.0;
      for (const auto& c : r.report->classes) s += c.f1;
      macro = r.report->classes.empty() ? 0.0 : s / static_cast<double>(r.report->classes.size());
    }
    csv << r.classifier << ',' << r.features << ',' << aspect_key(r.aspect) << ','
        << (r.report ? format_roundtrip(r.report->accuracy) : "") << ','
        << (macro ? format_roundtrip(*macro) : "") << ',' << csv_field(r.error) << '\n';
    rows.push_back({{"classifier", r.classifier},
                    {"features", r.features},
                    {"aspect", aspect_key(r.aspect)},
                    {"report", r.report ? evaluate::to_json(*r.report) : json(nullptr)},
                    {"error", r.error}});
  }
  out.write("model_selection.csv", csv.str());
  out.write_json("model_selection.json", {{"artifact", "model_selection"}, {"results", rows}});
  out.finish();
}

void cmd_evaluate(const GlobalFlags& g, const EvaluateFlags& f) {
  const int modes = static_cast<int>(!f.model.empty()) + static_cast<int>(!f.annotators.empty()) +
                    static_cast<int>(f.select);
  if (modes != 1) throw UsageError("evaluate: give exactly one of --model, --annotators, --select");
  const RunConfig cfg = build_config(g, {});
  if (!f.model.empty()) {
    evaluate_bundle(g, f, cfg);
  } else if (!f.annotators.empty()) {
    evaluate_annotators(g, f, cfg);
  } else {
    evaluate_selection(g, f, cfg);
  }
}

struct CompareFlags {
  std::string one_stage, two_stage, labels, corpus, emb;
};

void cmd_compare(const GlobalFlags& g, const CompareFlags& f) {
  require_file(f.labels, "--labels");
  require_file(f.corpus, "--corpus");
  const RunConfig cfg = build_config(g, {});
  const auto emb = load_embeddings(f.emb);
  const auto one = load_bundle(f.one_stage, "--one-stage", emb);
  const auto two = load_bundle(f.two_stage, "--two-stage", emb);
  if (one.architecture != classify::Architecture::kOneStage) {
    throw Error(f.one_stage + ": not a one-stage model");
  }
  if (two.architecture != classify::Architecture::kTwoStage) {
    throw Error(f.two_stage + ": not a two-stage model");
  }
  const auto lc = join_labels(f.labels, f.corpus);
  const auto rows = validation_rows(one, lc.labels.size(), f.one_stage);
  if (two.split.validation != rows) {
    throw Error("the two models were trained with different validation splits");
  }
  const auto pre = make_preprocessor(cfg);
  const auto x = embed_texts(take(lc.texts, rows), emb, pre);
  const auto cmp = evaluate::compare_architectures(one, two, x, take(lc.labels, rows));

  OutputDir out(g.out, cfg, "compare");
  out.add_input("one_stage", f.one_stage);
  out.add_input("two_stage", f.two_stage);
  out.add_input("labels", f.labels);
  out.add_input("corpus", f.corpus);
  out.add_input("emb", f.emb);
  std::ostringstream csv;
  csv << "aspect,relevant_rows,n01,n10,chi_square,z,one_sided_p\n";
  json j = json::array();
  for (const auto& c : cmp) {
    const std::string key(aspect_key(c.aspect));
    json entry{{"aspect", key}, {"relevant_rows", c.relevant_rows}};
    csv << key << ',' << c.relevant_rows;
    if (c.result) {
      entry["n01"] = c.result->n01;
      entry["n10"] = c.result->n10;
      entry["chi_square"] = c.result->chi_square;
      entry["z"] = c.result->z;
      entry["one_sided_p"] = c.result->one_sided_p;
      csv << ',' << c.result->n01 << ',' << c.result->n10 << ','
          << format_roundtrip(c.result->chi_square) << ',' << format_roundtrip(c.result->z) << ','
          << format_roundtrip(c.result->one_sided_p) << '\n';
    } else {
      csv << ",,,,,\n";
    }
    j.push_back(entry);
  }
  out.write("mcnemar.csv", csv.str());
  out.write_json("comparison.json", {{"artifact", "comparison"}, {"aspects", j}});
  out.finish();
}

struct AggregateFlags {
  std::string predictions, labels, corpus;
};

void cmd_aggregate(const GlobalFlags& g, const AggregateFlags& f) {
  if (f.predictions.empty() == f.labels.empty()) {
    throw UsageError("aggregate: give exactly one of --predictions or --labels");
  }
  require_file(f.corpus, "--corpus");
  const RunConfig cfg = build_config(g, {});
  regress::AggregateDiagnostics diag;
  std::vector<regress::RestaurantAggregate> rows;
  if (!f.predictions.empty()) {
    require_file(f.predictions, "--predictions");
    rows = regress::aggregate_restaurants(fs::path(f.predictions), fs::path(f.corpus), &diag);
  } else {
    require_file(f.labels, "--labels");
    const auto truth = regress::labels_as_sentiments(ingest::load_labels(f.labels));
    rows = regress::aggregate_restaurants(truth, ingest::read_corpus_jsonl(f.corpus), &diag);
  }
  OutputDir out(g.out, cfg, "aggregate");
  out.add_input(f.predictions.empty() ? "labels" : "predictions",
                f.predictions.empty() ? f.labels : f.predictions);
  out.add_input("corpus", f.corpus);
  out.write("aggregates.csv", regress::aggregates_csv(rows));
  log_event("aggregate", {{"restaurants", rows.size()},
                          {"rows", diag.prediction_rows},
                          {"unknown_reviews", diag.unknown_reviews}});
  out.finish();
}

struct RegressFlags {
  std::string aggregates;
  std::vector<int> specs;
  std::string title = "Aspect effects on restaurant rating";
};

void cmd_regress(const GlobalFlags& g, const RegressFlags& f) {
  require_file(f.aggregates, "--aggregates");
  for (int s : f.specs) {
    if (s < 1 || s > 4) throw UsageError("--spec must be 1, 2, 3 or 4");
  }
  const RunConfig cfg = build_config(g, {});
  const auto rows = regress::read_aggregates(f.aggregates);
  std::vector<regress::RegressionReport> reports;
  if (f.specs.empty()) {
    reports = regress::run_model_suite(rows);
  } else {
    std::set<int> uniq(f.specs.begin(), f.specs.end());
    for (int s : uniq) reports.push_back(regress::run_model(rows, s));
  }
  OutputDir out(g.out, cfg, "regress");
  out.add_input("aggregates", f.aggregates);
  json models = json::array();
  for (const auto& r : reports) {
    models.push_back(regress::to_json(r));
    out.write("coefficients_model" + std::to_string(r.spec) + ".csv", regress::coefficients_csv(r));
    log_event("regress", {{"spec", r.spec}, {"n", r.fit.n}, {"r_squared", r.fit.r_squared}});
  }
  out.write_json("regression.json",
                 {{"artifact", "regression"}, {"title", f.title}, {"models", models}});
  out.write("regression.md", regress::regression_markdown(f.title, reports));
  out.write("effects.csv", regress::effect_plot_csv(reports));
  out.finish();
}

struct LdaFlags {
  std::string corpus, mode;
  std::optional<std::size_t> topics;
};

void cmd_lda(const GlobalFlags& g, const LdaFlags& f) {
  require_file(f.corpus, "--corpus");
  std::vector<std::string> sets;
  if (!f.mode.empty()) sets.push_back("lda.mode=" + f.mode);
  if (f.topics) sets.push_back("lda.topics=" + std::to_string(*f.topics));
  const RunConfig cfg = build_config(g, sets);
  const std::string mode = cfg.get_string("lda.mode");
  if (mode != "per_restaurant" && mode != "pooled") {
    throw UsageError("lda.mode must be per_restaurant or pooled");
  }
  lda::LdaParams params;
  params.topics = cfg.get_u64("lda.topics");
  params.alpha = cfg.get_double("lda.alpha");
  params.beta = cfg.get_double("lda.beta");
  params.iterations = cfg.get_u64("lda.iterations");
  if (params.topics == 0 || params.alpha <= 0 || params.beta <= 0) {
    throw UsageError("lda: topics, alpha and beta must be positive");
  }
  const std::size_t k_words = cfg.get_u64("lda.top_words");
  const std::uint64_t seed = cfg.get_u64("seed");
  const auto pre = make_preprocessor(cfg);
  const auto corpus = ingest::read_corpus_jsonl(f.corpus);
  auto groups = lda::group_by_sentiment(corpus);
  if (mode == "pooled") {
    for (auto& group : groups) {
      std::vector<std::size_t> all;
      for (const auto& [id, idx] : group) all.insert(all.end(), idx.begin(), idx.end());
      std::sort(all.begin(), all.end());
      group.clear();
      if (!all.empty()) group["*"] = std::move(all);
    }
  }

  OutputDir out(g.out, cfg, "lda");
  out.add_input("corpus", f.corpus);
  std::ostringstream lines;
  std::size_t fitted = 0, skipped = 0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto group = static_cast<lda::SentimentGroup>(gi);
    for (const auto& [business, indices] : groups[gi]) {
      std::vector<textprep::TokenList> docs;
      std::size_t tokens = 0;
      for (std::size_t i : indices) {
        docs.push_back(pre.preprocess(corpus[i].text));
        tokens += docs.back().size();
      }
      if (tokens == 0) {
        ++skipped;
        continue;
      }
      const std::uint64_t run_seed =
          seed ^ fnv1a64(std::string(lda::group_name(group)) + "/" + business);
      const auto model = lda::fit_lda(docs, params, run_seed);
      json j = lda::topics_json(group, business, lda::top_words(model, k_words));
      j["documents"] = docs.size();
      j["log_likelihood"] = model.log_likelihood();
      lines << j.dump() << '\n';
      ++fitted;
    }
  }
  out.write("topics.jsonl", lines.str());
  out.write_json("lda.json", {{"artifact", "lda"},
                              {"mode", mode},
                              {"params", lda::to_json(params)},
                              {"models", fitted},
                              {"skipped_empty", skipped}});
  log_event("lda", {{"models", fitted}, {"skipped_empty", skipped}});
  out.finish();
}

// ---------------------------------------------------------------------------
// report

struct ReportFlags {
  std::string artifacts;
};

std::string aspect_cell(const json& entry) {
  const std::string key = entry.at("aspect").get<std::string>();
  const auto a = parse_aspect_key(key);
  if (!a) throw Error("unknown aspect in artifact: " + key);
  return std::string(aspect_title(*a));
}

std::string kappa_markdown(const json& agreement) {
  std::ostringstream os;
  os << "**Fleiss' kappa by aspect**\n\n| Aspect | P_o | P_e | Kappa |\n|---|---|---|---|\n";
  for (const auto& a : agreement.at("aspects")) {
    const auto& k = a.at("kappa");
    os << "| " << aspect_cell(a) << " | "
       << format_fixed(k.at("observed").get<double>(), 3) << " | "
       << format_fixed(k.at("expected").get<double>(), 3) << " | "
       << format_fixed(k.at("kappa").get<double>(), 3) << " |\n";
  }
  return os.str();
}

std::string p_stars(const json& p) {
  return p.is_null() ? "" : regress::significance_stars(p.get<double>());
}

// One block per aspect: upper-triangular rater correlations with stars.
std::string pearson_markdown(const json& agreement) {
  std::ostringstream os;
  const std::size_t raters = agreement.at("raters").get<std::size_t>();
  os << "**Pairwise Pearson correlation between annotators**\n\n| Aspect | Rater |";
  for (std::size_t b = 1; b <= raters; ++b) os << " A" << b << " |";
  os << " Mean r |\n|---|---|";
  for (std::size_t b = 0; b <= raters; ++b) os << "---|";
  os << '\n';
  for (const auto& a : agreement.at("aspects")) {
    const auto& pear = a.at("pearson");
    std::map<std::pair<std::size_t, std::size_t>, const json*> pairs;
    for (const auto& pc : pear.at("pairs")) {
      pairs[{pc.at("a").get<std::size_t>(), pc.at("b").get<std::size_t>()}] = &pc;
    }
    for (std::size_t r = 0; r < raters; ++r) {
      os << "| " << (r == 0 ? aspect_cell(a)
                            : std::string())
         << " | A" << r + 1 << " |";
      for (std::size_t c = 0; c < raters; ++c) {
        if (c < r) {
          os << "  |";
        } else if (c == r) {
          os << " 1 |";
        } else {
          const json* pc = pairs.count({r, c}) ? pairs[{r, c}] : nullptr;
          if (pc == nullptr || pc->at("r").is_null()) {
            os << ' ' << aspects::kUndefinedCell << " |";
          } else {
            os << ' ' << format_fixed(pc->at("r").get<double>(), 3) << p_stars(pc->at("p")) << " |";
          }
        }
      }
      if (r == 0) {
        const auto& m = pear.at("mean_r");
        os << ' ' << (m.is_null() ? std::string(aspects::kUndefinedCell)
                                  : format_fixed(m.get<double>(), 3))
           << " |";
      } else {
        os << "  |";
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string mcnemar_markdown(const json& comparison) {
  std::ostringstream os;
  os << "**McNemar test, one-stage vs two-stage sentiment (relevant reviews)**\n\n"
     << "| Aspect | Relevant | One-stage only correct | Two-stage only correct | Chi-square "
        "| z | One-sided p |\n|---|---|---|---|---|---|---|\n";
  for (const auto& a : comparison.at("aspects")) {
    os << "| " << aspect_cell(a) << " | "
       << a.at("relevant_rows").get<std::size_t>() << " | ";
    if (a.contains("n01")) {
      os << a.at("n10").get<std::size_t>() << " | " << a.at("n01").get<std::size_t>() << " | "
         << format_fixed(a.at("chi_square").get<double>(), 3) << " | "
         << format_fixed(a.at("z").get<double>(), 3) << " | "
         << format_fixed(a.at("one_sided_p").get<double>(), 4)
         << regress::significance_stars(a.at("one_sided_p").get<double>()) << " |\n";
    } else {
      const std::string u(aspects::kUndefinedCell);
      os << u << " | " << u << " | " << u << " | " << u << " | " << u << " |\n";
    }
  }
  return os.str();
}

std::string aspect_agreement_markdown(const json& agreement) {
  std::ostringstream os;
  os << "**Aspect occurrence and agreement between models**\n\n"
     << "| Aspect | Occurrence (%) | Agreement (%) |\n|---|---|---|\n";
  for (const auto& r : agreement.at("rows")) {
    const auto& ag = r.at("agreement_pct");
    os << "| " << r.at("aspect").get<std::string>() << " | "
       << format_fixed(r.at("occurrence_pct").get<double>(), 1) << " | "
       << (ag.is_null() ? std::string(aspects::kUndefinedCell) : format_fixed(ag.get<double>(), 1))
       << " |\n";
  }
  return os.str();
}

struct Artifact {
  fs::path path;
  json body;
};

void cmd_report(const GlobalFlags& g, const ReportFlags& f) {
  require_dir(f.artifacts, "--artifacts");
  const RunConfig cfg = build_config(g, {});

  std::vector<fs::path> candidates;
  for (const auto& entry : fs::recursive_directory_iterator(f.artifacts)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      candidates.push_back(entry.path());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::map<std::string, std::vector<Artifact>> by_kind;
  for (const auto& p : candidates) {
    auto j = json::parse(read_file(p), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("artifact")) continue;
    by_kind[j.at("artifact").get<std::string>()].push_back({p, std::move(j)});
  }
  if (!by_kind.count("evaluation") && !by_kind.count("regression")) {
    throw Error("no evaluation or regression artifacts under " + f.artifacts);
  }

  // Everything is rendered in memory first so a bad artifact leaves no
  // partial report behind.
  std::vector<std::pair<std::string, std::string>> files;
  std::ostringstream md;
  md << "# Aspect sentiment report\n\n";
  std::map<std::string, int> seen;
  try {
    for (const auto& art : by_kind["evaluation"]) {
      const auto& j = art.body;
      const std::string arch = j.at("architecture").get<std::string>();
      const int n = ++seen[arch];
      const std::string stem = n == 1 ? arch : arch + "_" + std::to_string(n);
      const json& aspects_j = j.at("aspects");
      auto reports = [&](const char* part) {
        std::vector<evaluate::ClassificationReport> v(kNumAspects);
        for (Aspect a : kAllAspects) {
          const std::string key(aspect_key(a));
          if (!aspects_j.contains(key)) {
            throw Error(art.path.string() + ": missing aspect " + key);
          }
          v[index_of(a)] = evaluate::classification_report_from_json(aspects_j.at(key).at(part));
        }
        return v;
      };
      const bool two = arch == "two_stage";
      const std::string name = two ? "Two-stage" : "One-stage";
      md << "## " << name << " classifier (" << j.at("rows").get<std::size_t>()
         << " validation reviews)\n\n";
      const auto overall = reports("overall");
      md << evaluate::metrics_table_markdown(name + ": end-to-end sentiment", overall,
                                             class_list(false))
         << '\n';
      files.emplace_back(stem + "_overall.csv", evaluate::metrics_table_csv(overall, class_list(false)));
      if (two) {
        const auto rel = reports("relevance");
        const auto sent = reports("sentiment");
        md << evaluate::metrics_table_markdown("Stage 1: relevance", rel, class_list(true)) << '\n'
           << evaluate::metrics_table_markdown("Stage 2: sentiment on relevant reviews", sent,
                                               class_list(false))
           << '\n';
        files.emplace_back(stem + "_relevance.csv", evaluate::metrics_table_csv(rel, class_list(true)));
        files.emplace_back(stem + "_sentiment.csv",
                           evaluate::metrics_table_csv(sent, class_list(false)));
      }
    }
    for (const auto& art : by_kind["comparison"]) {
      md << "## Architecture comparison\n\n" << mcnemar_markdown(art.body) << '\n';
      const fs::path csv = art.path.parent_path() / "mcnemar.csv";
      if (fs::exists(csv)) files.emplace_back("mcnemar.csv", read_file(csv));
    }
    for (const auto& art : by_kind["annotator_agreement"]) {
      md << "## Annotator agreement\n\n"
         << kappa_markdown(art.body) << '\n'
         << pearson_markdown(art.body) << '\n';
    }
    for (const auto& art : by_kind["aspect_agreement"]) {
      md << "## Aspect discovery\n\n" << aspect_agreement_markdown(art.body) << '\n';
    }
    std::vector<regress::RegressionReport> regs;
    std::string title;
    for (const auto& art : by_kind["regression"]) {
      if (title.empty()) title = art.body.value("title", std::string("Regression"));
      for (const auto& m : art.body.at("models")) regs.push_back(regress::regression_report_from_json(m));
    }
    if (!regs.empty()) {
      md << "## Regression\n\n" << regress::regression_markdown(title, regs) << '\n';
      files.emplace_back("effects.csv", regress::effect_plot_csv(regs));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed artifact: ") + e.what());
  }

  OutputDir out(g.out, cfg, "report");
  out.add_input("artifacts", f.artifacts);
  out.write("report.md", md.str());
  for (const auto& [name, body] : files) out.write(name, body);
  out.finish();
}

// Failures are logged whatever the log level.
void report_failure(const char* event, const char* message) {
  std::cerr << json{{"event", event}, {"message", message}}.dump(-1, ' ', false,
                                                                 json::error_handler_t::replace)
            << '\n';
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Aspect-based sentiment analysis of restaurant reviews", "absa"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--workers", g.workers, "Worker threads for prediction and training");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--set", g.sets, "Config override key=value (repeatable)")->allow_extra_args(false);
  app.add_option("--log-level", g.log_level, "quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  std::function<void()> action;

  IngestFlags ingest_f;
  auto* ingest_c = app.add_subcommand("ingest", "Join reviews with businesses into a corpus");
  ingest_c->add_option("--reviews", ingest_f.reviews, "Review JSON-lines file");
  ingest_c->add_option("--business", ingest_f.business, "Business JSON-lines file");
  ingest_c->callback([&] { action = [&] { cmd_ingest(g, ingest_f); }; });

  SampleFlags sample_f;
  auto* sample_c = app.add_subcommand("sample", "Draw a seeded review sample");
  sample_c->add_option("--corpus", sample_f.corpus, "Corpus JSON-lines file");
  sample_c->add_option("--n", sample_f.n, "Uniform sample size");
  sample_c->add_option("--businesses", sample_f.businesses, "Number of businesses");
  sample_c->add_option("--per", sample_f.per, "Reviews per business");
  sample_c->add_option("--state", sample_f.state, "Restrict businesses to one state code");
  sample_c->callback([&] { action = [&] { cmd_sample(g, sample_f); }; });

  SynthFlags synth_f;
  auto* synth_c = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
  synth_c->add_option("--businesses", synth_f.businesses, "Number of businesses");
  synth_c->add_option("--per", synth_f.per, "Reviews per business");
  synth_c->add_option("--noise", synth_f.noise, "Star-rating noise standard deviation");
  synth_c->add_flag("--lexical-overlap", synth_f.lexical_overlap,
                    "Add shared sentiment words across aspects");
  synth_c->callback([&] { action = [&] { cmd_synth(g, synth_f); }; });

  PromptFlags prompt_f;
  auto* prompt_c = app.add_subcommand("prompt", "Write aspect-discovery prompts");
  prompt_c->add_option("--corpus", prompt_f.corpus, "Sampled reviews (JSON lines)");
  prompt_c->add_flag("--per-business", prompt_f.per_business, "One prompt per business");
  prompt_c->callback([&] { action = [&] { cmd_prompt(g, prompt_f); }; });

  AgreeFlags agree_f;
  auto* agree_c = app.add_subcommand("aspects-agree", "Compare two models' discovered aspects");
  agree_c->add_option("--a", agree_f.a, "Responses of the first model");
  agree_c->add_option("--b", agree_f.b, "Responses of the second model");
  agree_c->callback([&] { action = [&] { cmd_aspects_agree(g, agree_f); }; });

  EmbFlags emb_f;
  auto* emb_c = app.add_subcommand("train-embeddings", "Train subword skip-gram embeddings");
  emb_c->add_option("--corpus", emb_f.corpus, "Corpus JSON-lines file");
  emb_c->callback([&] { action = [&] { cmd_train_embeddings(g, emb_f); }; });

  TrainFlags train_f;
  auto* train_c = app.add_subcommand("train", "Train one-stage or two-stage aspect classifiers");
  train_c->add_option("--arch", train_f.arch, "one-stage or two-stage");
  train_c->add_option("--labels", train_f.labels, "Annotation CSV");
  train_c->add_option("--corpus", train_f.corpus, "Corpus holding the labeled reviews");
  train_c->add_option("--emb", train_f.emb, "Embedding model");
  train_c->add_option("--kind", train_f.kind, "mnb, logreg or linsvm");
  train_c->callback([&] { action = [&] { cmd_train(g, train_f); }; });

  PredictFlags predict_f;
  auto* predict_c = app.add_subcommand("predict", "Predict aspect sentiments for a corpus");
  predict_c->add_option("--model", predict_f.model, "Model bundle directory");
  predict_c->add_option("--corpus", predict_f.corpus, "Corpus JSON-lines file");
  predict_c->add_option("--emb", predict_f.emb, "Embedding model");
  predict_c->callback([&] { action = [&] { cmd_predict(g, predict_f); }; });

  EvaluateFlags eval_f;
  auto* eval_c = app.add_subcommand(
      "evaluate", "Score a model, measure annotator agreement, or compare classifier families");
  eval_c->add_option("--model", eval_f.model, "Model bundle directory");
  eval_c->add_option("--labels", eval_f.labels, "Annotation CSV");
  eval_c->add_option("--corpus", eval_f.corpus, "Corpus holding the labeled reviews");
  eval_c->add_option("--emb", eval_f.emb, "Embedding model");
  eval_c->add_option("--annotators", eval_f.annotators, "Annotation CSVs, one per annotator");
  eval_c->add_flag("--select", eval_f.select, "Run the classifier/feature selection grid");
  eval_c->callback([&] { action = [&] { cmd_evaluate(g, eval_f); }; });

  CompareFlags cmp_f;
  auto* cmp_c = app.add_subcommand("compare", "McNemar test between the two architectures");
  cmp_c->add_option("--one-stage", cmp_f.one_stage, "One-stage model bundle");
  cmp_c->add_option("--two-stage", cmp_f.two_stage, "Two-stage model bundle");
  cmp_c->add_option("--labels", cmp_f.labels, "Annotation CSV");
  cmp_c->add_option("--corpus", cmp_f.corpus, "Corpus holding the labeled reviews");
  cmp_c->add_option("--emb", cmp_f.emb, "Embedding model");
  cmp_c->callback([&] { action = [&] { cmd_compare(g, cmp_f); }; });

  AggregateFlags agg_f;
  auto* agg_c = app.add_subcommand("aggregate", "Average predicted sentiments per restaurant");
  agg_c->add_option("--predictions", agg_f.predictions, "Prediction CSV");
  agg_c->add_option("--labels", agg_f.labels, "Annotation CSV used as ground truth");
  agg_c->add_option("--corpus", agg_f.corpus, "Corpus JSON-lines file");
  agg_c->callback([&] { action = [&] { cmd_aggregate(g, agg_f); }; });

  RegressFlags reg_f;
  auto* reg_c = app.add_subcommand("regress", "Regress restaurant ratings on aspect sentiments");
  reg_c->add_option("--aggregates", reg_f.aggregates, "Aggregate CSV");
  reg_c->add_option("--spec", reg_f.specs, "Model specification 1-4 (repeatable; default all)")
      ->allow_extra_args(false);
  reg_c->add_option("--title", reg_f.title, "Report title");
  reg_c->callback([&] { action = [&] { cmd_regress(g, reg_f); }; });

  LdaFlags lda_f;
  auto* lda_c = app.add_subcommand("lda", "Topic models per sentiment group");
  lda_c->add_option("--corpus", lda_f.corpus, "Corpus JSON-lines file");
  lda_c->add_option("--mode", lda_f.mode, "per_restaurant or pooled");
  lda_c->add_option("--topics", lda_f.topics, "Number of topics");
  lda_c->callback([&] { action = [&] { cmd_lda(g, lda_f); }; });

  ReportFlags report_f;
  auto* report_c = app.add_subcommand("report", "Render tables from evaluation artifacts");
  report_c->add_option("--artifacts", report_f.artifacts, "Directory of artifacts");
  report_c->callback([&] { action = [&] { cmd_report(g, report_f); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  set_log_level(g.log_level == "quiet"   ? LogLevel::kQuiet
                : g.log_level == "debug" ? LogLevel::kDebug
                                         : LogLevel::kInfo);
  try {
    action();
    return kExitOk;
  } catch (const UsageError& e) {
    report_failure("usage_error", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    report_failure("error", e.what());
    return kExitDataError;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace absa::cli
