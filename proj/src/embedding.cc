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

#include "absa/embedding.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include "absa/common.h"
#include "absa/rng.h"
#include "absa/util.h"

namespace absa::vectorize {
namespace {

constexpr char kMagic[8] = {'A', 'B', 'S', 'A', 'E', 'M', 'B', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string name) : bytes_(bytes), name_(std::move(name)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (remaining() < n) {
      throw Error(name_ + ": truncated embedding file at offset " + std::to_string(pos_));
    }
  }

  const std::string& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::uint32_t bucket_of(std::string_view ngram, std::uint32_t bucket_count) {
  return fnv1a32(ngram) % bucket_count;
}

}  // namespace

void EmbeddingParams::validate() const {
  if (dim == 0) throw Error("embedding dim must be positive");
  if (min_n == 0 || min_n > max_n) throw Error("embedding n-gram range must satisfy 1 <= min_n <= max_n");
  if (window == 0) throw Error("embedding window must be positive");
  if (epochs == 0) throw Error("embedding epochs must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error("embedding lr must be positive");
  if (min_count == 0) throw Error("embedding min_count must be positive");
  if (bucket_count == 0) throw Error("embedding bucket_count must be positive");
}

nlohmann::json to_json(const EmbeddingParams& p) {
  return nlohmann::json{{"dim", p.dim},           {"min_n", p.min_n},
                        {"max_n", p.max_n},       {"window", p.window},
                        {"epochs", p.epochs},     {"lr", p.lr},
                        {"negatives", p.negatives}, {"min_count", p.min_count},
                        {"bucket_count", p.bucket_count}};
}

EmbeddingParams embedding_params_from_json(const nlohmann::json& j) {
  EmbeddingParams p;
  try {
    p.dim = j.value("dim", p.dim);
    p.min_n = j.value("min_n", p.min_n);
    p.max_n = j.value("max_n", p.max_n);
    p.window = j.value("window", p.window);
    p.epochs = j.value("epochs", p.epochs);
    p.lr = j.value("lr", p.lr);
    p.negatives = j.value("negatives", p.negatives);
    p.min_count = j.value("min_count", p.min_count);
    p.bucket_count = j.value("bucket_count", p.bucket_count);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed embedding params: ") + e.what());
  }
  p.validate();
  return p;
}

std::vector<std::string> char_ngrams(std::string_view word, std::uint32_t min_n,
                                     std::uint32_t max_n) {
  std::string padded;
  padded.reserve(word.size() + 2);
  padded.push_back('<');
  padded.append(word);
  padded.push_back('>');
  std::vector<std::string> out;
  for (std::uint32_t n = min_n; n <= max_n; ++n) {
    if (n > padded.size()) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) out.push_back(padded.substr(i, n));
  }
  return out;
}

EmbeddingModel::EmbeddingModel(std::uint32_t dim, std::uint32_t min_n, std::uint32_t max_n,
                               std::uint32_t bucket_count, std::uint64_t seed,
                               std::vector<std::string> vocab, std::vector<float> input_rows)
    : dim_(dim),
      min_n_(min_n),
      max_n_(max_n),
      bucket_count_(bucket_count),
      seed_(seed),
      vocab_(std::move(vocab)),
      input_(std::move(input_rows)) {
  if (dim_ == 0 || bucket_count_ == 0 || min_n_ == 0 || min_n_ > max_n_) {
    throw Error("invalid embedding model shape");
  }
  if (input_.size() != row_count() * dim_) throw Error("embedding row block has wrong size");
  for (float v : input_) {
    if (!std::isfinite(v)) throw Error("embedding model contains non-finite values");
  }
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error("duplicate embedding vocabulary entry '" + vocab_[i] + "'");
    }
  }
}

std::int64_t EmbeddingModel::word_id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::vector<std::uint32_t> EmbeddingModel::subword_rows(std::string_view word) const {
  std::vector<std::uint32_t> rows;
  if (auto id = word_id(word); id >= 0) rows.push_back(static_cast<std::uint32_t>(id));
  const auto base = static_cast<std::uint32_t>(vocab_.size());
  for (const auto& g : char_ngrams(word, min_n_, max_n_)) {
    rows.push_back(base + bucket_of(g, bucket_count_));
  }
  return rows;
}

std::span<const float> EmbeddingModel::row(std::size_t r) const {
  return {input_.data() + r * dim_, dim_};
}

std::span<float> EmbeddingModel::mutable_row(std::size_t r) {
  return {input_.data() + r * dim_, dim_};
}

std::vector<double> EmbeddingModel::word_vector(std::string_view word) const {
  std::vector<double> v(dim_, 0.0);
  const auto rows = subword_rows(word);
  if (rows.empty()) return v;
  for (auto r : rows) {
    auto src = row(r);
    for (std::size_t i = 0; i < dim_; ++i) v[i] += src[i];
  }
  for (double& x : v) x /= static_cast<double>(rows.size());
  return v;
}

void EmbeddingModel::set_output_rows(std::vector<float> rows) {
  if (!rows.empty() && rows.size() != vocab_.size() * dim_) {
    throw Error("embedding output block has wrong size");
  }
  output_ = std::move(rows);
}

std::string EmbeddingModel::digest() const {
  std::string head;
  put_u32(head, dim_);
  put_u32(head, min_n_);
  put_u32(head, max_n_);
  put_u32(head, bucket_count_);
  for (const auto& w : vocab_) {
    put_u32(head, static_cast<std::uint32_t>(w.size()));
    head += w;
  }
  std::uint64_t h = fnv1a64(head);
  h ^= fnv1a64(std::string_view(reinterpret_cast<const char*>(input_.data()),
                                input_.size() * sizeof(float)));
  return hex_digest(splitmix64(h));
}

void EmbeddingModel::save(const std::filesystem::path& path) const {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, dim_);
  put_u32(out, static_cast<std::uint32_t>(vocab_.size()));
  put_u32(out, bucket_count_);
  put_u32(out, min_n_);
  put_u32(out, max_n_);
  put_u64(out, seed_);
  for (const auto& w : vocab_) {
    put_u32(out, static_cast<std::uint32_t>(w.size()));
    out += w;
  }
  out.reserve(out.size() + input_.size() * 4);
  for (float f : input_) put_u32(out, std::bit_cast<std::uint32_t>(f));
  write_file(path, out);
}

EmbeddingModel EmbeddingModel::load(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  Reader in(bytes, path.string());
  if (in.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw Error(path.string() + ": not an embedding model (bad magic)");
  }
  const auto dim = in.u32();
  const auto vocab_size = in.u32();
  const auto buckets = in.u32();
  const auto min_n = in.u32();
  const auto max_n = in.u32();
  const auto seed = in.u64();
  std::vector<std::string> vocab;
  vocab.reserve(vocab_size);
  for (std::uint32_t i = 0; i < vocab_size; ++i) vocab.push_back(in.str(in.u32()));
  const std::uint64_t floats = (std::uint64_t{vocab_size} + buckets) * dim;
  if (in.remaining() != floats * 4) {
    throw Error(path.string() + ": embedding row block size mismatch");
  }
  std::vector<float> rows(floats);
  for (auto& f : rows) f = std::bit_cast<float>(in.u32());
  return EmbeddingModel(dim, min_n, max_n, buckets, seed, std::move(vocab), std::move(rows));
}

EmbeddingModel train_embeddings(const std::vector<textprep::TokenList>& corpus,
                                const EmbeddingParams& params, std::uint64_t seed,
                                const TrainingOptions& options) {
  CorpusSource source = [&corpus](const std::function<void(const textprep::TokenList&)>& f) {
    for (const auto& doc : corpus) f(doc);
  };
  return train_embeddings(source, params, seed, options);
}

EmbeddingModel train_embeddings(const CorpusSource& corpus, const EmbeddingParams& params,
                                std::uint64_t seed, const TrainingOptions& options) {
  params.validate();
  const std::size_t dim = params.dim;

  std::unordered_map<std::string, std::uint64_t> counts;
  corpus([&](const textprep::TokenList& doc) {
    for (const auto& t : doc) ++counts[t];
  });
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= params.min_count) kept.emplace_back(w, c);
  }
  counts.clear();
  if (kept.empty()) throw Error("empty effective vocabulary");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> vocab;
  std::vector<double> cumulative;
  double mass = 0.0;
  for (const auto& [w, c] : kept) {
    vocab.push_back(w);
    mass += std::pow(static_cast<double>(c), 0.75);
    cumulative.push_back(mass);
  }
  const std::size_t nv = vocab.size();

  Rng rng(seed);
  std::vector<float> input((nv + params.bucket_count) * dim);
  const double bound = 1.0 / static_cast<double>(dim);
  for (auto& v : input) v = static_cast<float>(rng.uniform(-bound, bound));
  EmbeddingModel model(params.dim, params.min_n, params.max_n, params.bucket_count, seed,
                       std::move(vocab), std::move(input));
  std::vector<float> output(nv * dim, 0.0f);

  // Documents re-encoded as vocabulary ids; out-of-vocabulary tokens dropped.
  std::vector<std::uint32_t> ids;
  std::vector<std::size_t> offsets{0};
  corpus([&](const textprep::TokenList& doc) {
    for (const auto& t : doc) {
      if (auto id = model.word_id(t); id >= 0) ids.push_back(static_cast<std::uint32_t>(id));
    }
    offsets.push_back(ids.size());
  });
  std::vector<std::vector<std::uint32_t>> rows_of(nv);
  for (std::size_t w = 0; w < nv; ++w) rows_of[w] = model.subword_rows(model.vocab()[w]);

  const double total_tokens = static_cast<double>(ids.size()) * params.epochs;
  std::uint64_t processed = 0;
  std::vector<float> hidden(dim), descent(dim);
  std::vector<float*> outs(1 + params.negatives);
  double loss_sum = 0.0, epoch_loss = 0.0;
  std::uint64_t loss_n = 0, epoch_n = 0;
  const std::size_t ndocs = offsets.size() - 1;

  auto draw_negative = [&](std::uint32_t avoid) {
    for (;;) {
      const double u = rng.uniform01() * mass;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      auto w = static_cast<std::uint32_t>(
          std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(nv) - 1));
      if (w != avoid || nv == 1) return w;
    }
  };

  for (std::uint32_t epoch = 0; epoch < params.epochs; ++epoch) {
    epoch_loss = 0.0;
    epoch_n = 0;
    for (std::size_t d = 0; d < ndocs; ++d) {
      const std::size_t begin = offsets[d], end = offsets[d + 1];
      for (std::size_t i = begin; i < end; ++i) {
        const float lr = static_cast<float>(
            params.lr * std::max(0.0, 1.0 - static_cast<double>(processed) / total_tokens));
        ++processed;
        const auto& rows = rows_of[ids[i]];
        std::fill(hidden.begin(), hidden.end(), 0.0f);
        for (auto r : rows) {
          auto src = model.row(r);
          for (std::size_t k = 0; k < dim; ++k) hidden[k] += src[k];
        }
        const float inv = 1.0f / static_cast<float>(rows.size());
        for (auto& h : hidden) h *= inv;

        const auto reach = static_cast<std::size_t>(1 + rng.uniform_index(params.window));
        const std::size_t lo = i - begin >= reach ? i - reach : begin;
        const std::size_t hi = std::min(end, i + reach + 1);
        for (std::size_t c = lo; c < hi; ++c) {
          if (c == i) continue;
          const std::uint32_t ctx = ids[c];
          outs[0] = output.data() + std::size_t{ctx} * dim;
          for (std::uint32_t n = 0; n < params.negatives; ++n) {
            outs[1 + n] = output.data() + std::size_t{draw_negative(ctx)} * dim;
          }
          std::fill(descent.begin(), descent.end(), 0.0f);
          const double loss = negative_sampling_step<float>(hidden, outs, lr, descent);
          loss_sum += loss;
          epoch_loss += loss;
          ++loss_n;
          ++epoch_n;
          // fastText-style: the shared gradient is split equally over the rows.
          for (auto r : rows) {
            auto dst = model.mutable_row(r);
            for (std::size_t k = 0; k < dim; ++k) dst[k] += lr * inv * descent[k];
          }
        }
      }
      if (options.report_every > 0 && options.on_progress && (d + 1) % options.report_every == 0) {
        model.set_output_rows(output);
        options.on_progress(model, TrainingProgress{epoch, processed,
                                                    loss_n ? loss_sum / loss_n : 0.0});
        loss_sum = 0.0;
        loss_n = 0;
      }
    }
    log_event("embedding_epoch", {{"epoch", epoch + 1},
                                  {"tokens_processed", processed},
                                  {"mean_loss", epoch_n ? epoch_loss / epoch_n : 0.0}});
  }
  for (float v : output) {
    if (!std::isfinite(v)) throw Error("embedding training diverged (non-finite weights)");
  }
  for (std::size_t r = 0; r < model.row_count(); ++r) {
    for (float v : model.row(r)) {
      if (!std::isfinite(v)) throw Error("embedding training diverged (non-finite weights)");
    }
  }
  model.set_output_rows(std::move(output));
  return model;
}

double pair_loss(const EmbeddingModel& model, std::uint32_t target, std::uint32_t context,
                 std::span<const std::uint32_t> negatives) {
  const std::size_t dim = model.dim();
  if (model.output_rows().empty()) throw Error("pair_loss: model has no output rows");
  if (target >= model.vocab().size() || context >= model.vocab().size()) {
    throw Error("pair_loss: word id out of range");
  }
  const auto rows = model.subword_rows(model.vocab()[target]);
  std::vector<double> hidden(dim, 0.0), descent(dim, 0.0);
  for (auto r : rows) {
    auto src = model.row(r);
    for (std::size_t k = 0; k < dim; ++k) hidden[k] += src[k];
  }
  for (auto& h : hidden) h /= static_cast<double>(rows.size());
  std::vector<std::vector<double>> out_copies;
  auto copy_row = [&](std::uint32_t w) {
    const float* p = model.output_rows().data() + std::size_t{w} * dim;
    out_copies.emplace_back(p, p + dim);
  };
  copy_row(context);
  for (auto n : negatives) {
    if (n >= model.vocab().size()) throw Error("pair_loss: word id out of range");
    copy_row(n);
  }
  std::vector<double*> ptrs;
  for (auto& o : out_copies) ptrs.push_back(o.data());
  return negative_sampling_step<double>(hidden, ptrs, 0.0, descent);
}

FeatureVector embed_review(const EmbeddingModel& model, const textprep::TokenList& doc) {
  FeatureVector fv{FeatureSpace::kEmbedding, std::vector<double>(model.dim(), 0.0)};
  if (doc.empty()) return fv;
  for (const auto& w : doc) {
    auto v = model.word_vector(w);
    for (std::size_t i = 0; i < v.size(); ++i) fv.values[i] += v[i];
  }
  for (double& x : fv.values) x /= static_cast<double>(doc.size());
  l2_normalize(fv.values);
  return fv;
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingModel& model,
                                                              std::string_view token,
                                                              std::size_t k) {
  if (k == 0) throw Error("nearest_neighbors: k must be at least 1");
  auto q = model.word_vector(token);
  const double qn = l2_norm(q);
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& w : model.vocab()) {
    if (w == token) continue;
    auto v = model.word_vector(w);
    const double vn = l2_norm(v);
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += q[i] * v[i];
    scored.emplace_back(w, qn > 0.0 && vn > 0.0 ? dot / (qn * vn) : 0.0);
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  scored.resize(keep);
  return scored;
}

}  // namespace absa::vectorize
