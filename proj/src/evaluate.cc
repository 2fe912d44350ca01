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

#include "absa/evaluate.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "absa/tfidf.h"
#include "absa/util.h"

namespace absa::evaluate {
namespace {

std::vector<int> folded(const std::vector<ingest::AspectLabelSet>& truth, Aspect a) {
  std::vector<int> y;
  y.reserve(truth.size());
  for (const auto& t : truth) y.push_back(sentiment_or_neutral(t[a]));
  return y;
}

const std::vector<int> kSentimentClasses = {-1, 0, 1};
const std::vector<int> kRelevanceClasses = {kIrrelevant, kRelevant};

classify::FeatureMatrix select_rows(const classify::FeatureMatrix& x,
                                    const std::vector<std::size_t>& idx) {
  classify::FeatureMatrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

}  // namespace

const ClassMetrics& ClassificationReport::of(int label) const {
  for (const auto& c : classes) {
    if (c.label == label) return c;
  }
  throw Error("class " + std::to_string(label) + " not in report");
}

ClassificationReport classification_report(const std::vector<int>& truth,
                                           const std::vector<int>& pred,
                                           const std::optional<std::vector<int>>& classes) {
  if (truth.size() != pred.size()) {
    throw Error("truth and prediction lengths differ (" + std::to_string(truth.size()) + " vs " +
                std::to_string(pred.size()) + ")");
  }
  if (truth.empty()) throw Error("classification_report needs at least one sample");
  std::set<int> labels;
  if (classes) {
    labels.insert(classes->begin(), classes->end());
  } else {
    labels.insert(truth.begin(), truth.end());
    labels.insert(pred.begin(), pred.end());
  }
  ClassificationReport r;
  r.total = truth.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == pred[i];
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);
  for (int label : labels) {
    std::size_t tp = 0, predicted = 0, actual = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      tp += truth[i] == label && pred[i] == label;
      predicted += pred[i] == label;
      actual += truth[i] == label;
    }
    ClassMetrics m;
    m.label = label;
    m.support = actual;
    m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    r.classes.push_back(m);
  }
  return r;
}

nlohmann::json to_json(const ClassificationReport& r) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : r.classes) {
    classes.push_back({{"label", c.label},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"support", c.support}});
  }
  return {{"accuracy", r.accuracy}, {"total", r.total}, {"classes", classes}};
}

ClassificationReport classification_report_from_json(const nlohmann::json& j) {
  ClassificationReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.total = j.at("total").get<std::size_t>();
  for (const auto& c : j.at("classes")) {
    r.classes.push_back({c.at("label").get<int>(), c.at("precision").get<double>(),
                         c.at("recall").get<double>(), c.at("f1").get<double>(),
                         c.at("support").get<std::size_t>()});
  }
  return r;
}

KappaParts fleiss_kappa_parts(const std::vector<std::vector<std::size_t>>& counts) {
  if (counts.empty()) throw Error("fleiss_kappa: no items");
  const std::size_t categories = counts.front().size();
  std::size_t n = 0;
  for (std::size_t c : counts.front()) n += c;
  if (n < 2) throw Error("fleiss_kappa: each item needs at least 2 ratings");
  std::vector<double> column(categories, 0.0);
  double p_sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != categories) throw Error("fleiss_kappa: ragged count table");
    std::size_t row_n = 0;
    double agree = 0.0;
    for (std::size_t j = 0; j < categories; ++j) {
      const auto c = counts[i][j];
      row_n += c;
      agree += static_cast<double>(c) * (static_cast<double>(c) - 1.0);
      column[j] += static_cast<double>(c);
    }
    if (row_n != n) {
      throw Error("fleiss_kappa: item " + std::to_string(i) + " has " + std::to_string(row_n) +
                  " ratings, expected " + std::to_string(n));
    }
    p_sum += agree / (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
  }
  KappaParts k;
  const double items = static_cast<double>(counts.size());
  k.observed = p_sum / items;
  for (double c : column) {
    const double pj = c / (items * static_cast<double>(n));
    k.expected += pj * pj;
  }
  k.kappa = k.expected >= 1.0 ? 1.0 : (k.observed - k.expected) / (1.0 - k.expected);
  return k;
}

double fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts) {
  return fleiss_kappa_parts(counts).kappa;
}

std::vector<std::vector<std::size_t>> label_count_table(
    const std::vector<std::vector<AspectLabel>>& raters) {
  if (raters.empty()) return {};
  const std::size_t items = raters.front().size();
  std::vector<std::vector<std::size_t>> table(items, std::vector<std::size_t>(4, 0));
  for (const auto& r : raters) {
    if (r.size() != items) throw Error("raters cover different numbers of items");
    for (std::size_t i = 0; i < items; ++i) {
      const int v = static_cast<int>(r[i]);  // -1, 0, 1, 2 (NA)
      ++table[i][static_cast<std::size_t>(v + 1)];
    }
  }
  return table;
}

double pearson_p_value(double r, std::size_t m) {
  if (m < 3) throw Error("pearson_p_value needs at least 3 items");
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(m) - 2.0;
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

PearsonReport pearson_agreement(const std::vector<std::vector<std::optional<double>>>& scores) {
  const std::size_t k = scores.size();
  if (k < 2) throw Error("pearson_agreement needs at least 2 raters");
  const std::size_t items = scores.front().size();
  for (const auto& row : scores) {
    if (row.size() != items) throw Error("raters cover different numbers of items");
  }
  PearsonReport rep;
  rep.matrix.assign(k, std::vector<std::optional<double>>(k));
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < items; ++i) {
        if (scores[a][i] && scores[b][i]) {
          xs.push_back(*scores[a][i]);
          ys.push_back(*scores[b][i]);
        }
      }
      PairCorrelation pc{a, b, xs.size(), std::nullopt, std::nullopt};
      if (xs.size() >= 3) {
        const double m = static_cast<double>(xs.size());
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          mx += xs[i];
          my += ys[i];
        }
        mx /= m;
        my /= m;
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          sxy += (xs[i] - mx) * (ys[i] - my);
          sxx += (xs[i] - mx) * (xs[i] - mx);
          syy += (ys[i] - my) * (ys[i] - my);
        }
        if (sxx > 0.0 && syy > 0.0) {
          const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
          pc.r = r;
          pc.p = pearson_p_value(r, xs.size());
          sum += r;
          ++defined;
        }
      }
      rep.matrix[a][b] = rep.matrix[b][a] = pc.r;
      rep.pairs.push_back(pc);
    }
    // The diagonal is defined when the rater has any variance to correlate.
    bool varies = false;
    std::optional<double> first;
    for (const auto& v : scores[a]) {
      if (!v) continue;
      if (first && *first != *v) varies = true;
      if (!first) first = v;
    }
    if (varies) rep.matrix[a][a] = 1.0;
  }
  if (defined) rep.mean_r = sum / static_cast<double>(defined);
  return rep;
}

std::vector<AspectAgreement> agreement_report(
    const std::vector<std::vector<ingest::AspectLabelSet>>& raters) {
  if (raters.size() < 2) throw Error("agreement needs at least 2 annotators");
  const auto& ids_from = raters.front();
  if (ids_from.empty()) throw Error("agreement: first annotator has no rows");
  std::vector<std::unordered_map<std::string, const ingest::AspectLabelSet*>> index(raters.size());
  for (std::size_t r = 0; r < raters.size(); ++r) {
    for (const auto& row : raters[r]) index[r][row.review_id] = &row;
    if (raters[r].size() != ids_from.size()) {
      throw Error("annotator " + std::to_string(r + 1) + " labeled " +
                  std::to_string(raters[r].size()) + " reviews, expected " +
                  std::to_string(ids_from.size()));
    }
  }
  std::vector<AspectAgreement> out;
  for (Aspect a : kAllAspects) {
    std::vector<std::vector<AspectLabel>> labels(raters.size());
    std::vector<std::vector<std::optional<double>>> scores(raters.size());
    for (const auto& item : ids_from) {
      for (std::size_t r = 0; r < raters.size(); ++r) {
        auto it = index[r].find(item.review_id);
        if (it == index[r].end()) {
          throw Error("annotator " + std::to_string(r + 1) + " is missing review " + item.review_id);
        }
        const AspectLabel l = (*it->second)[a];
        labels[r].push_back(l);
        scores[r].push_back(is_relevant(l) ? std::optional<double>(static_cast<int>(l))
                                           : std::nullopt);
      }
    }
    out.push_back({a, fleiss_kappa_parts(label_count_table(labels)), pearson_agreement(scores)});
  }
  return out;
}

McNemarResult mcnemar_from_counts(std::size_t n01, std::size_t n10) {
  McNemarResult m;
  m.n01 = n01;
  m.n10 = n10;
  const double s = static_cast<double>(n01 + n10);
  if (n01 + n10 == 0) return m;
  const double d = static_cast<double>(n01) - static_cast<double>(n10);
  m.chi_square = d * d / s;
  m.z = d / std::sqrt(s);
  // Upper tail, written so that negating z gives exactly 1 - p.
  const double upper = 0.5 * std::erfc(std::abs(m.z) / std::sqrt(2.0));
  m.one_sided_p = m.z >= 0.0 ? upper : 1.0 - upper;
  return m;
}

McNemarResult mcnemar_one_sided(const std::vector<int>& truth, const std::vector<int>& pred_a,
                                const std::vector<int>& pred_b) {
  if (truth.size() != pred_a.size() || truth.size() != pred_b.size()) {
    throw Error("mcnemar: truth and prediction lengths differ");
  }
  std::size_t n01 = 0, n10 = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool a_ok = pred_a[i] == truth[i];
    const bool b_ok = pred_b[i] == truth[i];
    n01 += !a_ok && b_ok;
    n10 += a_ok && !b_ok;
  }
  return mcnemar_from_counts(n01, n10);
}

std::vector<ArchitectureComparison> compare_architectures(
    const classify::AspectPipeline& one_stage, const classify::AspectPipeline& two_stage,
    const classify::FeatureMatrix& x, const std::vector<ingest::AspectLabelSet>& truth) {
  if (one_stage.architecture != classify::Architecture::kOneStage ||
      two_stage.architecture != classify::Architecture::kTwoStage) {
    throw Error("compare_architectures expects a one-stage and a two-stage pipeline");
  }
  if (static_cast<std::size_t>(x.rows()) != truth.size()) {
    throw Error("compare_architectures: feature rows and labels differ in count");
  }
  std::vector<ArchitectureComparison> out;
  for (Aspect a : kAllAspects) {
    ArchitectureComparison c;
    c.aspect = a;
    std::vector<std::size_t> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (is_relevant(truth[i][a])) {
        rows.push_back(i);
        y.push_back(static_cast<int>(truth[i][a]));
      }
    }
    c.relevant_rows = rows.size();
    if (!rows.empty()) {
      const auto xr = select_rows(x, rows);
      c.result = mcnemar_one_sided(y, classify::predict_sentiment_stage(one_stage, a, xr),
                                   classify::predict_sentiment_stage(two_stage, a, xr));
    }
    out.push_back(c);
  }
  return out;
}

std::vector<AspectEvaluation> evaluate_pipeline(const classify::AspectPipeline& pipeline,
                                                const classify::FeatureMatrix& x,
                                                const std::vector<ingest::AspectLabelSet>& truth) {
  if (static_cast<std::size_t>(x.rows()) != truth.size()) {
    throw Error("evaluate_pipeline: feature rows and labels differ in count");
  }
  const auto vectors = classify::predict_sentiments(pipeline, x);
  std::vector<AspectEvaluation> out;
  for (Aspect a : kAllAspects) {
    AspectEvaluation e;
    e.aspect = a;
    std::vector<int> pred;
    for (const auto& v : vectors) pred.push_back(v[index_of(a)]);
    e.overall = classification_report(folded(truth, a), pred, kSentimentClasses);
    if (pipeline.architecture == classify::Architecture::kTwoStage) {
      std::vector<int> rel_truth;
      std::vector<std::size_t> rows;
      std::vector<int> sent_truth;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool rel = is_relevant(truth[i][a]);
        rel_truth.push_back(rel ? kRelevant : kIrrelevant);
        if (rel) {
          rows.push_back(i);
          sent_truth.push_back(static_cast<int>(truth[i][a]));
        }
      }
      e.relevance = classification_report(rel_truth, classify::predict_relevance(pipeline, a, x),
                                          kRelevanceClasses);
      if (!rows.empty()) {
        e.sentiment = classification_report(
            sent_truth, classify::predict_sentiment_stage(pipeline, a, select_rows(x, rows)),
            kSentimentClasses);
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::json to_json(const std::vector<AspectEvaluation>& evals) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& e : evals) {
    nlohmann::json entry{{"overall", to_json(e.overall)}};
    if (e.relevance) entry["relevance"] = to_json(*e.relevance);
    if (e.sentiment) entry["sentiment"] = to_json(*e.sentiment);
    j[std::string(aspect_key(e.aspect))] = entry;
  }
  return j;
}

std::vector<SelectionResult> model_selection(const std::vector<textprep::TokenList>& docs,
                                             const std::vector<FeatureVector>& embedded,
                                             const std::vector<ingest::AspectLabelSet>& labels,
                                             const classify::Split& split, std::uint64_t seed) {
  if (docs.size() != labels.size() || embedded.size() != labels.size()) {
    throw Error("model_selection: docs, features and labels differ in count");
  }
  std::vector<textprep::TokenList> train_docs;
  for (std::size_t i : split.train) train_docs.push_back(docs.at(i));
  const auto tfidf = vectorize::fit_tfidf(train_docs);
  std::vector<FeatureVector> tf_rows;
  for (const auto& d : docs) tf_rows.push_back(vectorize::transform_tfidf(tfidf, d));
  const auto x_tfidf = classify::stack_features(tf_rows);
  const auto x_emb = classify::stack_features(embedded);

  const std::vector<classify::ClassifierKind> kinds = {classify::ClassifierKind::kMnb,
                                                       classify::ClassifierKind::kLogreg,
                                                       classify::ClassifierKind::kLinsvm};
  std::vector<SelectionResult> out;
  for (Aspect a : kAllAspects) {
    const auto y_all = folded(labels, a);
    std::vector<int> y_train, y_val;
    for (std::size_t i : split.train) y_train.push_back(y_all[i]);
    for (std::size_t i : split.validation) y_val.push_back(y_all[i]);
    struct Space {
      std::string name;
      FeatureSpace space;
      classify::FeatureMatrix train;
      std::vector<int> y;
      classify::FeatureMatrix val;
    };
    std::vector<Space> spaces;
    spaces.push_back({"tfidf", FeatureSpace::kTfidf, select_rows(x_tfidf, split.train), y_train,
                      select_rows(x_tfidf, split.validation)});
    try {
      auto balanced = classify::smote(spaces[0].train, y_train, 5, seed + index_of(a));
      spaces.push_back({"tfidf+smote", FeatureSpace::kTfidf, std::move(balanced.x),
                        std::move(balanced.y), spaces[0].val});
    } catch (const Error& e) {
      for (auto k : kinds) {
        out.push_back({std::string(classify::kind_name(k)), "tfidf+smote", a, std::nullopt, e.what()});
      }
    }
    spaces.push_back({"embedding", FeatureSpace::kEmbedding, select_rows(x_emb, split.train),
                      y_train, select_rows(x_emb, split.validation)});
    for (const auto& s : spaces) {
      for (auto k : kinds) {
        SelectionResult r{std::string(classify::kind_name(k)), s.name, a, std::nullopt, ""};
        try {
          const auto model = classify::train_classifier(k, s.train, s.y, s.space, {}, seed);
          r.report = classification_report(y_val, classify::predict_labels(model, s.val),
                                           kSentimentClasses);
        } catch (const Error& e) {
          r.error = e.what();
        }
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

const std::array<Aspect, kNumAspects>& report_column_order() {
  static const std::array<Aspect, kNumAspects> order = {
      Aspect::kService,     Aspect::kAmbiance, Aspect::kFoodQuality,
      Aspect::kMenuVariety, Aspect::kWaitTime, Aspect::kPrice};
  return order;
}

std::string report_column_title(Aspect a) {
  switch (a) {
    case Aspect::kService: return "Service";
    case Aspect::kAmbiance: return "Ambiance";
    case Aspect::kFoodQuality: return "Quality";
    case Aspect::kMenuVariety: return "Menu";
    case Aspect::kWaitTime: return "Wait Time";
    case Aspect::kPrice: return "Price";
  }
  return "";
}

std::string class_title(int label, bool relevance) {
  if (relevance) return label == kRelevant ? "Relevant" : "Irrelevant";
  switch (label) {
    case -1: return "Negative";
    case 0: return "Neutral";
    case 1: return "Positive";
  }
  return std::to_string(label);
}

namespace {

struct MetricRow {
  const char* name;
  std::string (*cell)(const ClassMetrics&);
};

const MetricRow kMetricRows[] = {
    {"Precision", [](const ClassMetrics& m) { return format_fixed(m.precision, 2); }},
    {"Recall", [](const ClassMetrics& m) { return format_fixed(m.recall, 2); }},
    {"F1-Score", [](const ClassMetrics& m) { return format_fixed(m.f1, 2); }},
    {"Support", [](const ClassMetrics& m) { return std::to_string(m.support); }},
};

const ClassMetrics& metrics_or_zero(const ClassificationReport& r, int label) {
  static const ClassMetrics zero;
  for (const auto& c : r.classes) {
    if (c.label == label) return c;
  }
  return zero;
}

}  // namespace

std::string metrics_table_csv(const std::vector<ClassificationReport>& by_aspect,
                              const std::vector<int>& classes) {
  if (by_aspect.size() != kNumAspects) throw Error("metrics table needs six aspect reports");
  const bool relevance = classes == kRelevanceClasses;
  std::ostringstream os;
  os << "class,metric";
  for (Aspect a : report_column_order()) os << ',' << csv_field(report_column_title(a));
  os << '\n';
  for (int c : classes) {
    for (const auto& row : kMetricRows) {
      os << csv_field(class_title(c, relevance)) << ',' << row.name;
      for (Aspect a : report_column_order()) {
        os << ',' << row.cell(metrics_or_zero(by_aspect[index_of(a)], c));
      }
      os << '\n';
    }
  }
  os << "all,Accuracy";
  for (Aspect a : report_column_order()) os << ',' << format_fixed(by_aspect[index_of(a)].accuracy, 2);
  os << '\n';
  return os.str();
}

std::string metrics_table_markdown(const std::string& title,
                                   const std::vector<ClassificationReport>& by_aspect,
                                   const std::vector<int>& classes) {
  if (by_aspect.size() != kNumAspects) throw Error("metrics table needs six aspect reports");
  const bool relevance = classes == kRelevanceClasses;
  std::ostringstream os;
  os << "**" << title << "**\n\n| Metric |";
  for (Aspect a : report_column_order()) os << ' ' << report_column_title(a) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < kNumAspects; ++i) os << "---|";
  os << '\n';
  for (int c : classes) {
    os << "| **" << class_title(c, relevance) << "** |";
    for (std::size_t i = 0; i < kNumAspects; ++i) os << " |";
    os << '\n';
    for (const auto& row : kMetricRows) {
      os << "| " << row.name << " |";
      for (Aspect a : report_column_order()) {
        os << ' ' << row.cell(metrics_or_zero(by_aspect[index_of(a)], c)) << " |";
      }
      os << '\n';
    }
  }
  os << "| **Accuracy** |";
  for (Aspect a : report_column_order()) os << ' ' << format_fixed(by_aspect[index_of(a)].accuracy, 2) << " |";
  os << '\n';
  return os.str();
}

}  // namespace absa::evaluate
