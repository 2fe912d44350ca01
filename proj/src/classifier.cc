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

#include "absa/classifier.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "absa/common.h"
#include "absa/rng.h"
#include "absa/util.h"

namespace absa::classify {
namespace {

void check_training_input(const FeatureMatrix& x, const std::vector<int>& y) {
  if (x.rows() == 0) throw Error("cannot train on an empty feature matrix");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                std::to_string(y.size()) + ") differ in count");
  }
  if (!x.allFinite()) throw Error("feature matrix contains NaN or Inf");
}

std::vector<int> class_indices(const std::vector<int>& classes, const std::vector<int>& y) {
  std::vector<int> idx;
  idx.reserve(y.size());
  for (int label : y) {
    auto it = std::lower_bound(classes.begin(), classes.end(), label);
    idx.push_back(static_cast<int>(it - classes.begin()));
  }
  return idx;
}

std::vector<int> distinct_classes(const std::vector<int>& y) {
  std::vector<int> classes(y.begin(), y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw Error("training labels contain fewer than 2 classes");
  return classes;
}

// Row-wise softmax in place; returns per-row log-sum-exp.
Eigen::VectorXd softmax_rows(Eigen::MatrixXd& s) {
  Eigen::VectorXd lse(s.rows());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double m = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - m).exp();
    const double z = s.row(i).sum();
    s.row(i) /= z;
    lse(i) = m + std::log(z);
  }
  return lse;
}

ClassifierModel train_mnb(const FeatureMatrix& x, const std::vector<int>& y,
                          const std::vector<int>& classes, const Hyperparams& hp) {
  if ((x.array() < 0.0).any()) throw Error("mnb requires non-negative features");
  if (!(hp.alpha > 0.0)) throw Error("mnb smoothing alpha must be positive");
  const auto idx = class_indices(classes, y);
  const auto c = static_cast<Eigen::Index>(classes.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(c, x.cols());
  Eigen::VectorXd docs = Eigen::VectorXd::Zero(c);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    counts.row(idx[i]) += x.row(i);
    docs(idx[i]) += 1.0;
  }
  ClassifierModel m;
  m.weights.resize(c, x.cols());
  m.bias.resize(c);
  for (Eigen::Index k = 0; k < c; ++k) {
    const double denom = counts.row(k).sum() + hp.alpha * static_cast<double>(x.cols());
    m.weights.row(k) = ((counts.row(k).array() + hp.alpha) / denom).log().matrix();
    m.bias(k) = std::log(docs(k) / static_cast<double>(x.rows()));
  }
  return m;
}

ClassifierModel train_logreg(const FeatureMatrix& x, const std::vector<int>& y,
                             const std::vector<int>& classes, const Hyperparams& hp) {
  const auto targets = class_indices(classes, y);
  const auto c = static_cast<Eigen::Index>(classes.size());
  // With two classes the first row stays at zero, which makes the softmax a
  // plain logistic model.
  const bool pinned = c == 2;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(c, x.cols());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(c);
  Eigen::MatrixXd gw;
  Eigen::VectorXd gb;
  auto eval = [&](const Eigen::MatrixXd& ww, const Eigen::VectorXd& bb, Eigen::MatrixXd* g1,
                  Eigen::VectorXd* g2) {
    const double f = logreg_objective(ww, bb, x, targets, hp.lambda, g1, g2);
    if (pinned) {
      g1->row(0).setZero();
      (*g2)(0) = 0.0;
    }
    return f;
  };
  double f = eval(w, b, &gw, &gb);
  ClassifierModel m;
  m.loss_history.push_back(f);
  double step = 1.0;
  Eigen::MatrixXd gw_new;
  Eigen::VectorXd gb_new;
  for (int it = 0; it < hp.max_iterations; ++it) {
    const double ginf = std::max(gw.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());
    if (ginf < hp.tolerance) break;
    const double gsq = gw.squaredNorm() + gb.squaredNorm();
    double t = std::min(step, 1e6);
    bool accepted = false;
    while (t > 1e-16) {
      Eigen::MatrixXd w_new = w - t * gw;
      Eigen::VectorXd b_new = b - t * gb;
      const double f_new = eval(w_new, b_new, &gw_new, &gb_new);
      if (std::isfinite(f_new) && f_new <= f - 1e-4 * t * gsq) {
        // Barzilai-Borwein trial step for the next search: |s|^2 / <s, dg>
        // with s = -t g.
        const double sy = -t * ((gw_new - gw).cwiseProduct(gw).sum() +
                                (gb_new - gb).dot(gb));
        const double bb = t * t * gsq / sy;
        step = std::isfinite(bb) && bb > 0.0 ? bb : 2.0 * t;
        w = std::move(w_new);
        b = std::move(b_new);
        gw.swap(gw_new);
        gb.swap(gb_new);
        f = f_new;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    m.loss_history.push_back(f);
  }
  m.weights = std::move(w);
  m.bias = std::move(b);
  return m;
}

ClassifierModel train_linsvm(const FeatureMatrix& x, const std::vector<int>& y,
                             const std::vector<int>& classes, const Hyperparams& hp,
                             std::uint64_t seed) {
  if (!(hp.lambda > 0.0)) throw Error("linsvm lambda must be positive");
  if (hp.epochs < 1) throw Error("linsvm epochs must be positive");
  const auto targets = class_indices(classes, y);
  const auto c = static_cast<Eigen::Index>(classes.size());
  const Eigen::Index f = x.cols();
  const auto n = static_cast<std::size_t>(x.rows());
  ClassifierModel m;
  m.weights = Eigen::MatrixXd::Zero(c, f);
  m.bias = Eigen::VectorXd::Zero(c);
  const Rng root(seed);
  for (Eigen::Index k = 0; k < c; ++k) {
    // Constant 1 appended to each row; its weight is the bias.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(f + 1);
    Rng rng = root.split(static_cast<std::uint64_t>(k));
    std::vector<std::size_t> order(n);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t i : order) {
        ++t;
        const double eta = 1.0 / (hp.lambda * static_cast<double>(t));
        const double yi = targets[i] == k ? 1.0 : -1.0;
        const double margin = yi * (x.row(static_cast<Eigen::Index>(i)).dot(w.head(f)) + w(f));
        w *= 1.0 - eta * hp.lambda;
        if (margin < 1.0) {
          w.head(f) += eta * yi * x.row(static_cast<Eigen::Index>(i)).transpose();
          w(f) += eta * yi;
        }
      }
    }
    m.weights.row(k) = w.head(f).transpose();
    m.bias(k) = w(f);
  }
  return m;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, std::size_t cols_hint) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  Eigen::Index c = r ? static_cast<Eigen::Index>(rows.at(0).size()) : static_cast<Eigen::Index>(cols_hint);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != c) throw Error("ragged weight matrix");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

}  // namespace

std::string_view kind_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::kMnb: return "mnb";
    case ClassifierKind::kLogreg: return "logreg";
    case ClassifierKind::kLinsvm: return "linsvm";
  }
  return "logreg";
}

ClassifierKind parse_kind(std::string_view name) {
  if (name == "mnb") return ClassifierKind::kMnb;
  if (name == "logreg") return ClassifierKind::kLogreg;
  if (name == "linsvm") return ClassifierKind::kLinsvm;
  throw Error("unknown classifier kind '" + std::string(name) + "'");
}

nlohmann::json to_json(const Hyperparams& h) {
  return nlohmann::json{{"alpha", h.alpha},
                        {"lambda", h.lambda},
                        {"max_iterations", h.max_iterations},
                        {"tolerance", h.tolerance},
                        {"epochs", h.epochs}};
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
  Hyperparams h;
  h.alpha = j.value("alpha", h.alpha);
  h.lambda = j.value("lambda", h.lambda);
  h.max_iterations = j.value("max_iterations", h.max_iterations);
  h.tolerance = j.value("tolerance", h.tolerance);
  h.epochs = j.value("epochs", h.epochs);
  return h;
}

double logreg_objective(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                        const FeatureMatrix& x, const std::vector<int>& targets, double lambda,
                        Eigen::MatrixXd* grad_weights, Eigen::VectorXd* grad_bias) {
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd p = x * weights.transpose();
  p.rowwise() += bias.transpose();
  double nll = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) nll -= p(i, targets[static_cast<std::size_t>(i)]);
  nll += softmax_rows(p).sum();
  const double f = nll / n + 0.5 * lambda * weights.squaredNorm();
  if (grad_weights || grad_bias) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, targets[static_cast<std::size_t>(i)]) -= 1.0;
    p /= n;
    if (grad_weights) *grad_weights = p.transpose() * x + lambda * weights;
    if (grad_bias) *grad_bias = p.colwise().sum().transpose();
  }
  return f;
}

ClassifierModel train_classifier(ClassifierKind kind, const FeatureMatrix& x,
                                 const std::vector<int>& y, FeatureSpace space,
                                 const Hyperparams& hp, std::uint64_t seed) {
  check_training_input(x, y);
  const auto classes = distinct_classes(y);
  ClassifierModel m;
  switch (kind) {
    case ClassifierKind::kMnb: m = train_mnb(x, y, classes, hp); break;
    case ClassifierKind::kLogreg: m = train_logreg(x, y, classes, hp); break;
    case ClassifierKind::kLinsvm: m = train_linsvm(x, y, classes, hp, seed); break;
  }
  m.kind = kind;
  m.classes = classes;
  m.space = space;
  m.hyperparams = hp;
  m.seed = seed;
  if (!m.weights.allFinite() || !m.bias.allFinite()) {
    throw Error(std::string(kind_name(kind)) + " training produced non-finite weights");
  }
  return m;
}

Eigen::MatrixXd decision_scores(const ClassifierModel& model, const FeatureMatrix& x) {
  if (x.cols() != model.weights.cols()) {
    throw Error("feature width " + std::to_string(x.cols()) + " does not match model width " +
                std::to_string(model.weights.cols()));
  }
  Eigen::MatrixXd s = x * model.weights.transpose();
  s.rowwise() += model.bias.transpose();
  return s;
}

Prediction predict(const ClassifierModel& model, const FeatureMatrix& x) {
  Prediction out;
  Eigen::MatrixXd s = decision_scores(model, x);
  out.labels.reserve(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < s.cols(); ++k) {
      if (s(i, k) > s(i, best)) best = k;
    }
    out.labels.push_back(model.classes[static_cast<std::size_t>(best)]);
  }
  if (model.kind != ClassifierKind::kLinsvm) {
    softmax_rows(s);
    out.probabilities = std::move(s);
  }
  return out;
}

std::vector<int> predict_labels(const ClassifierModel& model, const FeatureMatrix& x) {
  return predict(model, x).labels;
}

int predict_one(const ClassifierModel& model, const std::vector<double>& features) {
  FeatureMatrix x = Eigen::Map<const Eigen::RowVectorXd>(features.data(),
                                                         static_cast<Eigen::Index>(features.size()));
  return predict_labels(model, x).front();
}

nlohmann::json to_json(const ClassifierModel& model) {
  nlohmann::json weights = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < model.weights.cols(); ++j) row.push_back(model.weights(i, j));
    weights.push_back(std::move(row));
  }
  std::vector<double> bias(model.bias.data(), model.bias.data() + model.bias.size());
  return nlohmann::json{{"kind", kind_name(model.kind)},
                        {"classes", model.classes},
                        {"weights", weights},
                        {"bias", bias},
                        {"num_features", model.num_features()},
                        {"feature_space", feature_space_name(model.space)},
                        {"hyperparams", to_json(model.hyperparams)},
                        {"seed", model.seed}};
}

ClassifierModel classifier_from_json(const nlohmann::json& j) {
  try {
    ClassifierModel m;
    m.kind = parse_kind(j.at("kind").get<std::string>());
    m.classes = j.at("classes").get<std::vector<int>>();
    m.weights = matrix_from_json(j.at("weights"), j.value("num_features", std::size_t{0}));
    const auto bias = j.at("bias").get<std::vector<double>>();
    m.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size()));
    m.space = parse_feature_space(j.at("feature_space").get<std::string>());
    m.hyperparams = hyperparams_from_json(j.value("hyperparams", nlohmann::json::object()));
    m.seed = j.value("seed", std::uint64_t{0});
    if (m.classes.size() < 2 || static_cast<std::size_t>(m.weights.rows()) != m.classes.size() ||
        static_cast<std::size_t>(m.bias.size()) != m.classes.size()) {
      throw Error("classifier model shape is inconsistent");
    }
    if (!std::is_sorted(m.classes.begin(), m.classes.end())) {
      throw Error("classifier classes must be ascending");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed classifier model: ") + e.what());
  }
}

void save_classifier(const std::filesystem::path& path, const ClassifierModel& model) {
  write_file(path, to_json(model).dump() + "\n");
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(path.string() + ": not valid JSON");
  return classifier_from_json(j);
}

FeatureMatrix stack_features(const std::vector<FeatureVector>& rows) {
  if (rows.empty()) return FeatureMatrix(0, 0);
  const std::size_t width = rows.front().values.size();
  FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].values.size() != width || rows[i].space != rows.front().space) {
      throw Error("feature row " + std::to_string(i) + " differs in width or space");
    }
    for (std::size_t j = 0; j < width; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
    }
  }
  return x;
}

}  // namespace absa::classify
