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

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "absa/common.h"
#include "absa/evaluate.h"
#include "absa/rng.h"
#include "support.h"

namespace absa::evaluate {
namespace {

TEST(Report, HandConfusion) {
  const auto r = classification_report({1, 1, 0, -1}, {1, 0, 0, -1});
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
  EXPECT_EQ(r.total, 4u);
  EXPECT_DOUBLE_EQ(r.of(1).precision, 1.0);
  EXPECT_DOUBLE_EQ(r.of(1).recall, 0.5);
  EXPECT_NEAR(r.of(1).f1, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.of(0).precision, 0.5);
  EXPECT_DOUBLE_EQ(r.of(0).recall, 1.0);
  EXPECT_EQ(r.of(-1).support, 1u);
}

TEST(Report, PerfectAbsentAndMismatch) {
  const auto perfect = classification_report({0, 1, 1}, {0, 1, 1}, std::vector<int>{-1, 0, 1});
  EXPECT_DOUBLE_EQ(perfect.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(perfect.of(1).f1, 1.0);
  const auto& absent = perfect.of(-1);
  EXPECT_EQ(absent.precision, 0.0);
  EXPECT_EQ(absent.recall, 0.0);
  EXPECT_EQ(absent.f1, 0.0);
  EXPECT_EQ(absent.support, 0u);
  EXPECT_THROW(classification_report({1}, {1, 0}), Error);
  EXPECT_THROW(classification_report({}, {}), Error);
}

TEST(Report, JsonRoundTrip) {
  const auto r = classification_report({1, 1, 0, -1}, {1, 0, 0, -1});
  const auto back = classification_report_from_json(to_json(r));
  EXPECT_EQ(back.accuracy, r.accuracy);
  ASSERT_EQ(back.classes.size(), 3u);
  EXPECT_EQ(back.of(1).f1, r.of(1).f1);
}

TEST(ReportProperty, MicroRecallIsAccuracyAndBounds) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(60);
    std::vector<int> t, p;
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back(static_cast<int>(rng.uniform_index(3)) - 1);
      p.push_back(static_cast<int>(rng.uniform_index(3)) - 1);
    }
    const auto r = classification_report(t, p);
    std::size_t tp = 0, support = 0;
    for (const auto& c : r.classes) {
      tp += static_cast<std::size_t>(std::llround(c.recall * static_cast<double>(c.support)));
      support += c.support;
      for (double m : {c.precision, c.recall, c.f1}) {
        ASSERT_GE(m, 0.0);
        ASSERT_LE(m, 1.0);
      }
    }
    ASSERT_EQ(support, n);
    EXPECT_NEAR(static_cast<double>(tp) / static_cast<double>(n), r.accuracy, 1e-12);
  }
}

TEST(Kappa, HandExample) {
  // Categories A, B; items {A,A} and {A,B}.
  const auto k = fleiss_kappa_parts({{2, 0}, {1, 1}});
  EXPECT_NEAR(k.observed, 0.5, 1e-15);
  EXPECT_NEAR(k.expected, 0.625, 1e-15);
  EXPECT_NEAR(k.kappa, -1.0 / 3.0, 1e-12);
}

TEST(Kappa, UnanimousAndErrors) {
  EXPECT_NEAR(fleiss_kappa({{3, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 0, 3}}), 1.0, 1e-12);
  EXPECT_EQ(fleiss_kappa({{3, 0}, {3, 0}}), 1.0);  // one category everywhere
  EXPECT_THROW(fleiss_kappa({{2, 0}, {1, 2}}), Error);
  EXPECT_THROW(fleiss_kappa({{1, 0}}), Error);
}

TEST(Kappa, NaIsAFourthCategory) {
  const std::vector<std::vector<AspectLabel>> raters = {
      {AspectLabel::kPositive, AspectLabel::kNotApplicable},
      {AspectLabel::kPositive, AspectLabel::kNegative}};
  const auto table = label_count_table(raters);
  EXPECT_EQ(table[0], (std::vector<std::size_t>{0, 0, 2, 0}));
  EXPECT_EQ(table[1], (std::vector<std::size_t>{1, 0, 0, 1}));
}

TEST(KappaProperty, PermutationInvariant) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t raters = 2 + rng.uniform_index(4), items = 2 + rng.uniform_index(15);
    std::vector<std::vector<AspectLabel>> r(raters);
    for (auto& row : r) {
      for (std::size_t i = 0; i < items; ++i) row.push_back(static_cast<AspectLabel>(static_cast<int>(rng.uniform_index(4)) - 1));
    }
    const double k = fleiss_kappa(label_count_table(r));
    ASSERT_GE(k, -1.0 - 1e-12);
    ASSERT_LE(k, 1.0 + 1e-12);
    auto shuffled = r;
    rng.shuffle(std::span<std::vector<AspectLabel>>(shuffled));
    std::vector<std::size_t> perm(items);
    for (std::size_t i = 0; i < items; ++i) perm[i] = i;
    rng.shuffle(std::span<std::size_t>(perm));
    for (auto& row : shuffled) {
      auto copy = row;
      for (std::size_t i = 0; i < items; ++i) row[i] = copy[perm[i]];
    }
    EXPECT_NEAR(fleiss_kappa(label_count_table(shuffled)), k, 1e-12);
  }
}

using Scores = std::vector<std::vector<std::optional<double>>>;

TEST(Pearson, HandValue) {
  const auto rep = pearson_agreement(Scores{{1, 2, 3}, {1, 2, 4}});
  ASSERT_TRUE(rep.matrix[0][1].has_value());
  // sxy = 3, sxx = 2, syy = 42/9
  EXPECT_NEAR(*rep.matrix[0][1], 9.0 / std::sqrt(84.0), 1e-12);
  EXPECT_NEAR(*rep.matrix[0][1], 0.982, 5e-4);
  EXPECT_EQ(rep.matrix[0][0], 1.0);
  ASSERT_EQ(rep.pairs.size(), 1u);
  EXPECT_EQ(rep.pairs[0].complete, 3u);
  EXPECT_TRUE(rep.pairs[0].p.has_value());
}

TEST(Pearson, IdentityNegationAndUndefined) {
  const auto same = pearson_agreement(Scores{{-1, 0, 1, 1}, {-1, 0, 1, 1}, {-1, 0, 1, 1}});
  for (const auto& pc : same.pairs) EXPECT_NEAR(*pc.r, 1.0, 1e-12);
  EXPECT_NEAR(*same.mean_r, 1.0, 1e-12);
  const auto neg = pearson_agreement(Scores{{-1, 0, 1, 0}, {1, 0, -1, 0}});
  EXPECT_NEAR(*neg.matrix[0][1], -1.0, 1e-12);
  // Two complete items after NA deletion, and a constant rater.
  const auto sparse = pearson_agreement(Scores{{1, std::nullopt, 0, -1}, {1, 0, std::nullopt, -1}, {0, 0, 0, 0}});
  EXPECT_FALSE(sparse.matrix[0][1].has_value());
  EXPECT_FALSE(sparse.matrix[0][2].has_value());
  EXPECT_FALSE(sparse.mean_r.has_value());
  EXPECT_FALSE(sparse.matrix[2][2].has_value());
}

TEST(Pearson, PValueFromT) {
  // r = 0.5, m = 10: t = 0.5 * sqrt(8 / 0.75) = 1.63299, two-sided p = 0.141113 (8 df)
  EXPECT_NEAR(pearson_p_value(0.5, 10), 0.14111328125, 1e-9);
  EXPECT_EQ(pearson_p_value(1.0, 5), 0.0);
}

TEST(PearsonProperty, SymmetricUnitDiagonal) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t raters = 2 + rng.uniform_index(4), items = 3 + rng.uniform_index(20);
    Scores s(raters);
    for (auto& row : s) {
      for (std::size_t i = 0; i < items; ++i) {
        if (rng.uniform01() < 0.15) row.push_back(std::nullopt);
        else row.push_back(static_cast<double>(rng.uniform_index(3)) - 1.0);
      }
    }
    const auto rep = pearson_agreement(s);
    for (std::size_t a = 0; a < raters; ++a) {
      if (rep.matrix[a][a]) EXPECT_EQ(*rep.matrix[a][a], 1.0);
      for (std::size_t b = 0; b < raters; ++b) {
        ASSERT_EQ(rep.matrix[a][b].has_value(), rep.matrix[b][a].has_value());
        if (a != b && rep.matrix[a][b]) {
          EXPECT_NEAR(*rep.matrix[a][b], *rep.matrix[b][a], 1e-12);
          EXPECT_LE(std::abs(*rep.matrix[a][b]), 1.0);
        }
      }
    }
  }
}

TEST(Agreement, MatchesByIdAndRejectsMissing) {
  auto set = [](std::string id, AspectLabel l) {
    ingest::AspectLabelSet s;
    s.review_id = std::move(id);
    s.labels.fill(l);
    return s;
  };
  const std::vector<ingest::AspectLabelSet> a = {set("x", AspectLabel::kPositive), set("y", AspectLabel::kNegative)};
  const std::vector<ingest::AspectLabelSet> b = {set("y", AspectLabel::kNegative), set("x", AspectLabel::kPositive)};
  const auto rep = agreement_report({a, b});
  ASSERT_EQ(rep.size(), kNumAspects);
  EXPECT_NEAR(rep[0].kappa.kappa, 1.0, 1e-12);
  const std::vector<ingest::AspectLabelSet> c = {set("x", AspectLabel::kPositive), set("z", AspectLabel::kNegative)};
  EXPECT_THROW(agreement_report({a, c}), Error);
  EXPECT_THROW(agreement_report({a}), Error);
}

TEST(McNemar, HandCounts) {
  const auto tie = mcnemar_from_counts(7, 7);
  EXPECT_EQ(tie.chi_square, 0.0);
  EXPECT_EQ(tie.one_sided_p, 0.5);
  const auto none = mcnemar_from_counts(0, 0);
  EXPECT_EQ(none.chi_square, 0.0);
  EXPECT_EQ(none.one_sided_p, 0.5);
  const auto strong = mcnemar_from_counts(20, 0);
  EXPECT_NEAR(strong.chi_square, 20.0, 1e-12);
  EXPECT_NEAR(strong.z, std::sqrt(20.0), 1e-12);
  EXPECT_NEAR(strong.z, 4.472, 5e-4);
  const boost::math::normal unit;
  EXPECT_NEAR(strong.one_sided_p, boost::math::cdf(boost::math::complement(unit, std::sqrt(20.0))), 1e-15);
  EXPECT_NEAR(strong.one_sided_p, 3.9e-6, 1e-6);
}

TEST(McNemar, FromPredictions) {
  // a wrong/b right twice, a right/b wrong once, one both right, one both wrong.
  const auto m = mcnemar_one_sided({1, 1, 0, -1, 0}, {0, 0, 0, -1, 1}, {1, 1, 1, -1, 1});
  EXPECT_EQ(m.n01, 2u);
  EXPECT_EQ(m.n10, 1u);
  EXPECT_NEAR(m.chi_square, 1.0 / 3.0, 1e-12);
  EXPECT_THROW(mcnemar_one_sided({1}, {1, 0}, {1}), Error);
}

TEST(McNemarProperty, SwapSymmetry) {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = rng.uniform_index(200), b = rng.uniform_index(200);
    const auto x = mcnemar_from_counts(a, b), y = mcnemar_from_counts(b, a);
    EXPECT_EQ(x.chi_square, y.chi_square);
    EXPECT_EQ(x.z, -y.z);
    if (a + b > 0) EXPECT_NEAR(x.one_sided_p + y.one_sided_p, 1.0, 1e-12);
    const double d = static_cast<double>(a) - static_cast<double>(b);
    if (a + b > 0) EXPECT_NEAR(x.chi_square, d * d / static_cast<double>(a + b), 1e-12);
  }
}

classify::ClassifierModel constant(std::vector<int> classes, int winner) {
  classify::ClassifierModel m;
  m.classes = classes;
  m.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(classes.size()), 1);
  m.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes.size()));
  m.bias(std::find(classes.begin(), classes.end(), winner) - classes.begin()) = 1.0;
  return m;
}

classify::AspectPipeline stub(classify::Architecture arch, int sentiment) {
  classify::AspectPipeline p;
  p.architecture = arch;
  p.num_features = 1;
  for (std::size_t a = 0; a < kNumAspects; ++a) {
    classify::AspectModels m;
    m.sentiment = constant({-1, 0, 1}, sentiment);
    if (arch == classify::Architecture::kTwoStage) m.relevance = constant({0, 1}, 0);
    p.aspects.push_back(m);
  }
  return p;
}

TEST(Compare, StubCountsFollowConstruction) {
  // 40 positive, 10 negative, 25 NA rows. One-stage always says -1, two-stage
  // stage 2 always says +1 (stage 1 says irrelevant, which must not matter).
  std::vector<ingest::AspectLabelSet> truth;
  for (int i = 0; i < 75; ++i) {
    ingest::AspectLabelSet s;
    s.review_id = "r" + std::to_string(i);
    s.labels.fill(i < 40 ? AspectLabel::kPositive : i < 50 ? AspectLabel::kNegative : AspectLabel::kNotApplicable);
    truth.push_back(s);
  }
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(75, 1);
  const auto rows = compare_architectures(stub(classify::Architecture::kOneStage, -1),
                                          stub(classify::Architecture::kTwoStage, 1), x, truth);
  ASSERT_EQ(rows.size(), kNumAspects);
  for (const auto& r : rows) {
    EXPECT_EQ(r.relevant_rows, 50u);
    ASSERT_TRUE(r.result.has_value());
    EXPECT_EQ(r.result->n01, 40u);
    EXPECT_EQ(r.result->n10, 10u);
    EXPECT_NEAR(r.result->chi_square, 18.0, 1e-12);
  }
  const auto same = compare_architectures(stub(classify::Architecture::kOneStage, 1),
                                          stub(classify::Architecture::kTwoStage, 1), x, truth);
  for (const auto& r : same) EXPECT_EQ(r.result->chi_square, 0.0);
  for (auto& s : truth) s.labels.fill(AspectLabel::kNotApplicable);
  for (const auto& r : compare_architectures(stub(classify::Architecture::kOneStage, 1),
                                             stub(classify::Architecture::kTwoStage, 1), x, truth)) {
    EXPECT_FALSE(r.result.has_value());
  }
}

TEST(Tables, ColumnOrderAndRows) {
  std::vector<ClassificationReport> reps(kNumAspects, classification_report({1, 0, -1, 1}, {1, 0, 0, 1}));
  const std::string csv = metrics_table_csv(reps, {-1, 0, 1});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "class,metric,Service,Ambiance,Quality,Menu,Wait Time,Price");
  EXPECT_NE(csv.find("\nPositive,Precision,1.00,"), std::string::npos);
  EXPECT_NE(csv.find("\nNegative,Support,1,"), std::string::npos);
  EXPECT_NE(csv.find("\nall,Accuracy,0.75,"), std::string::npos);
  const std::string rel = metrics_table_csv(std::vector<ClassificationReport>(kNumAspects, classification_report({0, 1}, {0, 1})), {0, 1});
  EXPECT_NE(rel.find("\nRelevant,Recall,1.00"), std::string::npos);
  EXPECT_NE(rel.find("\nIrrelevant,F1-Score,1.00"), std::string::npos);
}

}  // namespace
}  // namespace absa::evaluate
