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

#include <cmath>

#include <gtest/gtest.h>

#include "absa/common.h"
#include "absa/regress.h"
#include "absa/rng.h"
#include "absa/util.h"
#include "support.h"

namespace absa::regress {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

RestaurantAggregate row(std::string id, std::string cuisine, std::string state, double rating,
                        std::array<double, kNumAspects> means = {}) {
  RestaurantAggregate r;
  r.business_id = std::move(id);
  r.cuisine = std::move(cuisine);
  r.state = std::move(state);
  r.overall_rating = rating;
  r.means = means;
  r.n_reviews = 1;
  return r;
}

std::vector<RestaurantAggregate> mixed_rows() {
  return {row("a", "American", "AB", 4.0, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}),
          row("b", "Italian", "PA", 3.5, {0.3, -0.2, 0.1, 0.0, -0.5, 0.2}),
          row("c", "Mexican", "CA", 3.0, {-0.4, 0.5, 0.2, 0.1, 0.0, -0.3}),
          row("d", "American", "PA", 4.5, {0.7, 0.1, -0.1, 0.3, 0.2, 0.0}),
          row("e", "Italian", "AB", 2.5, {-0.2, -0.6, 0.4, -0.1, 0.3, 0.1}),
          row("f", "Mexican", "PA", 3.5, {0.2, 0.0, -0.3, 0.5, 0.1, 0.4})};
}

TEST(Design, SpecOneHasSevenColumns) {
  const auto d = encode_design_matrix(mixed_rows(), 1);
  EXPECT_EQ(d.x.cols(), 7);
  EXPECT_EQ(d.terms[0], "(Intercept)");
  EXPECT_EQ(d.terms[2], "Food Quality");
  EXPECT_FALSE(d.cuisine_reference.has_value());
  EXPECT_EQ(d.y(3), 4.5);
}

TEST(Design, ReferenceLevelsAndHandEncoding) {
  const auto d = encode_design_matrix(mixed_rows(), 4);
  EXPECT_EQ(*d.cuisine_reference, "American");
  EXPECT_EQ(*d.state_reference, "AB");
  const std::vector<std::string> dummies(d.terms.begin() + 7, d.terms.end());
  EXPECT_EQ(dummies, (std::vector<std::string>{"cuisine:Italian", "cuisine:Mexican", "state:CA", "state:PA"}));
  // American / AB: every dummy is zero.
  EXPECT_EQ(d.x.row(0).tail(4).sum(), 0.0);
  // Italian / PA: exactly the Italian and PA columns.
  EXPECT_EQ(d.x.row(1).tail(4), (Eigen::RowVector4d(1, 0, 0, 1)));
}

TEST(Design, FallbackReferenceAndDuplicateColumns) {
  auto rows = mixed_rows();
  for (auto& r : rows) {
    if (r.cuisine == "American") r.cuisine = "Chinese";
  }
  EXPECT_EQ(*encode_design_matrix(rows, 2).cuisine_reference, "Chinese");
  // Cuisine and state move in lockstep, so their dummies coincide.
  std::vector<RestaurantAggregate> lock = {row("a", "American", "AB", 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}),
                                           row("b", "Thai", "TN", 4, {0.6, 0.5, 0.4, 0.3, 0.2, 0.1}),
                                           row("c", "American", "AB", 2, {0.3, -0.1, 0.2, 0.0, -0.2, 0.4})};
  try {
    encode_design_matrix(lock, 4);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("cuisine:Thai"), std::string::npos) << msg;
    EXPECT_NE(msg.find("state:TN"), std::string::npos) << msg;
  }
}

TEST(DesignProperty, DummySumsAtMostOnePerFactor) {
  Rng rng(3);
  const char* cuisines[] = {"American", "Italian", "Thai", "Indian"};
  const char* states[] = {"AB", "PA", "FL"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RestaurantAggregate> rows;
    for (int i = 0; i < 30; ++i) {
      rows.push_back(row("b" + std::to_string(i), cuisines[rng.uniform_index(4)], states[rng.uniform_index(3)],
                         1 + 4 * rng.uniform01(), {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                                                   rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}));
    }
    const auto d = encode_design_matrix(rows, 4);
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
      double c = 0, s = 0;
      for (std::size_t j = 7; j < d.terms.size(); ++j) {
        (d.terms[j].rfind("cuisine:", 0) == 0 ? c : s) += d.x(i, static_cast<Eigen::Index>(j));
      }
      EXPECT_TRUE(c == 0 || c == 1);
      EXPECT_TRUE(s == 0 || s == 1);
    }
  }
}

TEST(Ols, ExactLine) {
  MatrixXd x(3, 2);
  x << 1, 1,
       1, 2,
       1, 3;
  const VectorXd y = 2 * x.col(1);
  const auto fit = fit_ols(x, y, {"(Intercept)", "x"});
  EXPECT_NEAR(fit.beta(1), 2.0, 1e-12);
  EXPECT_NEAR(fit.beta(0), 0.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(Ols, OrthogonalResponse) {
  // Centered regressor and a response orthogonal to it.
  MatrixXd x(4, 2);
  x << 1, -1,
       1, 1,
       1, -1,
       1, 1;
  VectorXd y(4);
  y << 1, 1, 3, 3;
  const auto fit = fit_ols(x, y, {"(Intercept)", "x"});
  EXPECT_NEAR(fit.beta(1), 0.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 0.0, 1e-12);
}

TEST(Ols, Errors) {
  MatrixXd x(3, 3);
  x << 1, 2, 4,
       1, 3, 6,
       1, 5, 10;
  EXPECT_THROW(fit_ols(x, VectorXd::Ones(3), {"a", "b", "c"}), Error);  // n <= k
  MatrixXd dep(5, 3);
  dep << 1, 1, 2,
         1, 2, 4,
         1, 3, 6,
         1, 4, 8,
         1, 6, 12;
  try {
    fit_ols(dep, VectorXd::LinSpaced(5, 0, 1), {"(Intercept)", "x", "twice x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("rank deficient"), std::string::npos);
  }
}

TEST(OlsProperty, MatchesNormalEquations) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixXd x = absa::testing::random_matrix(rng, 20, 3);
    x.col(0).setOnes();
    VectorXd y(20);
    for (Eigen::Index i = 0; i < 20; ++i) y(i) = 1.0 + 0.5 * x(i, 1) - 2.0 * x(i, 2) + 0.3 * rng.normal();
    const auto fit = fit_ols(x, y, {"(Intercept)", "x1", "x2"});
    const auto oracle = absa::testing::normal_equations_oracle(x, y);
    for (Eigen::Index j = 0; j < 3; ++j) {
      EXPECT_LT(absa::testing::relative_error(fit.beta(j), oracle.beta(j)), 1e-8);
      EXPECT_LT(absa::testing::relative_error(fit.se(j), oracle.se(j)), 1e-8);
    }
    EXPECT_NEAR(fit.r_squared, oracle.r_squared, 1e-10);
    // Residuals orthogonal to every column.
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_LT(std::abs(x.col(j).dot(fit.residuals)), 1e-6 * y.norm());
    for (const auto& c : fit.coefficients) {
      EXPECT_NEAR(c.ci_lo, c.estimate - 1.96 * c.se, 1e-12);
      EXPECT_EQ(c.stars, significance_stars(c.p));
    }
  }
}

TEST(OlsProperty, DuplicatedRowsShrinkStandardErrors) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 200, k = 3;
    MatrixXd x = absa::testing::random_matrix(rng, n, k);
    x.col(0).setOnes();
    VectorXd y = x * Eigen::Vector3d(1, 2, 3) + VectorXd::NullaryExpr(n, [&] { return rng.normal(); });
    MatrixXd x2(2 * n, k);
    x2 << x, x;
    VectorXd y2(2 * n);
    y2 << y, y;
    const auto a = fit_ols(x, y, {"c", "a", "b"});
    const auto b = fit_ols(x2, y2, {"c", "a", "b"});
    EXPECT_NEAR(b.r_squared, a.r_squared, 1e-12);
    // se ratio: sqrt((n - k) / (2n - k)), which tends to 1/sqrt(2).
    const double ratio = std::sqrt(static_cast<double>(n - k) / static_cast<double>(2 * n - k));
    for (Eigen::Index j = 0; j < k; ++j) {
      EXPECT_NEAR(b.beta(j), a.beta(j), 1e-10);
      EXPECT_NEAR(b.se(j) / a.se(j), ratio, 1e-9);
      EXPECT_NEAR(b.se(j) / a.se(j), 1 / std::sqrt(2.0), 0.01);
    }
  }
}

TEST(OlsProperty, RSquaredMonotoneInColumns) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixXd x = absa::testing::random_matrix(rng, 30, 5);
    x.col(0).setOnes();
    const VectorXd y = absa::testing::random_matrix(rng, 30, 1).col(0);
    double prev = 0.0;
    for (Eigen::Index k = 1; k <= 5; ++k) {
      std::vector<std::string> terms;
      for (Eigen::Index j = 0; j < k; ++j) terms.push_back("t" + std::to_string(j));
      const double r2 = fit_ols(x.leftCols(k), y, terms).r_squared;
      EXPECT_GE(r2, 0.0);
      EXPECT_LE(r2, 1.0);
      EXPECT_GE(r2, prev - 1e-12);
      prev = r2;
    }
  }
}

TEST(Stars, Thresholds) {
  EXPECT_EQ(significance_stars(0.0005), "***");
  EXPECT_EQ(significance_stars(0.001), "**");
  EXPECT_EQ(significance_stars(0.009), "**");
  EXPECT_EQ(significance_stars(0.04), "*");
  EXPECT_EQ(significance_stars(0.07), ".");
  EXPECT_EQ(significance_stars(0.1), "");
  EXPECT_EQ(significance_stars(0.5), "");
}

ingest::CorpusRecord record(std::string id, std::string business) {
  ingest::CorpusRecord r;
  r.review_id = std::move(id);
  r.business_id = std::move(business);
  r.state = "NV";
  r.cuisine = "American";
  r.overall_rating = 4.5;
  return r;
}

classify::SentimentVector vec(std::string id, std::array<int, kNumAspects> v) {
  return {std::move(id), v};
}

TEST(Aggregate, MeansAndBounds) {
  const std::vector<ingest::CorpusRecord> corpus = {record("r1", "b1"), record("r2", "b1"),
                                                     record("r3", "b1"), record("r4", "b2")};
  const auto rows = aggregate_restaurants(
      {vec("r1", {1, 1, 0, 0, 0, 0}), vec("r2", {-1, 1, 0, 0, 0, 0}), vec("r3", {0, 1, 0, 0, 0, 0}),
       vec("r4", {1, 1, 1, 1, 1, 1})},
      corpus);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].business_id, "b1");
  EXPECT_EQ(rows[0].means[0], 0.0);
  EXPECT_EQ(rows[0].means[1], 1.0);
  EXPECT_EQ(rows[0].n_reviews, 3u);
  EXPECT_EQ(rows[0].state, "NV");
  EXPECT_EQ(rows[1].means, (std::array<double, kNumAspects>{1, 1, 1, 1, 1, 1}));
}

TEST(Aggregate, UnknownRowsAbortPastOnePercent) {
  std::vector<ingest::CorpusRecord> corpus;
  std::vector<classify::SentimentVector> preds;
  for (int i = 0; i < 200; ++i) {
    corpus.push_back(record("r" + std::to_string(i), "b" + std::to_string(i % 7)));
    preds.push_back(vec("r" + std::to_string(i), {}));
  }
  preds.push_back(vec("ghost1", {}));
  preds.push_back(vec("ghost2", {}));
  AggregateDiagnostics diag;
  aggregate_restaurants(preds, corpus, &diag);
  EXPECT_EQ(diag.unknown_reviews, 2u);
  preds.push_back(vec("ghost3", {}));
  preds.push_back(vec("ghost4", {}));
  preds.push_back(vec("ghost5", {}));
  EXPECT_THROW(aggregate_restaurants(preds, corpus), Error);
}

TEST(AggregateProperty, MeansWithinUnitInterval) {
  Rng rng(8);
  std::vector<ingest::CorpusRecord> corpus;
  std::vector<classify::SentimentVector> preds;
  for (int i = 0; i < 500; ++i) {
    corpus.push_back(record("r" + std::to_string(i), "b" + std::to_string(rng.uniform_index(40))));
    std::array<int, kNumAspects> v{};
    for (auto& x : v) x = static_cast<int>(rng.uniform_index(3)) - 1;
    preds.push_back(vec("r" + std::to_string(i), v));
  }
  for (const auto& r : aggregate_restaurants(preds, corpus)) {
    for (double m : r.means) {
      EXPECT_GE(m, -1.0);
      EXPECT_LE(m, 1.0);
    }
  }
}

TEST(Aggregate, CsvRoundTrip) {
  absa::testing::ScratchDir dir("agg");
  const auto rows = mixed_rows();
  write_aggregates(dir / "a.csv", rows);
  const auto back = read_aggregates(dir / "a.csv");
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(back[1].cuisine, "Italian");
  EXPECT_EQ(back[1].means, rows[1].means);
  EXPECT_EQ(read_file(dir / "a.csv").substr(0, 12), "business_id,");
}

TEST(Suite, RecoversGenerativeWeights) {
  // rating = 3 + 1.5 food + 0.7 service + N(0, 0.1)
  Rng rng(9);
  const char* cuisines[] = {"American", "Italian", "Thai"};
  const char* states[] = {"AB", "PA", "FL", "NV"};
  std::vector<RestaurantAggregate> rows;
  for (int i = 0; i < 400; ++i) {
    std::array<double, kNumAspects> m{};
    for (auto& x : m) x = rng.uniform(-1, 1);
    const double y = 3 + 1.5 * m[1] + 0.7 * m[0] + 0.1 * rng.normal();
    rows.push_back(row("b" + std::to_string(1000 + i), cuisines[rng.uniform_index(3)],
                       states[rng.uniform_index(4)], y, m));
  }
  const auto suite = run_model_suite(rows);
  ASSERT_EQ(suite.size(), 4u);
  for (const auto& rep : suite) {
    const auto& food = rep.term("Food Quality");
    const auto& service = rep.term("Service");
    EXPECT_LT(std::abs(food.estimate - 1.5), 3 * food.se) << rep.spec;
    EXPECT_LT(std::abs(service.estimate - 0.7), 3 * service.se) << rep.spec;
    EXPECT_GT(rep.fit.r_squared, 0.95);
  }
  EXPECT_EQ(suite[0].fit.k, 7u);
  EXPECT_EQ(suite[3].fit.k, 7u + 2u + 3u);
  EXPECT_GE(suite[3].fit.r_squared, suite[0].fit.r_squared);
  EXPECT_THROW(suite[0].term("state:PA"), Error);

  const auto back = regression_report_from_json(to_json(suite[3]));
  EXPECT_EQ(back.fit.coefficients.size(), suite[3].fit.coefficients.size());
  EXPECT_EQ(back.term("state:PA").estimate, suite[3].term("state:PA").estimate);
  const std::string md = regression_markdown("Models", suite);
  EXPECT_LT(md.find("Food Quality"), md.find("Italian"));
  EXPECT_LT(md.find("Italian"), md.find("PA"));
  const std::string effects = effect_plot_csv(suite);
  EXPECT_EQ(effects.substr(0, effects.find('\n')), "model,group,term,estimate,ci_lo,ci_hi,stars");
}

}  // namespace
}  // namespace absa::regress
