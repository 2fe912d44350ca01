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

#include "absa/regress.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "absa/util.h"

namespace absa::regress {
namespace {

struct BusinessInfo {
  double overall_rating = 0.0;
  std::string state;
  std::string cuisine;
};

struct Accumulator {
  std::array<double, kNumAspects> sums{};
  std::size_t n = 0;
};

class Aggregator {
 public:
  void add_business(const ingest::CorpusRecord& r) {
    review_business_.emplace(r.review_id, r.business_id);
    businesses_.try_emplace(r.business_id, BusinessInfo{r.overall_rating, r.state, r.cuisine});
  }

  void add_prediction(const classify::SentimentVector& v) {
    ++diag_.prediction_rows;
    auto it = review_business_.find(v.review_id);
    if (it == review_business_.end()) {
      ++diag_.unknown_reviews;
      return;
    }
    auto& acc = acc_[it->second];
    for (std::size_t a = 0; a < kNumAspects; ++a) {
      if (v.values[a] < -1 || v.values[a] > 1) {
        throw Error("prediction for review " + v.review_id + " has value outside {-1,0,1}");
      }
      acc.sums[a] += v.values[a];
    }
    ++acc.n;
  }

  std::vector<RestaurantAggregate> finish(AggregateDiagnostics* diag) const {
    if (diag) *diag = diag_;
    if (diag_.prediction_rows > 0 &&
        static_cast<double>(diag_.unknown_reviews) >
            kMaxUnknownFraction * static_cast<double>(diag_.prediction_rows)) {
      throw Error(std::to_string(diag_.unknown_reviews) + " of " +
                  std::to_string(diag_.prediction_rows) +
                  " prediction rows reference reviews missing from the corpus");
    }
    std::vector<RestaurantAggregate> out;
    out.reserve(acc_.size());
    for (const auto& [id, acc] : acc_) {
      const auto& info = businesses_.at(id);
      RestaurantAggregate r;
      r.business_id = id;
      for (std::size_t a = 0; a < kNumAspects; ++a) {
        r.means[a] = acc.sums[a] / static_cast<double>(acc.n);
      }
      r.overall_rating = info.overall_rating;
      r.state = info.state;
      r.cuisine = info.cuisine;
      r.n_reviews = acc.n;
      out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.business_id < b.business_id; });
    return out;
  }

 private:
  std::unordered_map<std::string, std::string> review_business_;
  std::unordered_map<std::string, BusinessInfo> businesses_;
  std::unordered_map<std::string, Accumulator> acc_;
  AggregateDiagnostics diag_;
};

classify::SentimentVector parse_prediction_row(const std::vector<std::string>& f,
                                               std::size_t line) {
  if (f.size() != kNumAspects + 1) {
    throw Error("prediction CSV line " + std::to_string(line) + ": expected " +
                std::to_string(kNumAspects + 1) + " fields, found " + std::to_string(f.size()));
  }
  classify::SentimentVector v;
  v.review_id = f[0];
  for (std::size_t a = 0; a < kNumAspects; ++a) {
    const auto& cell = f[a + 1];
    if (cell == "-1") v.values[a] = -1;
    else if (cell == "0") v.values[a] = 0;
    else if (cell == "1") v.values[a] = 1;
    else {
      throw Error("prediction CSV line " + std::to_string(line) + ", column " +
                  std::string(aspect_key(kAllAspects[a])) + ": invalid value " + cell);
    }
  }
  return v;
}

std::vector<std::string> sorted_levels(const std::vector<RestaurantAggregate>& rows,
                                       std::string RestaurantAggregate::*field) {
  std::set<std::string> levels;
  for (const auto& r : rows) levels.insert(r.*field);
  return {levels.begin(), levels.end()};
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("invalid number '" + s + "' in " + what);
  }
}

std::string cell(const Coefficient& c) {
  return format_fixed(c.estimate, 2) + " (" + format_fixed(c.ci_lo, 2) + ", " +
         format_fixed(c.ci_hi, 2) + ")" + c.stars;
}

}  // namespace

std::string aspect_term(Aspect a) { return std::string(aspect_title(a)); }

std::vector<RestaurantAggregate> aggregate_restaurants(
    const std::vector<classify::SentimentVector>& predictions,
    const std::vector<ingest::CorpusRecord>& corpus, AggregateDiagnostics* diag) {
  Aggregator agg;
  for (const auto& r : corpus) agg.add_business(r);
  for (const auto& p : predictions) agg.add_prediction(p);
  return agg.finish(diag);
}

std::vector<RestaurantAggregate> aggregate_restaurants(const std::filesystem::path& predictions_csv,
                                                       const std::filesystem::path& corpus_jsonl,
                                                       AggregateDiagnostics* diag) {
  Aggregator agg;
  ingest::for_each_corpus_record(corpus_jsonl,
                                 [&](ingest::CorpusRecord&& r) { agg.add_business(r); });
  std::ifstream in(predictions_csv);
  if (!in) throw Error("cannot open " + predictions_csv.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (n == 1) {
      if (line != classify::prediction_csv_header()) {
        throw Error(predictions_csv.string() + ": unexpected header '" + line + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    agg.add_prediction(parse_prediction_row(split_csv_line(line), n));
  }
  if (n == 0) throw Error(predictions_csv.string() + ": empty file");
  return agg.finish(diag);
}

std::vector<classify::SentimentVector> read_predictions(const std::filesystem::path& csv) {
  const auto table = read_csv(csv);
  if (table.header.empty()) throw Error(csv.string() + ": empty file");
  std::vector<classify::SentimentVector> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out.push_back(parse_prediction_row(table.rows[i], table.line_numbers[i]));
  }
  return out;
}

std::vector<classify::SentimentVector> labels_as_sentiments(
    const std::vector<ingest::AspectLabelSet>& labels) {
  std::vector<classify::SentimentVector> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    classify::SentimentVector v;
    v.review_id = l.review_id;
    for (Aspect a : kAllAspects) v.values[index_of(a)] = sentiment_or_neutral(l[a]);
    out.push_back(std::move(v));
  }
  return out;
}

std::string aggregates_csv(const std::vector<RestaurantAggregate>& rows) {
  std::ostringstream os;
  os << "business_id";
  for (Aspect a : kAllAspects) os << ',' << aspect_key(a);
  os << ",overall_rating,state,cuisine,n_reviews\n";
  for (const auto& r : rows) {
    os << csv_field(r.business_id);
    for (double m : r.means) os << ',' << format_roundtrip(m);
    os << ',' << format_roundtrip(r.overall_rating) << ',' << csv_field(r.state) << ','
       << csv_field(r.cuisine) << ',' << r.n_reviews << '\n';
  }
  return os.str();
}

void write_aggregates(const std::filesystem::path& path, const std::vector<RestaurantAggregate>& rows) {
  write_file(path, aggregates_csv(rows));
}

std::vector<RestaurantAggregate> read_aggregates(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const std::size_t width = kNumAspects + 5;
  if (table.header.size() != width || table.header[0] != "business_id") {
    throw Error(path.string() + ": not an aggregates CSV");
  }
  std::vector<RestaurantAggregate> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::string where = path.string() + " line " + std::to_string(table.line_numbers[i]);
    if (f.size() != width) throw Error(where + ": expected " + std::to_string(width) + " fields");
    RestaurantAggregate r;
    r.business_id = f[0];
    for (std::size_t a = 0; a < kNumAspects; ++a) {
      r.means[a] = parse_double(f[a + 1], where);
      if (r.means[a] < -1.0 || r.means[a] > 1.0) throw Error(where + ": aspect mean outside [-1, 1]");
    }
    r.overall_rating = parse_double(f[kNumAspects + 1], where);
    r.state = f[kNumAspects + 2];
    r.cuisine = f[kNumAspects + 3];
    const double n = parse_double(f[kNumAspects + 4], where);
    if (n < 1 || n != std::floor(n)) throw Error(where + ": n_reviews must be a positive integer");
    r.n_reviews = static_cast<std::size_t>(n);
    out.push_back(std::move(r));
  }
  return out;
}

DesignMatrix encode_design_matrix(const std::vector<RestaurantAggregate>& rows, int spec) {
  if (spec < 1 || spec > 4) throw Error("model spec must be 1, 2, 3 or 4");
  if (rows.size() < 2) throw Error("regression needs at least 2 restaurants");
  DesignMatrix d;
  d.terms.push_back("(Intercept)");
  for (Aspect a : kAllAspects) d.terms.push_back(aspect_term(a));

  struct Factor {
    std::string prefix;
    std::string RestaurantAggregate::*field;
    std::vector<std::string> levels;  // excluding the reference
  };
  std::vector<Factor> factors;
  auto add_factor = [&](const std::string& prefix, std::string RestaurantAggregate::*field,
                        const std::string& preferred, std::optional<std::string>& ref_out) {
    auto levels = sorted_levels(rows, field);
    std::string ref = std::find(levels.begin(), levels.end(), preferred) != levels.end()
                          ? preferred
                          : levels.front();
    ref_out = ref;
    levels.erase(std::find(levels.begin(), levels.end(), ref));
    for (const auto& l : levels) d.terms.push_back(prefix + l);
    factors.push_back({prefix, field, levels});
  };
  if (spec == 2 || spec == 4) {
    add_factor("cuisine:", &RestaurantAggregate::cuisine, kCuisineReference, d.cuisine_reference);
  }
  if (spec == 3 || spec == 4) {
    add_factor("state:", &RestaurantAggregate::state, kStateReference, d.state_reference);
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  d.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d.terms.size()));
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    d.y(i) = r.overall_rating;
    d.x(i, 0) = 1.0;
    for (std::size_t a = 0; a < kNumAspects; ++a) d.x(i, static_cast<Eigen::Index>(a + 1)) = r.means[a];
    Eigen::Index col = kNumAspects + 1;
    for (const auto& f : factors) {
      for (const auto& level : f.levels) {
        if (r.*f.field == level) d.x(i, col) = 1.0;
        ++col;
      }
    }
  }
  for (Eigen::Index a = 0; a < d.x.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < d.x.cols(); ++b) {
      if (d.x.col(a) == d.x.col(b)) {
        throw Error("design columns '" + d.terms[static_cast<std::size_t>(a)] + "' and '" +
                    d.terms[static_cast<std::size_t>(b)] + "' are identical");
      }
    }
  }
  return d;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.1) return ".";
  return "";
}

OlsFit fit_ols(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& y_in,
               const std::vector<std::string>& terms, const std::optional<Eigen::VectorXd>& weights) {
  const auto n = x_in.rows();
  const auto k = x_in.cols();
  if (static_cast<std::size_t>(k) != terms.size()) throw Error("fit_ols: term count mismatch");
  if (y_in.size() != n) throw Error("fit_ols: response length mismatch");
  if (n <= k) {
    throw Error("fit_ols: need more rows (" + std::to_string(n) + ") than columns (" +
                std::to_string(k) + ")");
  }
  if (!x_in.allFinite() || !y_in.allFinite()) throw Error("fit_ols: non-finite input");
  Eigen::MatrixXd x = x_in;
  Eigen::VectorXd y = y_in;
  if (weights) {
    if (weights->size() != n || (weights->array() <= 0.0).any()) {
      throw Error("fit_ols: weights must be positive, one per row");
    }
    const Eigen::VectorXd s = weights->cwiseSqrt();
    x = s.asDiagonal() * x;
    y = s.asDiagonal() * y;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < k) {
    std::string dependent;
    for (Eigen::Index j = qr.rank(); j < k; ++j) {
      if (!dependent.empty()) dependent += ", ";
      dependent += terms[static_cast<std::size_t>(qr.colsPermutation().indices()(j))];
    }
    throw Error("design matrix is rank deficient; dependent columns: " + dependent);
  }
  OlsFit fit;
  fit.n = static_cast<std::size_t>(n);
  fit.k = static_cast<std::size_t>(k);
  fit.beta = qr.solve(y);
  fit.residuals = y - x * fit.beta;
  const double rss = fit.residuals.squaredNorm();
  fit.sigma2 = rss / static_cast<double>(n - k);

  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::VectorXd diag_perm = r_inv.rowwise().squaredNorm();
  fit.se.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    fit.se(qr.colsPermutation().indices()(j)) = std::sqrt(fit.sigma2 * diag_perm(j));
  }

  double mean = 0.0, tss = 0.0;
  if (weights) {
    mean = weights->dot(y_in) / weights->sum();
    tss = (weights->array() * (y_in.array() - mean).square()).sum();
  } else {
    mean = y_in.mean();
    tss = (y_in.array() - mean).square().sum();
  }
  fit.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;

  for (Eigen::Index j = 0; j < k; ++j) {
    Coefficient c;
    c.term = terms[static_cast<std::size_t>(j)];
    c.estimate = fit.beta(j);
    c.se = fit.se(j);
    c.ci_lo = c.estimate - 1.96 * c.se;
    c.ci_hi = c.estimate + 1.96 * c.se;
    if (c.se > 0.0) {
      c.p = std::erfc(std::abs(c.estimate / c.se) / std::sqrt(2.0));
    } else {
      c.p = c.estimate == 0.0 ? 1.0 : 0.0;
    }
    c.stars = significance_stars(c.p);
    fit.coefficients.push_back(std::move(c));
  }
  return fit;
}

const Coefficient& RegressionReport::term(const std::string& name) const {
  for (const auto& c : fit.coefficients) {
    if (c.term == name) return c;
  }
  throw Error("model " + std::to_string(spec) + " has no term '" + name + "'");
}

RegressionReport run_model(const std::vector<RestaurantAggregate>& rows, int spec) {
  auto d = encode_design_matrix(rows, spec);
  RegressionReport r;
  r.spec = spec;
  r.fit = fit_ols(d.x, d.y, d.terms);
  r.cuisine_reference = d.cuisine_reference;
  r.state_reference = d.state_reference;
  return r;
}

std::vector<RegressionReport> run_model_suite(const std::vector<RestaurantAggregate>& rows) {
  if (rows.empty()) throw Error("no restaurant aggregates to regress");
  std::vector<std::future<RegressionReport>> jobs;
  for (int spec = 1; spec <= 4; ++spec) {
    jobs.push_back(std::async(std::launch::async, [&rows, spec] { return run_model(rows, spec); }));
  }
  std::vector<RegressionReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

nlohmann::json to_json(const RegressionReport& r) {
  nlohmann::json coefs = nlohmann::json::array();
  for (const auto& c : r.fit.coefficients) {
    coefs.push_back({{"term", c.term},
                     {"estimate", c.estimate},
                     {"se", c.se},
                     {"ci_lo", c.ci_lo},
                     {"ci_hi", c.ci_hi},
                     {"p", c.p},
                     {"stars", c.stars}});
  }
  nlohmann::json j{{"spec", r.spec},
                   {"r_squared", r.fit.r_squared},
                   {"sigma2", r.fit.sigma2},
                   {"n", r.fit.n},
                   {"coefficients", coefs}};
  j["cuisine_reference"] = r.cuisine_reference ? nlohmann::json(*r.cuisine_reference) : nlohmann::json();
  j["state_reference"] = r.state_reference ? nlohmann::json(*r.state_reference) : nlohmann::json();
  return j;
}

RegressionReport regression_report_from_json(const nlohmann::json& j) {
  try {
    RegressionReport r;
    r.spec = j.at("spec").get<int>();
    r.fit.r_squared = j.at("r_squared").get<double>();
    r.fit.sigma2 = j.value("sigma2", 0.0);
    r.fit.n = j.value("n", std::size_t{0});
    for (const auto& c : j.at("coefficients")) {
      r.fit.coefficients.push_back({c.at("term").get<std::string>(), c.at("estimate").get<double>(),
                                    c.at("se").get<double>(), c.at("ci_lo").get<double>(),
                                    c.at("ci_hi").get<double>(), c.at("p").get<double>(),
                                    c.at("stars").get<std::string>()});
    }
    r.fit.k = r.fit.coefficients.size();
    if (j.contains("cuisine_reference") && !j["cuisine_reference"].is_null()) {
      r.cuisine_reference = j["cuisine_reference"].get<std::string>();
    }
    if (j.contains("state_reference") && !j["state_reference"].is_null()) {
      r.state_reference = j["state_reference"].get<std::string>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed regression report: ") + e.what());
  }
}

std::string coefficients_csv(const RegressionReport& r) {
  std::ostringstream os;
  os << "term,estimate,se,ci_lo,ci_hi,p,stars\n";
  for (const auto& c : r.fit.coefficients) {
    os << csv_field(c.term) << ',' << format_roundtrip(c.estimate) << ',' << format_roundtrip(c.se)
       << ',' << format_roundtrip(c.ci_lo) << ',' << format_roundtrip(c.ci_hi) << ','
       << format_roundtrip(c.p) << ',' << c.stars << '\n';
  }
  os << "R2," << format_roundtrip(r.fit.r_squared) << ",,,,,\n";
  return os.str();
}

std::string regression_markdown(const std::string& title,
                                const std::vector<RegressionReport>& reports) {
  std::ostringstream os;
  os << "**" << title << "**\n\n| Term |";
  for (const auto& r : reports) os << " Model " << r.spec << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < reports.size(); ++i) os << "---|";
  os << '\n';
  auto row = [&](const std::string& label, const std::string& term) {
    os << "| " << label << " |";
    for (const auto& r : reports) {
      const Coefficient* c = nullptr;
      for (const auto& x : r.fit.coefficients) {
        if (x.term == term) c = &x;
      }
      os << ' ' << (c ? cell(*c) : std::string()) << " |";
    }
    os << '\n';
  };
  for (Aspect a : kAllAspects) row(aspect_term(a), aspect_term(a));
  os << "| R² |";
  for (const auto& r : reports) os << ' ' << format_fixed(r.fit.r_squared, 3) << " |";
  os << '\n';
  // Control effects, in first-seen order across the models.
  for (const std::string prefix : {"cuisine:", "state:"}) {
    std::vector<std::string> terms;
    for (const auto& r : reports) {
      for (const auto& c : r.fit.coefficients) {
        if (c.term.rfind(prefix, 0) == 0 &&
            std::find(terms.begin(), terms.end(), c.term) == terms.end()) {
          terms.push_back(c.term);
        }
      }
    }
    if (terms.empty()) continue;
    std::sort(terms.begin(), terms.end());
    os << "| **" << (prefix == "cuisine:" ? "Cuisine" : "State") << "** |";
    for (std::size_t i = 0; i < reports.size(); ++i) os << " |";
    os << '\n';
    for (const auto& t : terms) row(t.substr(prefix.size()), t);
  }
  os << "\nSignificance: *** p < 0.001, ** p < 0.01, * p < 0.05, . p < 0.1\n";
  return os.str();
}

std::string effect_plot_csv(const std::vector<RegressionReport>& reports) {
  std::ostringstream os;
  os << "model,group,term,estimate,ci_lo,ci_hi,stars\n";
  for (const auto& r : reports) {
    for (const auto& c : r.fit.coefficients) {
      if (c.term == "(Intercept)") continue;
      std::string group = "aspect", term = c.term;
      if (c.term.rfind("cuisine:", 0) == 0) {
        group = "cuisine";
        term = c.term.substr(8);
      } else if (c.term.rfind("state:", 0) == 0) {
        group = "state";
        term = c.term.substr(6);
      }
      os << r.spec << ',' << group << ',' << csv_field(term) << ',' << format_roundtrip(c.estimate)
         << ',' << format_roundtrip(c.ci_lo) << ',' << format_roundtrip(c.ci_hi) << ',' << c.stars
         << '\n';
    }
  }
  return os.str();
}

}  // namespace absa::regress
