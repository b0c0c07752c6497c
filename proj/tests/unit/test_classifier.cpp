#include <cmath>
#include <limits>

#include "bmrisk/classifier.hpp"
#include "bmrisk/error.hpp"
#include "bmrisk/feature_matrix.hpp"
#include "bmrisk/rng.hpp"
#include "doctest.h"
#include "oracles/toy_data.hpp"

using namespace bmrisk;

namespace {

FeatureMatrix rows_matrix(const std::vector<std::vector<double>>& rows, std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < p; ++i) names.push_back("x" + std::to_string(i));
  return FeatureMatrix::from_rows(names, rows);
}

}  // namespace

TEST_CASE("hand-solved hard-margin instance recovers the analytic weights") {
  // Standardised, the points are (+-1, +-1); classes split on the first
  // coordinate, so the max-margin solution is w = (1, 0), b = 0 (margin 2).
  const auto x = rows_matrix({{2, 1}, {2, -1}, {-2, 1}, {-2, -1}}, 2);
  const std::vector<int> y{1, 1, 0, 0};
  ClassifierConfig cfg;
  cfg.C = 1e4;
  cfg.tolerance = 1e-10;
  const auto fr = fit(x, y, cfg);
  CHECK(fr.converged);
  CHECK(fr.model.mu == std::vector<double>{0.0, 0.0});
  CHECK(fr.model.sigma == std::vector<double>{2.0, 1.0});
  CHECK(std::fabs(fr.model.w[0] - 1.0) < 1e-3);
  CHECK(std::fabs(fr.model.w[1]) < 1e-3);
  CHECK(std::fabs(fr.model.b) < 1e-3);
  CHECK(fr.kkt_gap < 1e-4);
  CHECK(predict(fr.model, x) == std::vector<int>{1, 1, 0, 0});
  // the standardised origin scores b
  const auto origin = rows_matrix({{0, 0}}, 2);
  CHECK(decision_scores(fr.model, origin)[0] == fr.model.b);
}

TEST_CASE("class weights follow the sensitivity rule") {
  const auto x = rows_matrix({{0}, {1}, {2}, {3}, {4}, {5}}, 1);
  const std::vector<int> y{0, 0, 0, 0, 1, 1};
  ClassifierConfig cfg;
  cfg.sensitivity_weight = 3.0;
  const auto m = fit(x, y, cfg).model;
  CHECK(m.c_pos == 3.0 * 4.0 / 2.0);
  CHECK(m.c_neg == 1.0);
}

TEST_CASE("zero training error with C = 1e4 on separable instances") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t p = 1 + rng.below(5);
    const std::size_t n = 6 + rng.below(60);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    oracle::separable(rng, n, p, 0.05 + 0.2 * rng.uniform(), rows, y);
    const auto x = rows_matrix(rows, p);
    ClassifierConfig cfg;
    cfg.C = 1e4;
    cfg.max_epochs = 5000;
    const auto fr = fit(x, y, cfg);
    CHECK_MESSAGE(predict(fr.model, x) == y, "trial " << trial);
    // training scores replay bit-exactly
    CHECK(decision_scores(fr.model, x) == fr.train_scores);

    // positive per-feature rescaling with refit keeps the training predictions
    auto scaled = rows;
    std::vector<double> a(p);
    for (auto& v : a) v = rng.uniform(0.1, 20.0);
    for (auto& r : scaled)
      for (std::size_t j = 0; j < p; ++j) r[j] *= a[j];
    CHECK(predict(fit(rows_matrix(scaled, p), y, cfg).model, rows_matrix(scaled, p)) == y);
  }
}

TEST_CASE("duplicating every sample with C halved leaves the boundary in place") {
  Rng rng(5);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    const int label = i % 5 == 0 ? 1 : 0;
    rows.push_back({rng.normal(label ? 1.0 : -0.5, 1.0), rng.normal(0.3 * label, 1.0)});
    y.push_back(label);
  }
  ClassifierConfig cfg;
  cfg.C = 1.0;
  cfg.tolerance = 1e-12;
  cfg.max_epochs = 100000;
  const auto a = fit(rows_matrix(rows, 2), y, cfg);
  auto rows2 = rows;
  rows2.insert(rows2.end(), rows.begin(), rows.end());
  auto y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  cfg.C = 0.5;
  const auto b = fit(rows_matrix(rows2, 2), y2, cfg);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::fabs(a.model.w[j] - b.model.w[j]) < 1e-6);
  CHECK(std::fabs(a.model.b - b.model.b) < 1e-6);
}

TEST_CASE("large sensitivity weight reaches full training sensitivity first") {
  Rng rng(8);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 110; ++i) {
    const int label = i < 10 ? 1 : 0;
    rows.push_back({rng.normal(label ? 1.0 : -1.0, 1.0)});
    y.push_back(label);
  }
  const auto x = rows_matrix(rows, 1);
  auto rates = [&](double s) {
    ClassifierConfig cfg;
    cfg.sensitivity_weight = s;
    const auto pred = predict(fit(x, y, cfg).model, x);
    int tp = 0, tn = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      tp += y[i] == 1 && pred[i] == 1;
      tn += y[i] == 0 && pred[i] == 0;
    }
    return std::pair<double, double>{tp / 10.0, tn / 100.0};
  };
  const auto low = rates(0.05);
  const auto high = rates(50.0);
  CHECK(low.first < 1.0);
  CHECK(high.first == 1.0);
  CHECK(high.second < 1.0);
  double prev = 0.0;
  for (double s : {0.05, 0.2, 1.0, 2.0, 5.0, 20.0, 50.0}) {
    const double sens = rates(s).first;
    CHECK(sens >= prev);
    prev = sens;
  }
}

TEST_CASE("thresholds, monotonicity, determinism and serialisation") {
  Rng rng(21);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  oracle::separable(rng, 30, 3, 0.1, rows, y);
  const auto x = rows_matrix(rows, 3);
  ClassifierConfig cfg;
  cfg.seed = 4;
  const auto a = fit(x, y, cfg);
  const auto b = fit(x, y, cfg);
  CHECK(a.model == b.model);
  CHECK(a.train_scores == b.train_scores);

  const auto scores = decision_scores(a.model, x);
  const double inf = std::numeric_limits<double>::infinity();
  for (int v : predict(scores, -inf)) CHECK(v == 1);
  for (int v : predict(scores, inf)) CHECK(v == 0);

  // raising a feature with positive weight raises the score
  std::size_t j = 0;
  while (j < 3 && !(a.model.w[j] > 0)) ++j;
  if (j < 3) {
    auto bumped = rows;
    for (auto& r : bumped) r[j] += 1.0;
    const auto s2 = decision_scores(a.model, rows_matrix(bumped, 3));
    for (std::size_t i = 0; i < s2.size(); ++i) CHECK(s2[i] > scores[i]);
  }

  auto m = a.model;
  m.theta = 0.25;
  const auto text = model_to_json(m);
  CHECK(model_from_json(text) == m);
  CHECK(model_to_json(model_from_json(text)) == text);
  CHECK_THROWS_AS(model_from_json("{}"), DataError);
  CHECK_THROWS_AS(model_from_json("not json"), DataError);

  // scoring selects columns by name
  const auto reordered = FeatureMatrix::from_rows({"x2", "zz", "x0", "x1"}, [&] {
    std::vector<std::vector<double>> r;
    for (const auto& row : rows) r.push_back({row[2], 99.0, row[0], row[1]});
    return r;
  }());
  CHECK(decision_scores(a.model, reordered) == scores);
  CHECK_THROWS_AS(decision_scores(a.model, rows_matrix(rows, 2).select_columns({"x0"})), DataError);
}

TEST_CASE("fit error paths") {
  const auto x = rows_matrix({{0}, {1}, {2}}, 1);
  CHECK_THROWS_AS(fit(x, std::vector<int>{1, 1, 1}, {}), DataError);
  CHECK_THROWS_AS(fit(x, std::vector<int>{1, 0}, {}), DataError);
  CHECK_THROWS_AS(fit(x, std::vector<int>{1, 0, 2}, {}), DataError);
  ClassifierConfig bad;
  bad.C = 0;
  CHECK_THROWS_AS(fit(x, std::vector<int>{1, 0, 0}, bad), ConfigError);
  CHECK_THROWS_AS(rows_matrix({{0}, {std::nan("")}, {2}}, 1), NumericalError);
  // a constant column keeps sigma 1 and weight 0
  const auto cx = FeatureMatrix::from_rows({"a", "k"}, {{0, 5}, {1, 5}, {2, 5}, {3, 5}});
  const auto m = fit(cx, std::vector<int>{0, 0, 1, 1}, {}).model;
  CHECK(m.sigma[1] == 1.0);
  CHECK(m.w[1] == 0.0);
}
