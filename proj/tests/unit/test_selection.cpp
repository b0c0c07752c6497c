#include <cmath>
#include <set>

#include "bmrisk/error.hpp"
#include "bmrisk/feature_matrix.hpp"
#include "bmrisk/rng.hpp"
#include "bmrisk/selection.hpp"
#include "doctest.h"
#include "oracles/mrmr_oracle.hpp"

using namespace bmrisk;

namespace {

FeatureMatrix matrix(const std::vector<std::vector<double>>& cols, const std::vector<std::string>& names) {
  std::vector<std::vector<double>> rows(cols.front().size(), std::vector<double>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].size(); ++r) rows[r][c] = cols[c][r];
  return FeatureMatrix::from_rows(names, rows);
}

std::vector<std::string> names_for(std::size_t p) {
  std::vector<std::string> n;
  for (std::size_t i = 0; i < p; ++i) n.push_back("f" + std::to_string(10 + i));
  return n;
}

}  // namespace

TEST_CASE("pearson examples") {
  const std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  CHECK(pearson(a, a).r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(a, b).r == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
  CHECK(std::fabs(pearson(x, y).r - 0.8) < 1e-15);
  const std::vector<double> c{5, 5, 5};
  const auto deg = pearson(c, a);
  CHECK(deg.r == 0.0);
  CHECK(deg.degenerate);
  CHECK(pearson(a, c).degenerate);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), DataError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), DataError);
}

TEST_CASE("pearson matches the direct formula, symmetry and affine laws on random vectors") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal(0, 3);
      y[i] = 0.5 * x[i] + rng.normal(0, 1 + trial % 5);
    }
    const double r = pearson(x, y).r;
    CHECK(std::fabs(r - oracle::pearson_two_pass(x, y)) <= 1e-12);
    CHECK(std::fabs(r - oracle::pearson_sums(x, y)) <= 1e-12);
    CHECK(std::fabs(r) <= 1.0);
    CHECK(pearson(y, x).r == r);
    const double a = (trial % 2 ? -1 : 1) * rng.uniform(0.1, 10), b0 = rng.uniform(-50, 50);
    std::vector<double> ax(n);
    for (std::size_t i = 0; i < n; ++i) ax[i] = a * x[i] + b0;
    CHECK(std::fabs(pearson(ax, y).r - (a > 0 ? r : -r)) <= 1e-12);
  }
}

TEST_CASE("selection cap is one feature per ten samples") {
  CHECK(mrmr_cap(932) == 93);
  CHECK(mrmr_cap(416) == 41);
  CHECK(mrmr_cap(10) == 1);
  CHECK(mrmr_cap(5) == 1);
}

TEST_CASE("label column is picked first; a duplicate is not picked next") {
  Rng rng(3);
  const std::size_t n = 20;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 4 == 0 ? 1.0 : 0.0;
  std::vector<std::vector<double>> cols(5, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = y[i] + rng.normal(0, 0.3);
    cols[1][i] = cols[0][i];
    cols[2][i] = y[i] * 0.5 + rng.normal(0, 0.6);
    cols[3][i] = rng.normal(0, 1);
    cols[4][i] = y[i];
  }
  const std::vector<std::string> names{"a", "b", "c", "d", "label"};
  const auto x = matrix(cols, names);
  const auto res = mrmr_select(x, y, 5);
  REQUIRE_FALSE(res.selected.empty());
  CHECK(res.selected.front() == "label");
  CHECK(res.selected == oracle::mrmr_greedy(cols, names, y, 5));

  // without the label column: the informative pair a/b never appears consecutively
  const std::vector<std::vector<double>> four(cols.begin(), cols.begin() + 4);
  const auto x4 = matrix(four, {"a", "b", "c", "d"});
  const auto r4 = mrmr_select(x4, y, 4);
  CHECK(r4.selected == oracle::mrmr_greedy(four, {"a", "b", "c", "d"}, y, 4));
  CHECK(r4.selected.front() == "a");
  if (r4.selected.size() > 1) CHECK(r4.selected[1] != "b");
  CHECK(r4.trace.size() == r4.selected.size());
  CHECK(r4.trace.front().redundancy == 0.0);
  for (const auto& s : r4.trace) CHECK(s.score == doctest::Approx(s.relevance - s.redundancy));
}

TEST_CASE("mrmr equals the brute-force greedy oracle on 200 random instances") {
  Rng rng(99);
  int ties_seen = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t p = 2 + rng.below(11);   // <= 12
    const std::size_t n = 4 + rng.below(47);   // <= 50
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.uniform() < 0.3 ? 1.0 : 0.0;
    y[0] = 1.0;
    y[1] = 0.0;
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    for (std::size_t c = 0; c < p; ++c) {
      const int kind = static_cast<int>(rng.below(6));
      for (std::size_t i = 0; i < n; ++i) {
        switch (kind) {
          case 0: cols[c][i] = rng.normal(); break;
          case 1: cols[c][i] = y[i] * rng.uniform(0.5, 2) + rng.normal(0, 0.5); break;
          case 2: cols[c][i] = static_cast<double>(rng.below(3)); break;  // coarse values, frequent ties
          case 3: cols[c][i] = c > 0 ? cols[c - 1][i] : 1.0; break;      // duplicate of the previous column
          case 4: cols[c][i] = c > 0 ? 3.0 * cols[c - 1][i] - 2.0 : 0.0; break;
          default: cols[c][i] = 7.0; break;  // constant
        }
      }
      if (kind >= 3) ++ties_seen;
    }
    const auto names = names_for(p);
    const std::size_t k = 1 + rng.below(p + 2);
    const auto x = matrix(cols, names);
    const auto got = mrmr_select(x, y, k);
    const auto want = oracle::mrmr_greedy(cols, names, y, k);
    CHECK_MESSAGE(got.selected == want, "instance " << inst);
    CHECK(got.selected.size() <= k);
    CHECK(std::set<std::string>(got.selected.begin(), got.selected.end()).size() == got.selected.size());
    CHECK(got.cap == k);
    CHECK(mrmr_select(x, y, k).selected == got.selected);

    // positive affine rescaling of every column leaves the selection unchanged
    std::vector<std::vector<double>> scaled = cols;
    for (auto& col : scaled) {
      const double a = rng.uniform(0.5, 4.0), b = rng.uniform(-3, 3);
      for (auto& v : col) v = a * v + b;
    }
    CHECK_MESSAGE(mrmr_select(matrix(scaled, names), y, k).selected == got.selected, "instance " << inst);
  }
  CHECK(ties_seen > 50);
}

TEST_CASE("mrmr errors and correlation report ordering") {
  const auto x = matrix({{1, 2, 3, 4}, {4, 3, 2, 2}, {1, 1, 1, 1}}, {"b", "a", "c"});
  const std::vector<double> y{0, 0, 1, 1};
  CHECK_THROWS_AS(mrmr_select(x, y, 0), ConfigError);
  CHECK_THROWS_AS(mrmr_select(x, std::vector<double>{0, 1}, 1), DataError);
  const auto rep = correlation_report(x, y);
  REQUIRE(rep.ranked.size() == 3);
  // r(a, y) = -1.5 / sqrt(2.75) outranks r(b, y) = 2 / sqrt(5)
  CHECK(rep.ranked[0].name == "a");
  CHECK(rep.ranked[0].r == doctest::Approx(-1.5 / std::sqrt(2.75)));
  CHECK(rep.ranked[1].name == "b");
  CHECK(rep.ranked[2].name == "c");
  CHECK(rep.ranked[2].degenerate);
  const auto pc = pairwise_abs_correlation(x, {"a", "b"});
  CHECK(pc[0] == doctest::Approx(1.0));
  CHECK(pc[1] == doctest::Approx(std::fabs(pearson(x.column(0), x.column(1)).r)));
}
