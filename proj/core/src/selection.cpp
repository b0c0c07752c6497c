#include "bmrisk/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmrisk/error.hpp"

namespace bmrisk {

namespace {

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

// Centred column scaled to unit norm; all zeros for a constant column.
std::vector<double> unit_centred(std::span<const double> v) {
  if (is_constant(v)) return std::vector<double>(v.size(), 0.0);
  double mean = 0.0;
  for (double a : v) mean += a;
  mean /= static_cast<double>(v.size());
  std::vector<double> u(v.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    u[i] = v[i] - mean;
    ss += u[i] * u[i];
  }
  if (ss == 0.0) {
    std::fill(u.begin(), u.end(), 0.0);
    return u;
  }
  const double inv = 1.0 / std::sqrt(ss);
  for (auto& a : u) a *= inv;
  return u;
}

double abs_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return std::min(1.0, std::fabs(s));
}

}  // namespace

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson: length mismatch");
  if (x.size() < 2) throw DataError("pearson: need at least 2 samples");
  if (is_constant(x) || is_constant(y)) return {0.0, true};
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0), false};
}

CorrelationReport correlation_report(const FeatureMatrix& x, std::span<const double> y) {
  if (y.size() != x.rows()) throw DataError("correlation report: label count does not match rows");
  CorrelationReport rep;
  rep.ranked.reserve(x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const auto p = pearson(x.column(c), y);
    rep.ranked.push_back({x.names()[c], p.r, p.degenerate});
  }
  std::sort(rep.ranked.begin(), rep.ranked.end(), [](const CorrelationEntry& a, const CorrelationEntry& b) {
    const double fa = std::fabs(a.r), fb = std::fabs(b.r);
    if (fa != fb) return fa > fb;
    return a.name < b.name;
  });
  return rep;
}

std::vector<double> pairwise_abs_correlation(const FeatureMatrix& x, const std::vector<std::string>& names) {
  std::vector<std::vector<double>> u;
  u.reserve(names.size());
  for (const auto& n : names) u.push_back(unit_centred(x.column(x.column_index(n))));
  std::vector<double> out(names.size() * names.size(), 0.0);
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j) out[i * names.size() + j] = abs_dot(u[i], u[j]);
  return out;
}

std::size_t mrmr_cap(std::size_t n_samples) { return std::max<std::size_t>(1, n_samples / 10); }

SelectionResult mrmr_select(const FeatureMatrix& x, std::span<const double> y, std::size_t k) {
  if (k < 1) throw ConfigError("mrmr: k must be >= 1");
  if (x.cols() == 0 || x.rows() == 0) throw DataError("mrmr: empty feature matrix");
  if (y.size() != x.rows()) throw DataError("mrmr: label count does not match rows");
  if (x.rows() < 2) throw DataError("mrmr: need at least 2 samples");

  const std::size_t p = x.cols();
  std::vector<std::vector<double>> u(p);
  for (std::size_t c = 0; c < p; ++c) u[c] = unit_centred(x.column(c));
  const auto uy = unit_centred(y);
  std::vector<double> relevance(p);
  for (std::size_t c = 0; c < p; ++c) relevance[c] = abs_dot(u[c], uy);

  SelectionResult res;
  res.cap = k;
  std::vector<bool> taken(p, false);
  std::vector<double> redundancy_sum(p, 0.0);
  const std::size_t steps = std::min(k, p);
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> score(p, 0.0);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < p; ++c) {
      if (taken[c]) continue;
      score[c] = t == 0 ? relevance[c] : relevance[c] - redundancy_sum[c] / static_cast<double>(t);
      best = std::max(best, score[c]);
    }
    if (t > 0 && best <= kSelectionTieTolerance) break;
    std::size_t pick = p;
    for (std::size_t c = 0; c < p; ++c) {
      if (taken[c] || score[c] < best - kSelectionTieTolerance) continue;
      if (pick == p || x.names()[c] < x.names()[pick]) pick = c;
    }
    taken[pick] = true;
    const double red = t == 0 ? 0.0 : redundancy_sum[pick] / static_cast<double>(t);
    res.selected.push_back(x.names()[pick]);
    res.trace.push_back({x.names()[pick], relevance[pick], red, score[pick]});
    for (std::size_t c = 0; c < p; ++c) {
      if (!taken[c]) redundancy_sum[c] += abs_dot(u[c], u[pick]);
    }
  }
  return res;
}

}  // namespace bmrisk
