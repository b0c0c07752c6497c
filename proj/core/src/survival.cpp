#include "bmrisk/survival.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "bmrisk/error.hpp"

namespace bmrisk {

namespace {

constexpr double kZ95 = 1.959963984540054;
// products of exact fractions like 3/4 * 2/3 may land an ulp above 0.5
constexpr double kMedianSlack = 1e-12;

void check_inputs(std::span<const double> times, std::span<const int> events) {
  if (times.size() != events.size()) throw DataError("survival: times and events differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) throw DataError("survival: times must be finite and >= 0");
    if (events[i] != 0 && events[i] != 1) throw DataError("survival: event flags must be 0 or 1");
  }
}

}  // namespace

double SurvivalCurve::survival_at(double t) const {
  double s = 1.0;
  for (const auto& st : steps) {
    if (st.time > t) break;
    s = st.survival;
  }
  return s;
}

SurvivalCurve kaplan_meier(std::span<const double> times, std::span<const int> events) {
  check_inputs(times, events);
  std::map<double, std::pair<int, int>> table;  // time -> (events, censored)
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto& cell = table[times[i]];
    (events[i] ? cell.first : cell.second) += 1;
  }
  SurvivalCurve curve;
  curve.n = times.size();
  int at_risk = static_cast<int>(times.size());
  if (table.empty() || table.begin()->first > 0.0) curve.steps.push_back({0.0, at_risk, 0, 0, 1.0, 0.0, 1.0, 1.0});
  double s = 1.0, gw = 0.0;
  for (const auto& [t, cell] : table) {
    const auto [d, c] = cell;
    if (d > 0) {
      s *= static_cast<double>(at_risk - d) / static_cast<double>(at_risk);
      if (d < at_risk) gw += static_cast<double>(d) / (static_cast<double>(at_risk) * static_cast<double>(at_risk - d));
    }
    SurvivalStep st{t, at_risk, d, c, s, gw, s, s};
    if (s > 0.0 && s < 1.0) {
      const double log_s = std::log(s);
      const double theta = std::log(-log_s);
      const double se = std::sqrt(gw) / std::fabs(log_s);
      st.lower = std::exp(-std::exp(theta + kZ95 * se));
      st.upper = std::exp(-std::exp(theta - kZ95 * se));
    }
    curve.steps.push_back(st);
    if (!curve.median && d > 0 && s <= 0.5 + kMedianSlack) curve.median = t;
    at_risk -= d + c;
  }
  return curve;
}

LogRankResult log_rank(std::span<const double> times_a, std::span<const int> events_a,
                       std::span<const double> times_b, std::span<const int> events_b) {
  check_inputs(times_a, events_a);
  check_inputs(times_b, events_b);
  if (times_a.empty() || times_b.empty()) throw DataError("log-rank: both groups must be nonempty");

  // time -> (events A, removed A, events B, removed B)
  std::map<double, std::array<int, 4>> table;
  for (std::size_t i = 0; i < times_a.size(); ++i) {
    auto& c = table[times_a[i]];
    c[0] += events_a[i];
    c[1] += 1;
  }
  for (std::size_t i = 0; i < times_b.size(); ++i) {
    auto& c = table[times_b[i]];
    c[2] += events_b[i];
    c[3] += 1;
  }
  double na = static_cast<double>(times_a.size()), nb = static_cast<double>(times_b.size());
  LogRankResult r;
  double u = 0.0, total_events = 0.0;
  for (const auto& [t, c] : table) {
    const double da = c[0], db = c[2];
    const double d = da + db;
    const double n = na + nb;
    if (d > 0.0) {
      total_events += d;
      r.observed_a += da;
      r.expected_a += d * na / n;
      u += (da * nb - db * na) / n;
      if (n > 1.0) r.variance += d * (na * nb) * (n - d) / (n * n * (n - 1.0));
    }
    na -= c[1];
    nb -= c[3];
  }
  if (total_events == 0.0) throw DataError("log-rank: no events in either group");
  if (!(r.variance > 0.0)) throw NumericalError("log-rank: zero variance");
  r.chi2 = u * u / r.variance;
  r.p = std::erfc(std::sqrt(r.chi2 / 2.0));
  return r;
}

}  // namespace bmrisk
