#pragma once

#include <optional>
#include <span>
#include <vector>

namespace bmrisk {

struct SurvivalStep {
  double time = 0.0;
  int at_risk = 0;
  int events = 0;
  int censored = 0;
  double survival = 1.0;
  /// Greenwood sum  sum d / (n (n - d))  up to this time.
  double greenwood = 0.0;
  double lower = 1.0;  // 95% log-log band
  double upper = 1.0;
};

/// Product-limit estimate with one step per distinct observed time, preceded by
/// a t = 0 row when no observation is at 0.
struct SurvivalCurve {
  std::vector<SurvivalStep> steps;
  std::size_t n = 0;
  /// First time with S(t) <= 0.5; empty when the curve stays above.
  std::optional<double> median;

  /// S(t) of the right-continuous step function.
  double survival_at(double t) const;
};

/// `events` holds 1 for an observed event and 0 for censoring. Throws
/// DataError for negative or non-finite times or mismatched lengths.
SurvivalCurve kaplan_meier(std::span<const double> times, std::span<const int> events);

struct LogRankResult {
  double chi2 = 0.0;
  double p = 1.0;
  double observed_a = 0.0;
  double expected_a = 0.0;
  double variance = 0.0;
};

/// Two-group log-rank test, chi-square with one degree of freedom. Throws
/// DataError for an empty group or when neither group has an event.
LogRankResult log_rank(std::span<const double> times_a, std::span<const int> events_a,
                       std::span<const double> times_b, std::span<const int> events_b);

}  // namespace bmrisk
