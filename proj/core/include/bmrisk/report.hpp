#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bmrisk/cross_validation.hpp"
#include "bmrisk/roc.hpp"
#include "bmrisk/survival.hpp"

namespace bmrisk {

inline constexpr double kDaysPerMonth = 30.44;

struct RiskPrediction {
  double time_days = 0.0;
  bool event = false;
  /// 1 HRM, 0 LRM; empty for samples censored before the horizon.
  std::optional<int> true_label;
  bool predicted_hrm = false;
  double score = 0.0;
};

struct GroupSummary {
  std::size_t n = 0;
  std::size_t events = 0;
  SurvivalCurve curve;
};

struct RiskSplitReport {
  GroupSummary hrm;
  GroupSummary lrm;
  GroupSummary all;
  std::optional<LogRankResult> log_rank;
  std::string log_rank_note;  // why the test is unavailable
  Confusion confusion;        // labelled samples only
  std::size_t censored_predicted_hrm = 0;
  std::size_t censored_predicted_lrm = 0;
};

/// Kaplan-Meier curves for predicted HRM, predicted LRM and everyone, the
/// log-rank test between the two predicted groups and confusion counts.
/// An empty predicted group leaves the log-rank test unavailable.
RiskSplitReport risk_split_report(const std::vector<RiskPrediction>& predictions);

/// Out-of-fold mean scores thresholded at theta; samples never tested are skipped.
std::vector<RiskPrediction> predictions_from_cv(const Dataset& data, const CvReport& cv, double theta);

/// Scores of a fixed model on every sample of a dataset.
std::vector<RiskPrediction> predictions_from_scores(const Dataset& data, const std::vector<double>& scores,
                                                    const std::vector<double>& km_only_scores, double theta);

/// "9.6 months" or "not reached".
std::string format_months(std::optional<double> days);
/// "p < 0.001", "p < 0.01" or "p = 0.123".
std::string format_p(double p);
/// "TP 31 / FN 9 of 40 progressing; TN 716 / FP 158 of 874 (excluding censoring)".
std::string format_confusion(const Confusion& c);

std::string render_summary(const RiskSplitReport& report);
/// group,time_days,at_risk,events,censored,survival,lower,upper
std::string km_table_csv(const RiskSplitReport& report);
std::string km_svg(const RiskSplitReport& report, const std::string& metadata);
std::string roc_svg(const RocCurve& roc, const std::string& title, const std::string& metadata);
std::string risk_split_json(const RiskSplitReport& report);

}  // namespace bmrisk
