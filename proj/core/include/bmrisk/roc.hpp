#pragma once

#include <span>
#include <vector>

namespace bmrisk {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the origin
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

/// Descending-threshold sweep; tied scores form one step, so the trapezoidal
/// area equals the Mann-Whitney statistic with half credit for ties.
/// Labels are 1 (positive) and 0. Throws DataError unless both classes appear.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

inline double auc(std::span<const double> scores, std::span<const int> labels) {
  return roc_curve(scores, labels).auc;
}

}  // namespace bmrisk
