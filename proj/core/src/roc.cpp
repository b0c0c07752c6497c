#include "bmrisk/roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bmrisk/error.hpp"

namespace bmrisk {

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("roc: score and label counts differ");
  double n_pos = 0.0, n_neg = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("roc: labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw NumericalError("roc: non-finite score");
    (labels[i] == 1 ? n_pos : n_neg) += 1.0;
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw DataError("roc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  // integer counts keep the area exact until the final division
  double tp = 0.0, fp = 0.0, twice_area = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    double dtp = 0.0, dfp = 0.0;
    for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] == 1 ? dtp : dfp) += 1.0;
    twice_area += dfp * (2.0 * tp + dtp);
    tp += dtp;
    fp += dfp;
    roc.points.push_back({fp / n_neg, tp / n_pos, s});
  }
  roc.auc = twice_area / (2.0 * n_pos * n_neg);
  return roc;
}

}  // namespace bmrisk
