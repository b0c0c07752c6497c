#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bmrisk/feature_matrix.hpp"

namespace bmrisk {

struct ClassifierConfig {
  double C = 1.0;
  /// Positive-class weight is sensitivity_weight * n_neg / n_pos; negatives get 1.
  double sensitivity_weight = 2.0;
  double theta = 0.0;
  /// Recorded for reproducibility; the solver itself is deterministic.
  std::uint64_t seed = 0;
  int max_epochs = 1000;
  double tolerance = 1e-6;

  bool operator==(const ClassifierConfig&) const = default;
};

/// Linear soft-margin classifier on standardized inputs:
/// score(x) = b + sum_j w_j (x_j - mu_j) / sigma_j.
struct TrainedModel {
  std::vector<std::string> features;
  std::vector<double> mu;
  std::vector<double> sigma;  // a constant training column gets sigma 1
  std::vector<double> w;
  double b = 0.0;
  double c_pos = 1.0;
  double c_neg = 1.0;
  double theta = 0.0;
  ClassifierConfig config;

  bool operator==(const TrainedModel&) const = default;
};

struct FitResult {
  TrainedModel model;
  std::vector<double> train_scores;
  std::size_t iterations = 0;
  /// Maximal KKT violation at exit.
  double kkt_gap = 0.0;
  bool converged = false;
};

/// Solves min 1/2 |w|^2 + C sum_i c_{y_i} hinge(y_i, w.x_i + b) through its
/// dual with pairwise (SMO) coordinate ascent and second-order working-set
/// selection. Labels are 1 (HRM) and 0 (LRM). Throws DataError for a single
/// class and NumericalError for non-finite inputs.
FitResult fit(const FeatureMatrix& x, std::span<const int> labels, const ClassifierConfig& config);

/// Selects the model's columns by name (DataError if missing) and scores each row.
std::vector<double> decision_scores(const TrainedModel& model, const FeatureMatrix& x);

/// 1 (HRM) iff score >= theta.
std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& x);
std::vector<int> predict(std::span<const double> scores, double theta);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

}  // namespace bmrisk
