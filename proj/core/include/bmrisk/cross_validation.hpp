#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bmrisk/classifier.hpp"
#include "bmrisk/cohort.hpp"
#include "bmrisk/feature_matrix.hpp"
#include "bmrisk/selection.hpp"

namespace bmrisk {

/// Assembled samples of one feature set. Rows of `x` follow `samples`; rows of
/// `x_km_only` follow `km_only` (scored for survival plots, never trained on).
struct Dataset {
  FeatureSetSpec spec;
  std::vector<LabeledSample> samples;
  std::vector<LabeledSample> km_only;
  FeatureMatrix x;
  FeatureMatrix x_km_only;
  std::vector<int> y;  // 1 HRM, 0 LRM
  std::vector<std::string> excluded_lesions;  // missing a required block

  std::size_t positives() const;
};

struct CvConfig {
  int repeats = 100;
  double test_fraction = 1.0 / 3.0;
  std::uint64_t seed = 0;
  /// Run MRMR once on all samples instead of inside each training fold.
  bool global_selection = false;
  /// 0 means one feature per ten training samples.
  std::size_t selection_cap = 0;
  ClassifierConfig classifier;
  int max_split_retries = 100;
  int threads = 1;
};

struct CvRepeat {
  int index = 0;
  std::uint64_t seed = 0;
  int retries = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_selected = 0;
  std::size_t straddling_lesions = 0;  // lesions with samples on both sides; always 0
  double auc = 0.0;
};

struct Confusion {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
};

struct CvReport {
  std::vector<CvRepeat> repeats;
  double mean_auc = 0.0;
  double std_auc = 0.0;  // population std over repeats
  /// AUC over all (repeat, test sample) scores pooled together.
  double pooled_auc = 0.0;
  /// Test predictions at theta, pooled over repeats.
  Confusion pooled_confusion;
  /// Mean out-of-fold score per sample; empty when never in a test fold.
  std::vector<std::optional<double>> oof_scores;
  std::vector<std::optional<double>> km_only_scores;
  /// How often each feature was selected across repeats, by name.
  std::vector<std::pair<std::string, int>> selection_counts;
  std::size_t max_straddling = 0;
};

/// Lesion-grouped split: every lesion lands wholly in train or test.
/// Stratified on the lesion-level ever-HRM flag.
struct LesionSplit {
  std::vector<std::size_t> train;  // sample indices
  std::vector<std::size_t> test;
  std::vector<std::size_t> test_km_only;
  int retries = 0;
};

LesionSplit split_lesions(const Dataset& data, double test_fraction, std::uint64_t seed, int max_retries);

/// Repeated split -> select -> fit -> score. Repeat r uses derive_seed(seed, r);
/// results do not depend on the thread count.
CvReport monte_carlo_cv(const Dataset& data, const CvConfig& config);

}  // namespace bmrisk
