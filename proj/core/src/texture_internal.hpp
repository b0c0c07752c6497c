#pragma once

#include <string>
#include <vector>

#include "bmrisk/features.hpp"

namespace bmrisk::detail {

/// Statistics shared by the run-length, size-zone and dependence matrices
/// (gray level i in rows, size j in columns), normalized by the matrix total.
struct SizeMatrixStats {
  double small_emphasis = 0.0;         // sum p / j^2
  double large_emphasis = 0.0;         // sum p j^2
  double gray_nonuniformity = 0.0;     // sum_i (sum_j P)^2 / N
  double gray_nonuniformity_norm = 0.0;
  double size_nonuniformity = 0.0;     // sum_j (sum_i P)^2 / N
  double size_nonuniformity_norm = 0.0;
  double gray_variance = 0.0;
  double size_variance = 0.0;
  double entropy = 0.0;
  double low_gray_emphasis = 0.0;      // sum p / i^2
  double high_gray_emphasis = 0.0;     // sum p i^2
  double small_low_gray = 0.0;         // sum p / (i^2 j^2)
  double small_high_gray = 0.0;        // sum p i^2 / j^2
  double large_low_gray = 0.0;         // sum p j^2 / i^2
  double large_high_gray = 0.0;        // sum p i^2 j^2
  double total = 0.0;                  // N
};

SizeMatrixStats size_matrix_stats(const LevelMatrix& m);

FeatureVector glcm_features(const DiscretizedRoi& roi);
FeatureVector glrlm_features(const DiscretizedRoi& roi);
FeatureVector glszm_features(const DiscretizedRoi& roi);
FeatureVector gldm_features(const DiscretizedRoi& roi);

const std::vector<std::string>& glcm_feature_names();
const std::vector<std::string>& glrlm_feature_names();
const std::vector<std::string>& glszm_feature_names();
const std::vector<std::string>& gldm_feature_names();

}  // namespace bmrisk::detail
