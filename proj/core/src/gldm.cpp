#include <array>

#include "bmrisk/features.hpp"
#include "texture_internal.hpp"

namespace bmrisk {

LevelMatrix gldm_matrix(const DiscretizedRoi& roi) {
  LevelMatrix m(roi.bin_count, 27);
  for (std::size_t k = 0; k < roi.size(); ++k) {
    const auto& c = roi.coords[k];
    const int level = roi.levels[k];
    int dependent = 1;  // the centre voxel itself
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          if (roi.level_at(c[0] + dx, c[1] + dy, c[2] + dz) == level) ++dependent;
        }
      }
    }
    m(level, dependent) += 1.0;
  }
  return m;
}

namespace detail {

const std::vector<std::string>& gldm_feature_names() {
  static const std::vector<std::string> names = {
      "gldm-SmallDependenceEmphasis",
      "gldm-LargeDependenceEmphasis",
      "gldm-GrayLevelNonUniformity",
      "gldm-DependenceNonUniformity",
      "gldm-DependenceNonUniformityNormalized",
      "gldm-GrayLevelVariance",
      "gldm-DependenceVariance",
      "gldm-DependenceEntropy",
      "gldm-LowGrayLevelEmphasis",
      "gldm-HighGrayLevelEmphasis",
      "gldm-SmallDependenceLowGrayLevelEmphasis",
      "gldm-SmallDependenceHighGrayLevelEmphasis",
      "gldm-LargeDependenceLowGrayLevelEmphasis",
      "gldm-LargeDependenceHighGrayLevelEmphasis",
  };
  return names;
}

FeatureVector gldm_features(const DiscretizedRoi& roi) {
  const auto s = size_matrix_stats(gldm_matrix(roi));
  const std::array<double, 14> f = {
      s.small_emphasis,  s.large_emphasis,      s.gray_nonuniformity, s.size_nonuniformity,
      s.size_nonuniformity_norm, s.gray_variance, s.size_variance,     s.entropy,
      s.low_gray_emphasis, s.high_gray_emphasis, s.small_low_gray,    s.small_high_gray,
      s.large_low_gray,  s.large_high_gray};
  FeatureVector out;
  const auto& names = gldm_feature_names();
  for (std::size_t k = 0; k < f.size(); ++k) out.add(names[k], f[k]);
  return out;
}

}  // namespace detail
}  // namespace bmrisk
