#include <algorithm>
#include <array>

#include "bmrisk/features.hpp"
#include "texture_internal.hpp"

namespace bmrisk {

std::vector<LevelMatrix> glrlm_matrices(const DiscretizedRoi& roi) {
  const int max_run = static_cast<int>(std::max({roi.dims.nx, roi.dims.ny, roi.dims.nz}));
  std::vector<LevelMatrix> out;
  out.reserve(13);
  for (const auto& d : unique_directions()) {
    LevelMatrix m(roi.bin_count, max_run);
    for (std::size_t k = 0; k < roi.size(); ++k) {
      const auto& c = roi.coords[k];
      const int level = roi.levels[k];
      // only maximal runs: skip voxels whose predecessor continues the run
      if (roi.level_at(c[0] - d[0], c[1] - d[1], c[2] - d[2]) == level) continue;
      int len = 1;
      while (roi.level_at(c[0] + len * d[0], c[1] + len * d[1], c[2] + len * d[2]) == level) ++len;
      m(level, len) += 1.0;
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace detail {

const std::vector<std::string>& glrlm_feature_names() {
  static const std::vector<std::string> names = {
      "glrlm-ShortRunEmphasis",
      "glrlm-LongRunEmphasis",
      "glrlm-GrayLevelNonUniformity",
      "glrlm-GrayLevelNonUniformityNormalized",
      "glrlm-RunLengthNonUniformity",
      "glrlm-RunLengthNonUniformityNormalized",
      "glrlm-RunPercentage",
      "glrlm-GrayLevelVariance",
      "glrlm-RunVariance",
      "glrlm-RunEntropy",
      "glrlm-LowGrayLevelRunEmphasis",
      "glrlm-HighGrayLevelRunEmphasis",
      "glrlm-ShortRunLowGrayLevelEmphasis",
      "glrlm-ShortRunHighGrayLevelEmphasis",
      "glrlm-LongRunLowGrayLevelEmphasis",
      "glrlm-LongRunHighGrayLevelEmphasis",
  };
  return names;
}

FeatureVector glrlm_features(const DiscretizedRoi& roi) {
  constexpr std::size_t kCount = 16;
  std::array<double, kCount> acc{};
  int used = 0;
  const double voxels = static_cast<double>(roi.size());
  for (const auto& m : glrlm_matrices(roi)) {
    const auto s = size_matrix_stats(m);
    if (s.total <= 0.0) continue;
    const std::array<double, kCount> f = {
        s.small_emphasis,    s.large_emphasis,     s.gray_nonuniformity, s.gray_nonuniformity_norm,
        s.size_nonuniformity, s.size_nonuniformity_norm, s.total / voxels, s.gray_variance,
        s.size_variance,     s.entropy,            s.low_gray_emphasis,  s.high_gray_emphasis,
        s.small_low_gray,    s.small_high_gray,    s.large_low_gray,     s.large_high_gray};
    for (std::size_t k = 0; k < kCount; ++k) acc[k] += f[k];
    ++used;
  }
  FeatureVector out;
  const auto& names = glrlm_feature_names();
  for (std::size_t k = 0; k < kCount; ++k) out.add(names[k], used > 0 ? acc[k] / used : 0.0);
  return out;
}

}  // namespace detail
}  // namespace bmrisk
