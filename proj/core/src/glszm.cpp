#include <algorithm>
#include <array>
#include <cstdint>

#include "bmrisk/features.hpp"
#include "texture_internal.hpp"

namespace bmrisk {

LevelMatrix glszm_matrix(const DiscretizedRoi& roi) {
  const auto& dims = roi.dims;
  auto flat = [&](int x, int y, int z) {
    return static_cast<std::size_t>(x) + dims.nx * (static_cast<std::size_t>(y) + dims.ny * static_cast<std::size_t>(z));
  };
  std::vector<std::uint8_t> visited(dims.voxel_count(), 0);
  std::vector<std::size_t> zone_sizes;
  std::vector<int> zone_levels;
  std::vector<VoxelCoord> stack;
  std::size_t largest = 1;
  for (std::size_t k = 0; k < roi.size(); ++k) {
    const auto& seed = roi.coords[k];
    if (visited[flat(seed[0], seed[1], seed[2])]) continue;
    const int level = roi.levels[k];
    std::size_t size = 0;
    stack.clear();
    stack.push_back(seed);
    visited[flat(seed[0], seed[1], seed[2])] = 1;
    while (!stack.empty()) {
      const auto c = stack.back();
      stack.pop_back();
      ++size;
      for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const int x = c[0] + dx;
            const int y = c[1] + dy;
            const int z = c[2] + dz;
            if (roi.level_at(x, y, z) != level) continue;
            auto& seen = visited[flat(x, y, z)];
            if (seen) continue;
            seen = 1;
            stack.push_back({x, y, z});
          }
        }
      }
    }
    zone_sizes.push_back(size);
    zone_levels.push_back(level);
    largest = std::max(largest, size);
  }
  LevelMatrix m(roi.bin_count, static_cast<int>(largest));
  for (std::size_t z = 0; z < zone_sizes.size(); ++z) m(zone_levels[z], static_cast<int>(zone_sizes[z])) += 1.0;
  return m;
}

namespace detail {

const std::vector<std::string>& glszm_feature_names() {
  static const std::vector<std::string> names = {
      "glszm-SmallAreaEmphasis",
      "glszm-LargeAreaEmphasis",
      "glszm-GrayLevelNonUniformity",
      "glszm-GrayLevelNonUniformityNormalized",
      "glszm-SizeZoneNonUniformity",
      "glszm-SizeZoneNonUniformityNormalized",
      "glszm-ZonePercentage",
      "glszm-GrayLevelVariance",
      "glszm-ZoneVariance",
      "glszm-ZoneEntropy",
      "glszm-LowGrayLevelZoneEmphasis",
      "glszm-HighGrayLevelZoneEmphasis",
      "glszm-SmallAreaLowGrayLevelEmphasis",
      "glszm-SmallAreaHighGrayLevelEmphasis",
      "glszm-LargeAreaLowGrayLevelEmphasis",
      "glszm-LargeAreaHighGrayLevelEmphasis",
  };
  return names;
}

FeatureVector glszm_features(const DiscretizedRoi& roi) {
  const auto s = size_matrix_stats(glszm_matrix(roi));
  const std::array<double, 16> f = {
      s.small_emphasis,     s.large_emphasis,          s.gray_nonuniformity,
      s.gray_nonuniformity_norm, s.size_nonuniformity, s.size_nonuniformity_norm,
      s.total / static_cast<double>(roi.size()), s.gray_variance, s.size_variance,
      s.entropy,            s.low_gray_emphasis,       s.high_gray_emphasis,
      s.small_low_gray,     s.small_high_gray,         s.large_low_gray,
      s.large_high_gray};
  FeatureVector out;
  const auto& names = glszm_feature_names();
  for (std::size_t k = 0; k < f.size(); ++k) out.add(names[k], f[k]);
  return out;
}

}  // namespace detail
}  // namespace bmrisk
