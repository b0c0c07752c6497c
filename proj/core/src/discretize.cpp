#include "bmrisk/features.hpp"

#include <algorithm>
#include <cmath>

#include "bmrisk/error.hpp"

namespace bmrisk {

int DiscretizedRoi::level_at(int x, int y, int z) const {
  if (x < 0 || y < 0 || z < 0) return 0;
  const auto ux = static_cast<std::size_t>(x);
  const auto uy = static_cast<std::size_t>(y);
  const auto uz = static_cast<std::size_t>(z);
  if (ux >= dims.nx || uy >= dims.ny || uz >= dims.nz) return 0;
  return level_grid[ux + dims.nx * (uy + dims.ny * uz)];
}

int discretize_value(double v, double vmin, double vmax, int bin_count) {
  if (!(vmax > vmin)) return 1;
  const double scaled = static_cast<double>(bin_count) * (v - vmin) / (vmax - vmin);
  const auto level = 1 + static_cast<long long>(std::floor(scaled));
  return static_cast<int>(std::clamp<long long>(level, 1, bin_count));
}

DiscretizedRoi discretize(const VolumeImage& img, const RoiMask& mask, int bin_count) {
  if (bin_count < 2) throw ConfigError("bin count must be >= 2");
  require_same_grid(img, mask);
  require_nonempty(mask);
  const auto values = img.voxels();
  double vmin = 0.0;
  double vmax = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask.contains(i)) continue;
    if (first) {
      vmin = vmax = values[i];
      first = false;
    } else {
      vmin = std::min(vmin, values[i]);
      vmax = std::max(vmax, values[i]);
    }
  }
  std::vector<int> grid(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask.contains(i)) grid[i] = discretize_value(values[i], vmin, vmax, bin_count);
  }
  return discretized_from_levels(img.dims(), img.spacing(), bin_count, std::move(grid));
}

DiscretizedRoi discretized_from_levels(GridSize dims, Spacing spacing, int bin_count, std::vector<int> level_grid) {
  if (level_grid.size() != dims.voxel_count()) throw DataError("level grid size does not match dims");
  DiscretizedRoi roi;
  roi.dims = dims;
  roi.spacing = spacing;
  roi.bin_count = bin_count;
  roi.level_grid = std::move(level_grid);
  for (std::size_t z = 0; z < dims.nz; ++z) {
    for (std::size_t y = 0; y < dims.ny; ++y) {
      for (std::size_t x = 0; x < dims.nx; ++x) {
        const int level = roi.level_grid[x + dims.nx * (y + dims.ny * z)];
        if (level == 0) continue;
        if (level < 0 || level > bin_count) throw DataError("gray level outside 1..bin_count");
        roi.coords.push_back({static_cast<int>(x), static_cast<int>(y), static_cast<int>(z)});
        roi.levels.push_back(level);
      }
    }
  }
  if (roi.coords.empty()) throw DataError("discretized ROI is empty");
  return roi;
}

double LevelMatrix::total() const {
  double t = 0.0;
  for (double c : counts) t += c;
  return t;
}

const std::array<VoxelCoord, 13>& unique_directions() {
  static const std::array<VoxelCoord, 13> dirs = {{
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
      {1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1},
      {1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1},
  }};
  return dirs;
}

std::string_view to_string(TextureFamily family) {
  switch (family) {
    case TextureFamily::GLCM: return "glcm";
    case TextureFamily::GLRLM: return "glrlm";
    case TextureFamily::GLSZM: return "glszm";
    case TextureFamily::GLDM: return "gldm";
  }
  return "?";
}

}  // namespace bmrisk
