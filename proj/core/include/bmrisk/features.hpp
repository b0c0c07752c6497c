#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bmrisk/feature_vector.hpp"
#include "bmrisk/volume.hpp"

namespace bmrisk {

/// ROI voxels quantized to gray levels 1..bin_count.
struct DiscretizedRoi {
  GridSize dims;
  Spacing spacing{1.0, 1.0, 1.0};
  int bin_count = 0;
  std::vector<VoxelCoord> coords;  // ROI voxels in x-fastest scan order
  std::vector<int> levels;         // parallel to coords
  std::vector<int> level_grid;     // full grid, 0 outside the ROI

  /// Level at (x, y, z), or 0 outside the grid or ROI.
  int level_at(int x, int y, int z) const;
  std::size_t size() const { return coords.size(); }
};

/// Fixed bin count over the ROI range:
/// level = min(Ng, 1 + floor(Ng * (v - vmin) / (vmax - vmin))); a constant ROI maps to 1.
DiscretizedRoi discretize(const VolumeImage& img, const RoiMask& mask, int bin_count);

/// Builds a DiscretizedRoi from a level grid (0 = outside). Used by tests and
/// benchmarks that work on gray levels directly.
DiscretizedRoi discretized_from_levels(GridSize dims, Spacing spacing, int bin_count, std::vector<int> level_grid);

/// Level of a single value under the fixed-bin-count rule.
int discretize_value(double v, double vmin, double vmax, int bin_count);

// ---- shape ------------------------------------------------------------------

/// 14 mask-only features, names prefixed `shape-`. Surface area counts exposed
/// voxel faces; axis lengths are 4*sqrt(eigenvalue) of the population covariance
/// of voxel-centre coordinates. Elongation/Flatness are 0 when the largest
/// eigenvalue is 0 (single voxel).
FeatureVector shape_features(const RoiMask& mask, const Spacing& spacing);
const std::vector<std::string>& shape_feature_names();

// ---- first order ---------------------------------------------------------------

/// 16 intensity statistics over ROI voxels, names prefixed `firstorder-`.
/// Entropy and Uniformity use the fixed-bin-count histogram with `bin_count` bins.
FeatureVector firstorder_features(const VolumeImage& img, const RoiMask& mask, int bin_count = 32);
const std::vector<std::string>& firstorder_feature_names();

// ---- texture -------------------------------------------------------------------

enum class TextureFamily { GLCM, GLRLM, GLSZM, GLDM };

std::string_view to_string(TextureFamily family);  // "glcm", ...
inline constexpr std::array<TextureFamily, 4> kTextureFamilies = {TextureFamily::GLCM, TextureFamily::GLRLM,
                                                                  TextureFamily::GLSZM, TextureFamily::GLDM};

/// The 13 unique 3D neighbour directions (one of each +/- pair).
const std::array<VoxelCoord, 13>& unique_directions();

/// Dense gray-level matrix; rows are gray levels 1..rows, columns 1..cols
/// (pair partner level for GLCM; run length / zone size / dependence count otherwise).
struct LevelMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> counts;  // row-major, (level-1) * cols + (col-1)

  LevelMatrix() = default;
  LevelMatrix(int r, int c) : rows(r), cols(c), counts(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}
  double& operator()(int level, int col) {
    return counts[static_cast<std::size_t>(level - 1) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(col - 1)];
  }
  double operator()(int level, int col) const {
    return counts[static_cast<std::size_t>(level - 1) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(col - 1)];
  }
  double total() const;
};

/// Symmetric co-occurrence counts at distance 1, one matrix per unique direction.
std::vector<LevelMatrix> glcm_matrices(const DiscretizedRoi& roi);
/// Run-length counts, one matrix per unique direction.
std::vector<LevelMatrix> glrlm_matrices(const DiscretizedRoi& roi);
/// Zone counts over 26-connected equal-level zones.
LevelMatrix glszm_matrix(const DiscretizedRoi& roi);
/// Dependence counts (alpha = 0, Chebyshev distance 1, centre voxel included).
LevelMatrix gldm_matrix(const DiscretizedRoi& roi);

/// GLCM 22, GLRLM 16, GLSZM 16, GLDM 14 features, names prefixed with the
/// lowercase family. Directional families are averaged over directions that
/// contain at least one pair; an ROI with no pairs at all yields zeros.
FeatureVector texture_features(const DiscretizedRoi& roi, TextureFamily family);
const std::vector<std::string>& texture_feature_names(TextureFamily family);

// ---- full extraction -----------------------------------------------------------

struct ExtractionConfig {
  int bin_count = 32;
  /// "none", "haar" or "coif1".
  std::string wavelet = "none";
};

/// Shape + firstorder + the four texture families on the original image
/// (98 features, prefix `original-`); with a wavelet, firstorder and texture are
/// repeated on each of the 8 subbands under the original mask (prefix
/// `wavelet-<LLL..HHH>-`), giving 770.
FeatureVector extract_all(const VolumeImage& img, const RoiMask& mask, const ExtractionConfig& config);

/// Column names extract_all produces for this config, in order.
std::vector<std::string> feature_roster(const ExtractionConfig& config);

}  // namespace bmrisk
