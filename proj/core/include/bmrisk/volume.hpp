#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace bmrisk {

enum class Modality { MR, CT };

std::string_view to_string(Modality m);
Modality modality_from_string(std::string_view s);

/// Voxel counts along x, y, z.
struct GridSize {
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::size_t nz = 1;

  std::size_t voxel_count() const { return nx * ny * nz; }
  std::size_t operator[](std::size_t axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  bool operator==(const GridSize&) const = default;
};

/// Physical voxel size in mm along x, y, z.
using Spacing = std::array<double, 3>;

/// Integer voxel coordinate (x, y, z).
using VoxelCoord = std::array<int, 3>;

/// Dense 3D scalar grid with physical spacing. Voxels are stored x-fastest:
/// index = x + nx * (y + ny * z). Immutable after construction.
class VolumeImage {
 public:
  VolumeImage(GridSize dims, Spacing spacing, std::vector<double> voxels,
              Modality modality = Modality::MR);

  const GridSize& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  Modality modality() const { return modality_; }
  std::span<const double> voxels() const { return voxels_; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + dims_.nx * (y + dims_.ny * z);
  }
  double at(std::size_t x, std::size_t y, std::size_t z) const { return voxels_[index(x, y, z)]; }

  /// Same grid and metadata, new voxel values.
  VolumeImage with_voxels(std::vector<double> voxels) const;

 private:
  GridSize dims_;
  Spacing spacing_;
  std::vector<double> voxels_;
  Modality modality_;
};

/// Binary region-of-interest on a voxel grid, same x-fastest layout as VolumeImage.
class RoiMask {
 public:
  RoiMask(GridSize dims, std::vector<std::uint8_t> voxels);

  /// A mask covering every voxel of the grid.
  static RoiMask full(GridSize dims);

  const GridSize& dims() const { return dims_; }
  std::span<const std::uint8_t> voxels() const { return voxels_; }
  bool contains(std::size_t index) const { return voxels_[index] != 0; }
  bool contains(int x, int y, int z) const;
  std::size_t foreground_count() const { return count_; }

 private:
  GridSize dims_;
  std::vector<std::uint8_t> voxels_;
  std::size_t count_ = 0;
};

/// Throws DataError unless the volume and mask share a grid.
void require_same_grid(const VolumeImage& img, const RoiMask& mask);

/// Throws DataError if the mask has no foreground voxels.
void require_nonempty(const RoiMask& mask);

}  // namespace bmrisk
