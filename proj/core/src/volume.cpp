#include "bmrisk/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmrisk/error.hpp"

namespace bmrisk {

std::string_view to_string(Modality m) { return m == Modality::MR ? "MR" : "CT"; }

Modality modality_from_string(std::string_view s) {
  if (s == "MR" || s == "mr") return Modality::MR;
  if (s == "CT" || s == "ct") return Modality::CT;
  throw DataError("unknown modality '" + std::string(s) + "'");
}

namespace {

void validate_dims(const GridSize& dims) {
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1) {
    throw DataError("volume dimensions must be >= 1 along every axis");
  }
}

}  // namespace

VolumeImage::VolumeImage(GridSize dims, Spacing spacing, std::vector<double> voxels, Modality modality)
    : dims_(dims), spacing_(spacing), voxels_(std::move(voxels)), modality_(modality) {
  validate_dims(dims_);
  for (double s : spacing_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DataError("voxel spacing must be finite and > 0");
  }
  if (voxels_.size() != dims_.voxel_count()) {
    throw DataError("voxel count " + std::to_string(voxels_.size()) + " does not match dims " +
                    std::to_string(dims_.voxel_count()));
  }
  if (!std::all_of(voxels_.begin(), voxels_.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("volume contains non-finite voxel values");
  }
}

VolumeImage VolumeImage::with_voxels(std::vector<double> voxels) const {
  return VolumeImage(dims_, spacing_, std::move(voxels), modality_);
}

RoiMask::RoiMask(GridSize dims, std::vector<std::uint8_t> voxels) : dims_(dims), voxels_(std::move(voxels)) {
  validate_dims(dims_);
  if (voxels_.size() != dims_.voxel_count()) {
    throw DataError("mask voxel count does not match its dims");
  }
  for (auto& v : voxels_) v = v != 0 ? 1 : 0;
  count_ = static_cast<std::size_t>(std::count(voxels_.begin(), voxels_.end(), std::uint8_t{1}));
}

RoiMask RoiMask::full(GridSize dims) {
  return RoiMask(dims, std::vector<std::uint8_t>(dims.voxel_count(), 1));
}

bool RoiMask::contains(int x, int y, int z) const {
  if (x < 0 || y < 0 || z < 0) return false;
  const auto ux = static_cast<std::size_t>(x);
  const auto uy = static_cast<std::size_t>(y);
  const auto uz = static_cast<std::size_t>(z);
  if (ux >= dims_.nx || uy >= dims_.ny || uz >= dims_.nz) return false;
  return voxels_[ux + dims_.nx * (uy + dims_.ny * uz)] != 0;
}

void require_same_grid(const VolumeImage& img, const RoiMask& mask) {
  if (!(img.dims() == mask.dims())) {
    throw DataError("mask grid does not match volume grid (no resampling is performed)");
  }
}

void require_nonempty(const RoiMask& mask) {
  if (mask.foreground_count() == 0) throw DataError("ROI mask is empty");
}

}  // namespace bmrisk
