#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "bmrisk/error.hpp"
#include "bmrisk/features.hpp"

namespace bmrisk {

const std::vector<std::string>& shape_feature_names() {
  static const std::vector<std::string> names = {
      "shape-Volume",
      "shape-VoxelCount",
      "shape-SurfaceArea",
      "shape-SurfaceVolumeRatio",
      "shape-Sphericity",
      "shape-MajorAxisLength",
      "shape-MinorAxisLength",
      "shape-LeastAxisLength",
      "shape-Elongation",
      "shape-Flatness",
      "shape-Maximum3DDiameter",
      "shape-Maximum2DDiameterSlice",
      "shape-Maximum2DDiameterColumn",
      "shape-Maximum2DDiameterRow",
  };
  return names;
}

FeatureVector shape_features(const RoiMask& mask, const Spacing& spacing) {
  require_nonempty(mask);
  const auto& dims = mask.dims();
  const double sx = spacing[0];
  const double sy = spacing[1];
  const double sz = spacing[2];
  const std::array<double, 3> face_area = {sy * sz, sx * sz, sx * sy};
  static constexpr std::array<VoxelCoord, 6> kFaces = {{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

  std::size_t count = 0;
  double area = 0.0;
  std::vector<std::array<double, 3>> boundary;  // physical centres of voxels with an exposed face
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> points;
  points.reserve(mask.foreground_count());

  for (std::size_t z = 0; z < dims.nz; ++z) {
    for (std::size_t y = 0; y < dims.ny; ++y) {
      for (std::size_t x = 0; x < dims.nx; ++x) {
        const int ix = static_cast<int>(x);
        const int iy = static_cast<int>(y);
        const int iz = static_cast<int>(z);
        if (!mask.contains(ix, iy, iz)) continue;
        ++count;
        bool exposed = false;
        for (std::size_t f = 0; f < kFaces.size(); ++f) {
          const auto& d = kFaces[f];
          if (!mask.contains(ix + d[0], iy + d[1], iz + d[2])) {
            area += face_area[f / 2];
            exposed = true;
          }
        }
        const Eigen::Vector3d p(static_cast<double>(x) * sx, static_cast<double>(y) * sy, static_cast<double>(z) * sz);
        points.push_back(p);
        sum += p;
        if (exposed) boundary.push_back({p.x(), p.y(), p.z()});
      }
    }
  }

  const double volume = static_cast<double>(count) * sx * sy * sz;
  const double sphericity = std::cbrt(36.0 * std::numbers::pi * volume * volume) / area;

  const Eigen::Vector3d mean = sum / static_cast<double>(count);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(count);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("shape: covariance eigen-decomposition failed");
  // ascending order from Eigen
  const double least = std::max(0.0, solver.eigenvalues()[0]);
  const double minor = std::max(0.0, solver.eigenvalues()[1]);
  const double major = std::max(0.0, solver.eigenvalues()[2]);
  const double elongation = major > 0.0 ? std::sqrt(minor / major) : 0.0;
  const double flatness = major > 0.0 ? std::sqrt(least / major) : 0.0;

  // Maximum diameters are attained between boundary voxels: an interior voxel is
  // the midpoint of two ROI neighbours and cannot be an extreme point.
  double d3 = 0.0;
  std::array<double, 3> d2_sq = {0.0, 0.0, 0.0};  // same z, same x, same y
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    for (std::size_t j = i + 1; j < boundary.size(); ++j) {
      const double dx = boundary[i][0] - boundary[j][0];
      const double dy = boundary[i][1] - boundary[j][1];
      const double dz = boundary[i][2] - boundary[j][2];
      const double dd = dx * dx + dy * dy + dz * dz;
      d3 = std::max(d3, dd);
      if (dz == 0.0) d2_sq[0] = std::max(d2_sq[0], dd);
      if (dx == 0.0) d2_sq[1] = std::max(d2_sq[1], dd);
      if (dy == 0.0) d2_sq[2] = std::max(d2_sq[2], dd);
    }
  }

  FeatureVector out;
  const auto& names = shape_feature_names();
  out.add(names[0], volume);
  out.add(names[1], static_cast<double>(count));
  out.add(names[2], area);
  out.add(names[3], area / volume);
  out.add(names[4], sphericity);
  out.add(names[5], 4.0 * std::sqrt(major));
  out.add(names[6], 4.0 * std::sqrt(minor));
  out.add(names[7], 4.0 * std::sqrt(least));
  out.add(names[8], elongation);
  out.add(names[9], flatness);
  out.add(names[10], std::sqrt(d3));
  out.add(names[11], std::sqrt(d2_sq[0]));
  out.add(names[12], std::sqrt(d2_sq[1]));
  out.add(names[13], std::sqrt(d2_sq[2]));
  return out;
}

}  // namespace bmrisk
