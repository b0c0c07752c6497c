#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bmrisk/volume.hpp"

namespace bmrisk {

/// Orthonormal two-channel filter pair. Built-in banks satisfy the quadrature
/// relation high[k] = (-1)^k * low[L-1-k].
struct WaveletBank {
  std::string name;
  std::vector<double> low;
  std::vector<double> high;

  static WaveletBank haar();
  /// Coiflet-1 (six taps), low-pass in the pywt decomposition order.
  static WaveletBank coif1();
  /// "haar" or "coif1".
  static WaveletBank from_name(std::string_view name);
};

/// Subband labels; letter i is the filter applied along axis i.
inline constexpr std::array<std::string_view, 8> kSubbandLabels = {"LLL", "LLH", "LHL", "LHH",
                                                                   "HLL", "HLH", "HHL", "HHH"};

/// The eight undecimated subbands of one volume, in kSubbandLabels order.
class SubbandSet {
 public:
  SubbandSet() = default;
  explicit SubbandSet(std::vector<std::pair<std::string, VolumeImage>> bands);

  const VolumeImage& at(std::string_view label) const;
  const std::vector<std::pair<std::string, VolumeImage>>& bands() const { return bands_; }
  std::size_t size() const { return bands_.size(); }

 private:
  std::vector<std::pair<std::string, VolumeImage>> bands_;
};

/// Single-level undecimated separable decomposition with periodic extension.
/// Subband XYZ is the circular convolution with filter X along axis 0, then Y
/// along axis 1, then Z along axis 2. Every subband keeps the source grid.
SubbandSet decompose(const VolumeImage& img, const WaveletBank& bank);

/// Inverse of decompose for orthonormal banks: x = 1/8 * sum over subbands of
/// the adjoint (circular correlation) filters applied per axis.
VolumeImage reconstruct(const SubbandSet& subbands, const WaveletBank& bank);

/// Circular convolution of a volume along one axis: y[n] = sum_k f[k] x[(n-k) mod N].
std::vector<double> convolve_axis(std::span<const double> data, const GridSize& dims, std::size_t axis,
                                  std::span<const double> filter);

/// Adjoint of convolve_axis: y[n] = sum_k f[k] x[(n+k) mod N].
std::vector<double> correlate_axis(std::span<const double> data, const GridSize& dims, std::size_t axis,
                                   std::span<const double> filter);

}  // namespace bmrisk
