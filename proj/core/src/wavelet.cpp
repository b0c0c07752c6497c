#include "bmrisk/wavelet.hpp"

#include <cmath>
#include <string>

#include "bmrisk/error.hpp"

namespace bmrisk {

namespace {

std::vector<double> quadrature_mirror(const std::vector<double>& low) {
  const std::size_t n = low.size();
  std::vector<double> high(n);
  for (std::size_t k = 0; k < n; ++k) high[k] = (k % 2 == 0 ? 1.0 : -1.0) * low[n - 1 - k];
  return high;
}

std::size_t axis_stride(const GridSize& dims, std::size_t axis) {
  return axis == 0 ? 1 : (axis == 1 ? dims.nx : dims.nx * dims.ny);
}

// sign = -1 gives convolution (x[n-k]), +1 gives correlation (x[n+k]).
std::vector<double> filter_axis(std::span<const double> data, const GridSize& dims, std::size_t axis,
                                std::span<const double> filter, int sign) {
  if (data.size() != dims.voxel_count()) throw DataError("filter_axis: data size does not match dims");
  const std::size_t len = dims[axis];
  const std::size_t stride = axis_stride(dims, axis);
  const std::size_t taps = filter.size();

  // source position for (n, k)
  std::vector<std::size_t> src(len * taps);
  for (std::size_t n = 0; n < len; ++n) {
    for (std::size_t k = 0; k < taps; ++k) {
      const auto shift = static_cast<long long>(k % len);
      long long j = static_cast<long long>(n) + sign * shift;
      const auto l = static_cast<long long>(len);
      j = ((j % l) + l) % l;
      src[n * taps + k] = static_cast<std::size_t>(j);
    }
  }

  std::vector<double> out(data.size(), 0.0);
  const std::size_t outer = dims.voxel_count() / len;
  for (std::size_t line = 0; line < outer; ++line) {
    // base index of this line: decompose `line` into the other two coordinates
    std::size_t base = 0;
    if (axis == 0) {
      base = line * dims.nx;
    } else if (axis == 1) {
      const std::size_t x = line % dims.nx;
      const std::size_t z = line / dims.nx;
      base = x + dims.nx * dims.ny * z;
    } else {
      base = line;
    }
    for (std::size_t n = 0; n < len; ++n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < taps; ++k) acc += filter[k] * data[base + stride * src[n * taps + k]];
      out[base + stride * n] = acc;
    }
  }
  return out;
}

}  // namespace

WaveletBank WaveletBank::haar() {
  const double h = 1.0 / std::sqrt(2.0);
  WaveletBank bank{"haar", {h, h}, {}};
  bank.high = quadrature_mirror(bank.low);
  return bank;
}

WaveletBank WaveletBank::coif1() {
  // closed form in sqrt(7); sum of taps is sqrt(2), sum of squares is 1
  const double r7 = std::sqrt(7.0);
  const double scale = std::sqrt(2.0) / 32.0;
  WaveletBank bank{"coif1",
                   {(-3.0 + r7) * scale, (1.0 - r7) * scale, (14.0 - 2.0 * r7) * scale, (14.0 + 2.0 * r7) * scale,
                    (5.0 + r7) * scale, (1.0 - r7) * scale},
                   {}};
  bank.high = quadrature_mirror(bank.low);
  return bank;
}

WaveletBank WaveletBank::from_name(std::string_view name) {
  if (name == "haar") return haar();
  if (name == "coif1") return coif1();
  throw ConfigError("unknown wavelet '" + std::string(name) + "' (expected haar or coif1)");
}

SubbandSet::SubbandSet(std::vector<std::pair<std::string, VolumeImage>> bands) : bands_(std::move(bands)) {
  if (bands_.size() != kSubbandLabels.size()) throw DataError("a subband set needs exactly 8 subbands");
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    if (bands_[i].first != kSubbandLabels[i]) throw DataError("subbands must be ordered LLL..HHH");
    if (!(bands_[i].second.dims() == bands_[0].second.dims())) throw DataError("subband dims mismatch");
  }
}

const VolumeImage& SubbandSet::at(std::string_view label) const {
  for (const auto& [name, img] : bands_) {
    if (name == label) return img;
  }
  throw DataError("missing subband '" + std::string(label) + "'");
}

std::vector<double> convolve_axis(std::span<const double> data, const GridSize& dims, std::size_t axis,
                                  std::span<const double> filter) {
  return filter_axis(data, dims, axis, filter, -1);
}

std::vector<double> correlate_axis(std::span<const double> data, const GridSize& dims, std::size_t axis,
                                   std::span<const double> filter) {
  return filter_axis(data, dims, axis, filter, +1);
}

SubbandSet decompose(const VolumeImage& img, const WaveletBank& bank) {
  if (bank.low.empty() || bank.high.empty()) throw ConfigError("wavelet bank filters must be nonempty");
  const auto& dims = img.dims();
  if (dims.voxel_count() == 0) throw DataError("cannot decompose an empty volume");

  const std::array<std::span<const double>, 2> filters{bank.low, bank.high};
  std::vector<std::vector<double>> level{std::vector<double>(img.voxels().begin(), img.voxels().end())};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    std::vector<std::vector<double>> next;
    next.reserve(level.size() * 2);
    for (const auto& data : level) {
      for (const auto& f : filters) next.push_back(convolve_axis(data, dims, axis, f));
    }
    level = std::move(next);
  }
  // level order: bit 2 = axis0 filter, bit 1 = axis1, bit 0 = axis2 -> LLL..HHH
  std::vector<std::pair<std::string, VolumeImage>> bands;
  bands.reserve(8);
  for (std::size_t i = 0; i < 8; ++i) {
    bands.emplace_back(std::string(kSubbandLabels[i]), img.with_voxels(std::move(level[i])));
  }
  return SubbandSet(std::move(bands));
}

VolumeImage reconstruct(const SubbandSet& subbands, const WaveletBank& bank) {
  if (subbands.size() != 8) throw DataError("reconstruct needs all 8 subbands");
  const auto& first = subbands.at("LLL");
  const auto& dims = first.dims();
  std::vector<double> sum(dims.voxel_count(), 0.0);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto label = kSubbandLabels[i];
    const auto& band = subbands.at(label);
    if (!(band.dims() == dims)) throw DataError("subband dims mismatch");
    std::vector<double> data(band.voxels().begin(), band.voxels().end());
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const auto& f = label[axis] == 'L' ? bank.low : bank.high;
      data = correlate_axis(data, dims, axis, f);
    }
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += data[j];
  }
  for (auto& v : sum) v *= 0.125;
  return first.with_voxels(std::move(sum));
}

}  // namespace bmrisk
