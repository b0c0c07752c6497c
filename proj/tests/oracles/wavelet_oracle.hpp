#pragma once

// Direct triple-sum 3D circular convolution with the separable product kernel,
// independent of the library's axis-by-axis passes.

#include <vector>

#include "bmrisk/volume.hpp"

namespace oracle {

inline std::vector<double> direct_subband(const bmrisk::VolumeImage& img, const std::vector<double>& f0,
                                          const std::vector<double>& f1, const std::vector<double>& f2) {
  const auto& d = img.dims();
  const long n0 = static_cast<long>(d.nx), n1 = static_cast<long>(d.ny), n2 = static_cast<long>(d.nz);
  auto wrap = [](long i, long n) { return ((i % n) + n) % n; };
  std::vector<double> out(d.voxel_count(), 0.0);
  for (long z = 0; z < n2; ++z)
    for (long y = 0; y < n1; ++y)
      for (long x = 0; x < n0; ++x) {
        double acc = 0.0;
        for (std::size_t a = 0; a < f0.size(); ++a)
          for (std::size_t b = 0; b < f1.size(); ++b)
            for (std::size_t c = 0; c < f2.size(); ++c) {
              const long sx = wrap(x - static_cast<long>(a), n0);
              const long sy = wrap(y - static_cast<long>(b), n1);
              const long sz = wrap(z - static_cast<long>(c), n2);
              acc += f0[a] * f1[b] * f2[c] * img.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(sy), static_cast<std::size_t>(sz));
            }
        out[img.index(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z))] = acc;
      }
  return out;
}

}  // namespace oracle
