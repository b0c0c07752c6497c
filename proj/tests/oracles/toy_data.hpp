#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bmrisk/rng.hpp"

namespace oracle {

/// Random linearly separable set in p dimensions: label = sign(u.x - 0.3)
/// with points inside a slab of half-width `gap` around the plane rejected.
/// Both classes are present.
inline void separable(bmrisk::Rng& rng, std::size_t n, std::size_t p, double gap,
                      std::vector<std::vector<double>>& rows, std::vector<int>& y) {
  std::vector<double> u(p);
  double norm = 0;
  for (auto& v : u) {
    v = rng.normal();
    norm += v * v;
  }
  for (auto& v : u) v /= std::sqrt(norm);
  rows.clear();
  y.clear();
  while (rows.size() < n) {
    std::vector<double> x(p);
    double s = -0.3;
    for (std::size_t j = 0; j < p; ++j) {
      x[j] = rng.normal(0, 1.0 + j);
      s += u[j] * x[j] / (1.0 + j);
    }
    if (std::fabs(s) < gap) continue;
    const int label = s > 0 ? 1 : 0;
    const bool one_class_so_far = !y.empty() && std::all_of(y.begin(), y.end(), [&](int v) { return v == label; });
    if (rows.size() + 1 == n && one_class_so_far) continue;
    rows.push_back(x);
    y.push_back(label);
  }
}

}  // namespace oracle
