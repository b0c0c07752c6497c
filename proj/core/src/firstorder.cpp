#include <algorithm>
#include <cmath>

#include "bmrisk/error.hpp"
#include "bmrisk/features.hpp"
#include "bmrisk/normalization.hpp"

namespace bmrisk {

const std::vector<std::string>& firstorder_feature_names() {
  static const std::vector<std::string> names = {
      "firstorder-Energy",      "firstorder-Entropy",      "firstorder-Minimum",
      "firstorder-10Percentile", "firstorder-90Percentile", "firstorder-Maximum",
      "firstorder-Mean",        "firstorder-Median",       "firstorder-InterquartileRange",
      "firstorder-Range",       "firstorder-MeanAbsoluteDeviation", "firstorder-RootMeanSquared",
      "firstorder-Skewness",    "firstorder-Kurtosis",     "firstorder-Variance",
      "firstorder-Uniformity",
  };
  return names;
}

FeatureVector firstorder_features(const VolumeImage& img, const RoiMask& mask, int bin_count) {
  require_same_grid(img, mask);
  require_nonempty(mask);
  std::vector<double> v;
  v.reserve(mask.foreground_count());
  const auto voxels = img.voxels();
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    if (mask.contains(i)) v.push_back(voxels[i]);
  }
  const auto n = static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  const double vmin = v.front();
  const double vmax = v.back();
  const bool constant = vmin == vmax;

  double sum = 0.0;
  double energy = 0.0;
  for (double x : v) {
    sum += x;
    energy += x * x;
  }
  const double mean = constant ? vmin : sum / n;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double mad = 0.0;
  if (!constant) {
    for (double x : v) {
      const double d = x - mean;
      m2 += d * d;
      m3 += d * d * d;
      m4 += d * d * d * d;
      mad += std::fabs(d);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    mad /= n;
  }
  const double skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  const double kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;

  std::vector<double> hist(static_cast<std::size_t>(bin_count), 0.0);
  for (double x : v) hist[static_cast<std::size_t>(discretize_value(x, vmin, vmax, bin_count) - 1)] += 1.0;
  double entropy = 0.0;
  double uniformity = 0.0;
  for (double c : hist) {
    if (c <= 0.0) continue;
    const double p = c / n;
    entropy -= p * std::log2(p);
    uniformity += p * p;
  }

  const double p10 = sorted_quantile(v, 0.10);
  const double p90 = sorted_quantile(v, 0.90);
  const double p25 = sorted_quantile(v, 0.25);
  const double p75 = sorted_quantile(v, 0.75);

  const auto& names = firstorder_feature_names();
  FeatureVector out;
  out.add(names[0], energy);
  out.add(names[1], entropy);
  out.add(names[2], vmin);
  out.add(names[3], p10);
  out.add(names[4], p90);
  out.add(names[5], vmax);
  out.add(names[6], mean);
  out.add(names[7], sorted_quantile(v, 0.5));
  out.add(names[8], p75 - p25);
  out.add(names[9], vmax - vmin);
  out.add(names[10], mad);
  out.add(names[11], std::sqrt(energy / n));
  out.add(names[12], skewness);
  out.add(names[13], kurtosis);
  out.add(names[14], m2);
  out.add(names[15], uniformity);
  return out;
}

}  // namespace bmrisk
