#include "bmrisk/normalization.hpp"

#include <algorithm>
#include <cmath>

#include "bmrisk/error.hpp"

namespace bmrisk {

namespace {

std::vector<double> masked_values(const VolumeImage& img, const RoiMask& mask) {
  require_same_grid(img, mask);
  require_nonempty(mask);
  std::vector<double> out;
  out.reserve(mask.foreground_count());
  const auto v = img.voxels();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask.contains(i)) out.push_back(v[i]);
  }
  return out;
}

std::pair<double, double> mean_and_population_std(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

VolumeImage apply(const VolumeImage& img, double mu, double sigma) {
  std::vector<double> out(img.voxels().begin(), img.voxels().end());
  for (auto& v : out) v = (v - mu) / sigma;
  return img.with_voxels(std::move(out));
}

Normalized z_normalize_values(const VolumeImage& img, std::span<const double> reference) {
  const auto [lo, hi] = std::minmax_element(reference.begin(), reference.end());
  if (*lo == *hi) throw NumericalError("constant image: z-normalization needs nonzero variance");
  const auto [mu, sigma] = mean_and_population_std(reference);
  if (!(sigma > 0.0)) throw NumericalError("constant image: z-normalization needs nonzero variance");
  return {apply(img, mu, sigma), {NormalizationMethod::ZScore, mu, sigma}};
}

}  // namespace

Normalized z_normalize(const VolumeImage& img) { return z_normalize_values(img, img.voxels()); }

Normalized z_normalize(const VolumeImage& img, const RoiMask& mask) {
  const auto ref = masked_values(img, mask);
  return z_normalize_values(img, ref);
}

std::vector<double> intensity_histogram(std::span<const double> values, std::size_t bins) {
  std::vector<double> hist(bins, 0.0);
  if (values.empty() || bins == 0) return hist;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double vmin = *lo;
  const double width = (*hi - vmin) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>(std::floor((v - vmin) / width)) : 0;
    hist[std::min(b, bins - 1)] += 1.0;
  }
  return hist;
}

std::vector<double> binomial_smooth(std::span<const double> hist, std::size_t kernel_width) {
  if (kernel_width % 2 == 0) throw ConfigError("binomial kernel width must be odd");
  std::vector<double> kernel(kernel_width, 1.0);
  for (std::size_t k = 1; k < kernel_width; ++k) {
    kernel[k] = kernel[k - 1] * static_cast<double>(kernel_width - k) / static_cast<double>(k);
  }
  double total = 0.0;
  for (double c : kernel) total += c;
  for (auto& c : kernel) c /= total;

  const auto half = static_cast<std::ptrdiff_t>(kernel_width / 2);
  const auto n = static_cast<std::ptrdiff_t>(hist.size());
  std::vector<double> out(hist.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      const auto j = i + k;
      if (j >= 0 && j < n) acc += kernel[static_cast<std::size_t>(k + half)] * hist[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw NumericalError("quantile of empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

StripePeak locate_stripe_peak(std::span<const double> values, const WhiteStripeConfig& config) {
  if (config.bins < 3) throw ConfigError("white-stripe histogram needs at least 3 bins");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double vmin = sorted.front();
  const double vmax = sorted.back();
  if (vmin == vmax) throw NumericalError("constant image: white-stripe needs an intensity range");
  const double median = sorted_quantile(sorted, 0.5);

  const auto smooth = binomial_smooth(intensity_histogram(values, config.bins), config.kernel_width);
  const double width = (vmax - vmin) / static_cast<double>(config.bins);
  auto centre = [&](std::size_t b) { return vmin + (static_cast<double>(b) + 0.5) * width; };

  std::size_t best = config.bins;
  for (std::size_t b = 0; b < config.bins; ++b) {
    if (!(centre(b) > median)) continue;
    if (best == config.bins || smooth[b] > smooth[best]) best = b;
  }
  if (best == config.bins || smooth[best] <= 0.0) throw NumericalError("white-stripe: no histogram peak above the median");
  const double left = best > 0 ? smooth[best - 1] : 0.0;
  const double right = best + 1 < config.bins ? smooth[best + 1] : 0.0;
  if (smooth[best] < left || smooth[best] < right) {
    throw NumericalError("white-stripe: no histogram peak above the median");
  }

  StripePeak peak;
  peak.bin = best;
  peak.intensity = centre(best);
  peak.median = median;
  const auto below = std::upper_bound(sorted.begin(), sorted.end(), peak.intensity) - sorted.begin();
  peak.quantile = static_cast<double>(below) / static_cast<double>(sorted.size());
  return peak;
}

Normalized white_stripe_normalize(const VolumeImage& img, const RoiMask& brain_mask, const WhiteStripeConfig& config) {
  auto values = masked_values(img, brain_mask);
  const auto peak = locate_stripe_peak(values, config);
  std::sort(values.begin(), values.end());
  const double lo = sorted_quantile(values, peak.quantile - config.tau);
  const double hi = sorted_quantile(values, peak.quantile + config.tau);
  const auto first = std::lower_bound(values.begin(), values.end(), lo);
  const auto last = std::upper_bound(values.begin(), values.end(), hi);
  const std::span<const double> stripe(first, last);
  if (stripe.size() < config.min_stripe_voxels) {
    throw NumericalError("white-stripe: stripe contains fewer than " + std::to_string(config.min_stripe_voxels) +
                         " voxels");
  }
  const double sigma = mean_and_population_std(stripe).second;
  if (!(sigma > 0.0)) throw NumericalError("white-stripe: stripe has zero spread");
  return {apply(img, peak.intensity, sigma), {NormalizationMethod::WhiteStripe, peak.intensity, sigma}};
}

}  // namespace bmrisk
