#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bmrisk/volume.hpp"

namespace bmrisk {

enum class NormalizationMethod { ZScore, WhiteStripe };

/// Output voxels are (v - mu) / sigma.
struct NormalizationParams {
  NormalizationMethod method = NormalizationMethod::ZScore;
  double mu = 0.0;
  double sigma = 1.0;
};

struct Normalized {
  VolumeImage image;
  NormalizationParams params;
};

/// Z-score over the whole volume.
Normalized z_normalize(const VolumeImage& img);
/// Z-score with mean and population std taken over the mask voxels only.
Normalized z_normalize(const VolumeImage& img, const RoiMask& mask);

struct WhiteStripeConfig {
  std::size_t bins = 256;
  std::size_t kernel_width = 7;  // binomial smoothing kernel, odd
  double tau = 0.05;             // quantile half-width of the stripe
  std::size_t min_stripe_voxels = 10;
};

/// Peak of the smoothed histogram used as the white-matter anchor.
struct StripePeak {
  std::size_t bin = 0;
  double intensity = 0.0;  // bin centre
  double quantile = 0.0;   // fraction of masked voxels <= intensity
  double median = 0.0;
};

/// Histogram of `values` over [min, max] with `bins` equal bins; the maximum
/// falls into the last bin.
std::vector<double> intensity_histogram(std::span<const double> values, std::size_t bins);

/// Convolves with the normalized binomial kernel of the given odd width
/// (zero padding at the ends).
std::vector<double> binomial_smooth(std::span<const double> hist, std::size_t kernel_width);

/// Locates the largest smoothed-histogram peak among bins whose centre lies
/// strictly above the median. Throws NumericalError when no such local peak exists.
StripePeak locate_stripe_peak(std::span<const double> values, const WhiteStripeConfig& config);

Normalized white_stripe_normalize(const VolumeImage& img, const RoiMask& brain_mask,
                                  const WhiteStripeConfig& config = {});

/// Type-7 (linear interpolation) sample quantile of already sorted values.
double sorted_quantile(std::span<const double> sorted, double q);

}  // namespace bmrisk
