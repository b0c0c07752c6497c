#include <optional>

#include "bmrisk/error.hpp"
#include "bmrisk/features.hpp"
#include "bmrisk/wavelet.hpp"

namespace bmrisk {

namespace {

std::optional<WaveletBank> bank_for(const ExtractionConfig& config) {
  if (config.wavelet == "none" || config.wavelet.empty()) return std::nullopt;
  return WaveletBank::from_name(config.wavelet);
}

void add_intensity_classes(FeatureVector& out, const std::string& prefix, const VolumeImage& img, const RoiMask& mask,
                           int bin_count) {
  out.append(firstorder_features(img, mask, bin_count).with_prefix(prefix));
  const auto roi = discretize(img, mask, bin_count);
  for (auto family : kTextureFamilies) out.append(texture_features(roi, family).with_prefix(prefix));
}

void add_intensity_names(std::vector<std::string>& out, const std::string& prefix) {
  for (const auto& n : firstorder_feature_names()) out.push_back(prefix + n);
  for (auto family : kTextureFamilies) {
    for (const auto& n : texture_feature_names(family)) out.push_back(prefix + n);
  }
}

}  // namespace

FeatureVector extract_all(const VolumeImage& img, const RoiMask& mask, const ExtractionConfig& config) {
  if (config.bin_count < 2) throw ConfigError("bin count must be >= 2");
  require_same_grid(img, mask);
  require_nonempty(mask);
  FeatureVector out;
  out.append(shape_features(mask, img.spacing()).with_prefix("original-"));
  add_intensity_classes(out, "original-", img, mask, config.bin_count);
  if (const auto bank = bank_for(config)) {
    const auto bands = decompose(img, *bank);
    for (const auto& [label, band] : bands.bands()) {
      add_intensity_classes(out, "wavelet-" + label + "-", band, mask, config.bin_count);
    }
  }
  return out;
}

std::vector<std::string> feature_roster(const ExtractionConfig& config) {
  std::vector<std::string> out;
  for (const auto& n : shape_feature_names()) out.push_back("original-" + n);
  add_intensity_names(out, "original-");
  if (bank_for(config)) {
    for (auto label : kSubbandLabels) add_intensity_names(out, "wavelet-" + std::string(label) + "-");
  }
  return out;
}

}  // namespace bmrisk
