#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bmrisk/cohort.hpp"
#include "bmrisk/features.hpp"
#include "bmrisk/manifest.hpp"

namespace bmrisk {

/// MR volumes are z-scored and then white-stripe normalized over the whole
/// volume unless switched off; CT volumes keep their native scale.
struct NormalizationConfig {
  bool mr_zscore = true;
  bool mr_white_stripe = true;
  bool ct_zscore = false;
};

VolumeImage prepare_image(const VolumeImage& img, const NormalizationConfig& config);

struct ImageJob {
  std::string image_id;
  ImageRef ref;
  Modality modality = Modality::MR;
};

/// Planning MR, planning CT, then follow-ups, lesion by lesion.
std::vector<ImageJob> image_jobs(const std::vector<MetastasisRecord>& records);

struct FeatureRow {
  std::string image_id;
  std::uint64_t fingerprint = 0;
  FeatureVector features;
};

/// Per-image features under one extraction configuration.
struct FeatureTable {
  ExtractionConfig extraction;
  NormalizationConfig normalization;
  std::vector<std::string> roster;
  std::vector<FeatureRow> rows;

  ImageFeatures by_image() const;
};

/// Canonical description of the settings that determine feature values.
std::string extraction_signature(const ExtractionConfig& e, const NormalizationConfig& n);

struct ExtractionFailure {
  std::string image_id;
  std::string message;
};

struct ExtractionResult {
  FeatureTable table;
  std::vector<ExtractionFailure> failures;
  std::size_t extracted = 0;
  std::size_t reused = 0;
};

/// Extracts every job, reusing rows of `previous` whose fingerprint and
/// configuration match unless `force` is set. Failures are collected and the
/// remaining images still run. Output order follows `jobs` for any thread count.
ExtractionResult extract_features(const std::vector<ImageJob>& jobs, const ImageStore& store,
                                  const ExtractionConfig& extraction, const NormalizationConfig& normalization,
                                  const FeatureTable* previous, int threads, bool force);

/// CSV with `image_id,fingerprint,<roster...>` columns and a leading
/// `# ` comment line holding the configuration as JSON.
std::string feature_table_to_csv(const FeatureTable& table, const std::string& config_json);
FeatureTable feature_table_from_csv(const std::string& text);

}  // namespace bmrisk
