#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bmrisk/cohort.hpp"
#include "bmrisk/cross_validation.hpp"
#include "bmrisk/feature_table.hpp"
#include "bmrisk/report.hpp"

namespace bmrisk {

struct PipelineConfig {
  std::filesystem::path manifest;
  /// Feature CSV; empty means <output_dir>/features.csv.
  std::filesystem::path features;
  std::filesystem::path output_dir;
  std::vector<int> sets{7};
  ExtractionConfig extraction{32, "haar"};
  NormalizationConfig normalization;
  int horizon_days = 100;
  CvConfig cv;
  bool force = false;

  std::filesystem::path features_path() const;
};

/// Everything that determines results, as JSON. Paths other than the manifest
/// and the thread count are left out so that artifacts compare equal across
/// output directories and thread settings.
std::string config_json(const PipelineConfig& config);

/// Assembles the rows of one feature set. Lesions missing a required block are
/// listed in `excluded_lesions`; images whose extraction failed are DataErrors.
Dataset build_dataset(const std::vector<MetastasisRecord>& records, const LabelingResult& labels,
                      const FeatureSetSpec& spec, const FeatureTable& table);

/// Reads any existing feature CSV, extracts what is missing or stale and writes
/// the CSV back.
ExtractionResult run_extraction(const PipelineConfig& config, const std::vector<MetastasisRecord>& records,
                                const ImageStore& store);

struct SetOutcome {
  FeatureSetSpec spec;
  std::size_t n_samples = 0;
  std::size_t n_hrm = 0;
  std::size_t n_features = 0;
  CvReport cv;
  RiskSplitReport risk;
};

/// CV, risk split and correlation ranking for one set, written under `dir`.
SetOutcome evaluate_set(const Dataset& data, const PipelineConfig& config, const std::filesystem::path& dir);

struct PipelineResult {
  std::vector<SetOutcome> sets;
  ExtractionResult extraction;
};

/// manifest -> extract -> label -> per set (assemble, CV, risk split) ->
/// Table-1 style AUC table. Failures are rethrown tagged with their stage.
PipelineResult run_pipeline(const PipelineConfig& config);
/// Same flow on an already loaded cohort (used with in-memory images).
PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<MetastasisRecord>& records,
                            const ImageStore& store);

/// Block name of an assembled column: clinical, follow-up-mr, Delta-mr, planning-mr or planning-ct.
std::string column_block(const std::string& column);

/// Table-1 layout: one row per source, a check mark per set, AUC row last.
std::string render_table1(const std::vector<SetOutcome>& sets);

}  // namespace bmrisk
