#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bmrisk/cohort.hpp"
#include "bmrisk/manifest.hpp"
#include "bmrisk/volume_io.hpp"

namespace bmrisk {

/// Synthetic longitudinal cohort. Each lesion is an ellipsoid on a two-tissue
/// MR background (white matter ~100, grey matter ~70). A progressing lesion's
/// last follow-up before the event grows, brightens and gains a fine
/// checkerboard texture, each scaled by `effect`. Clinical covariates are drawn
/// independently of progression.
struct SynthConfig {
  std::uint64_t seed = 1;
  int n_lesions = 150;
  /// Target fraction of HRM samples among all follow-up images.
  double prevalence = 0.05;
  /// Planted signal scale; 0 gives a null cohort.
  double effect = 1.0;
  int horizon_days = 100;
  GridSize dims{20, 20, 14};
  Spacing spacing{1.0, 1.0, 1.5};
  /// Fraction of lesions that carry a planning CT.
  double planning_ct_fraction = 1.0;
  /// Extension used for image keys (and files, when written).
  VolumeFormat format = VolumeFormat::Nifti1;
};

struct SynthCohort {
  std::vector<MetastasisRecord> records;
  /// Keys equal the ImageRef paths; voxels are float32-representable so a
  /// write/read round trip is lossless.
  MemoryImageStore images;
};

/// Deterministic per config. Throws ConfigError for n_lesions < 2 or a
/// prevalence outside (0, 0.5].
SynthCohort synth_cohort(const SynthConfig& config);

/// Writes every image and mask under `dir` plus `dir/manifest.json`.
void write_synth_cohort(const SynthCohort& cohort, const std::filesystem::path& dir);

}  // namespace bmrisk
