#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bmrisk/dates.hpp"
#include "bmrisk/feature_vector.hpp"

namespace bmrisk {

/// Image and mask locations: paths relative to the manifest, or keys of an
/// in-memory store.
struct ImageRef {
  std::string image;
  std::string mask;

  bool operator==(const ImageRef&) const = default;
};

/// Per-lesion clinical data. Eleven stored values; the twelfth column,
/// the planning-to-follow-up gap, is computed per sample.
struct ClinicalCovariates {
  int rpa_class = 2;  // 1..3
  double eqd = 0.0;   // Gy
  int n_metastases = 1;
  double age = 60.0;
  int sex = 0;                          // 0 female, 1 male
  std::string primary_site = "other";  // lung, breast, melanoma, other
  double karnofsky = 80.0;
  bool extracranial_disease = false;

  bool operator==(const ClinicalCovariates&) const = default;
};

inline constexpr std::array<std::string_view, 4> kPrimarySites = {"lung", "breast", "melanoma", "other"};

/// 1 for a single metastasis, 2 for two to four, 3 for five or more.
int lesion_count_class(int n_metastases);

const std::vector<std::string>& clinical_feature_names();

struct Timepoint {
  Date date;
  ImageRef ref;

  bool operator==(const Timepoint&) const = default;
};

struct MetastasisRecord {
  std::string patient_id;
  std::string lesion_id;
  ClinicalCovariates clinical;
  Timepoint planning_mr;
  std::optional<ImageRef> planning_ct;  // dated with the planning MR
  std::vector<Timepoint> followups;     // strictly increasing dates
  std::optional<Date> event;            // progression
  Date censor_date;                     // last observation

  bool operator==(const MetastasisRecord&) const = default;
};

/// Throws DataError unless follow-ups are strictly increasing and after the
/// planning date, the event is not before the first follow-up, and the censor
/// date is not before any imaging date.
void validate_record(const MetastasisRecord& record);

// Image identifiers used as feature-table row keys.
std::string planning_mr_id(const MetastasisRecord& r);
std::string planning_ct_id(const MetastasisRecord& r);
std::string followup_id(const MetastasisRecord& r, std::size_t followup);

enum class RiskLabel { HRM, LRM, Excluded };
std::string_view to_string(RiskLabel label);

struct LabeledSample {
  std::size_t record = 0;    // index into the record list
  std::size_t followup = 0;  // index into record.followups
  std::string lesion_id;
  Date imaging_date;
  RiskLabel label = RiskLabel::LRM;
  long days_to_event_or_censor = 0;
  bool censored = true;

  bool operator==(const LabeledSample&) const = default;
};

struct DroppedFollowup {
  std::string lesion_id;
  Date imaging_date;
  std::string reason;
};

struct LabelingResult {
  std::vector<LabeledSample> samples;  // HRM and LRM, used for classification
  std::vector<LabeledSample> km_only;  // censored before the horizon; survival plots only
  std::vector<DroppedFollowup> dropped;
};

/// One sample per follow-up image. HRM when the event falls in
/// (imaging_date, imaging_date + horizon]; LRM when observed for at least
/// `horizon_days` without an event in that window; otherwise Excluded.
/// Imaging on or after the event date is dropped.
LabelingResult label_samples(const std::vector<MetastasisRecord>& records, int horizon_days = 100);

/// (F_FU - F_P) / days per feature, named `Delta-mr-<name>`. A leading
/// `follow-up-mr-` / `planning-mr-` tag is stripped before pairing.
FeatureVector delta_features(const FeatureVector& followup, const FeatureVector& planning, double days);

/// Feature-set definition. Sets 1..7 are the published ablation rows.
struct FeatureSetSpec {
  int id = 0;
  bool clinical = true;
  bool followup_mr = false;
  bool delta = false;
  bool planning_mr = false;
  bool planning_ct = false;
  bool wavelet = false;

  static FeatureSetSpec table_row(int id);
  std::string describe() const;
};

/// Extracted features per image id.
using ImageFeatures = std::unordered_map<std::string, FeatureVector>;

/// Column order of `assemble` for a set, given the per-image extraction roster.
/// Throws ConfigError if the set needs wavelet features the roster lacks.
std::vector<std::string> assembly_columns(const FeatureSetSpec& spec, const std::vector<std::string>& image_roster);

/// True when the record has every image the set needs (the planning CT for sets 5..7).
bool has_required_blocks(const FeatureSetSpec& spec, const MetastasisRecord& record);

/// Concatenates clinical, follow-up MR, delta, planning MR and planning CT
/// blocks, in that order. Throws DataError when a required block is missing.
FeatureVector assemble(const FeatureSetSpec& spec, const MetastasisRecord& record, const LabeledSample& sample,
                       const ImageFeatures& features);

}  // namespace bmrisk
