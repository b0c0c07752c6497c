#include "bmrisk/cohort.hpp"

#include <sstream>

#include "bmrisk/error.hpp"

namespace bmrisk {

namespace {

constexpr std::string_view kFollowupTag = "follow-up-mr-";
constexpr std::string_view kPlanningMrTag = "planning-mr-";
constexpr std::string_view kPlanningCtTag = "planning-ct-";
constexpr std::string_view kDeltaTag = "Delta-mr-";

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

bool keep(std::string_view name, bool wavelet) { return wavelet || !starts_with(name, "wavelet-"); }

std::string_view strip_tag(std::string_view name) {
  for (auto tag : {kFollowupTag, kPlanningMrTag}) {
    if (starts_with(name, tag)) return name.substr(tag.size());
  }
  return name;
}

const FeatureVector& lookup(const ImageFeatures& features, const std::string& id) {
  auto it = features.find(id);
  if (it == features.end()) throw DataError("no extracted features for image '" + id + "'");
  return it->second;
}

void add_block(FeatureVector& out, std::string_view tag, const FeatureVector& fv, bool wavelet) {
  for (const auto& [name, value] : fv.entries()) {
    std::string_view base = name;
    if (starts_with(base, kDeltaTag)) base.remove_prefix(kDeltaTag.size());
    if (keep(base, wavelet)) out.add(std::string(tag) + name, value);
  }
}

}  // namespace

int lesion_count_class(int n_metastases) {
  if (n_metastases <= 1) return 1;
  return n_metastases <= 4 ? 2 : 3;
}

const std::vector<std::string>& clinical_feature_names() {
  static const std::vector<std::string> names = {
      "clinical-RPAClass",       "clinical-EQD",           "clinical-NumberOfMetastases",
      "clinical-Age",            "clinical-Sex",           "clinical-PrimaryLung",
      "clinical-PrimaryBreast",  "clinical-PrimaryMelanoma", "clinical-Karnofsky",
      "clinical-PlanningFollowupGapDays", "clinical-LesionCountClass", "clinical-ExtracranialDisease"};
  return names;
}

void validate_record(const MetastasisRecord& r) {
  const std::string who = "lesion '" + r.lesion_id + "': ";
  if (r.lesion_id.empty()) throw DataError("lesion_id must be nonempty");
  if (r.clinical.rpa_class < 1 || r.clinical.rpa_class > 3) throw DataError(who + "rpa_class must be 1..3");
  if (r.clinical.n_metastases < 1) throw DataError(who + "n_metastases must be >= 1");
  if (r.clinical.sex != 0 && r.clinical.sex != 1) throw DataError(who + "sex must be 0 or 1");
  bool site_ok = false;
  for (auto s : kPrimarySites) site_ok = site_ok || s == r.clinical.primary_site;
  if (!site_ok) throw DataError(who + "unknown primary_site '" + r.clinical.primary_site + "'");

  Date previous = r.planning_mr.date;
  for (const auto& fu : r.followups) {
    if (fu.date <= previous) throw DataError(who + "follow-ups must be strictly increasing and after planning");
    previous = fu.date;
  }
  if (r.censor_date < previous) throw DataError(who + "censor_date precedes an imaging date");
  if (r.event && !r.followups.empty() && *r.event < r.followups.front().date) {
    throw DataError(who + "event precedes the first follow-up");
  }
}

std::string planning_mr_id(const MetastasisRecord& r) { return r.lesion_id + "/planning-mr"; }
std::string planning_ct_id(const MetastasisRecord& r) { return r.lesion_id + "/planning-ct"; }
std::string followup_id(const MetastasisRecord& r, std::size_t followup) {
  return r.lesion_id + "/follow-up-mr/" + format_date(r.followups.at(followup).date);
}

std::string_view to_string(RiskLabel label) {
  switch (label) {
    case RiskLabel::HRM: return "HRM";
    case RiskLabel::LRM: return "LRM";
    case RiskLabel::Excluded: return "excluded";
  }
  return "?";
}

LabelingResult label_samples(const std::vector<MetastasisRecord>& records, int horizon_days) {
  if (horizon_days <= 0) throw ConfigError("horizon_days must be positive");
  LabelingResult out;
  for (std::size_t ri = 0; ri < records.size(); ++ri) {
    const auto& r = records[ri];
    validate_record(r);
    for (std::size_t fi = 0; fi < r.followups.size(); ++fi) {
      const Date t = r.followups[fi].date;
      if (r.event && *r.event <= t) {
        out.dropped.push_back({r.lesion_id, t, "imaging on or after the progression date"});
        continue;
      }
      LabeledSample s;
      s.record = ri;
      s.followup = fi;
      s.lesion_id = r.lesion_id;
      s.imaging_date = t;
      if (r.event) {
        s.days_to_event_or_censor = days_between(t, *r.event);
        s.censored = false;
        s.label = s.days_to_event_or_censor <= horizon_days ? RiskLabel::HRM : RiskLabel::LRM;
      } else {
        s.days_to_event_or_censor = days_between(t, r.censor_date);
        s.censored = true;
        s.label = s.days_to_event_or_censor >= horizon_days ? RiskLabel::LRM : RiskLabel::Excluded;
      }
      (s.label == RiskLabel::Excluded ? out.km_only : out.samples).push_back(std::move(s));
    }
  }
  return out;
}

FeatureVector delta_features(const FeatureVector& followup, const FeatureVector& planning, double days) {
  if (!(days > 0.0)) throw DataError("delta features need a positive elapsed time");
  if (followup.size() != planning.size()) throw DataError("delta features: follow-up and planning rosters differ in size");
  std::unordered_map<std::string_view, double> base;
  for (const auto& [name, value] : planning.entries()) base.emplace(strip_tag(name), value);
  FeatureVector out;
  for (const auto& [name, value] : followup.entries()) {
    const auto key = strip_tag(name);
    auto it = base.find(key);
    if (it == base.end()) throw DataError("delta features: no planning value for '" + std::string(key) + "'");
    out.add(std::string(kDeltaTag) + std::string(key), (value - it->second) / days);
  }
  return out;
}

FeatureSetSpec FeatureSetSpec::table_row(int id) {
  FeatureSetSpec s;
  s.id = id;
  switch (id) {
    case 1: break;
    case 2: s.followup_mr = true; break;
    case 3: s.delta = true; break;
    case 4: s.planning_mr = true; break;
    case 5: s.planning_ct = true; break;
    case 6:
    case 7:
      s.followup_mr = s.delta = s.planning_mr = s.planning_ct = true;
      s.wavelet = id == 7;
      break;
    default: throw ConfigError("feature set must be 1..7, got " + std::to_string(id));
  }
  return s;
}

std::string FeatureSetSpec::describe() const {
  std::ostringstream os;
  os << "clinical";
  if (followup_mr) os << "+follow-up-mr";
  if (delta) os << "+delta";
  if (planning_mr) os << "+planning-mr";
  if (planning_ct) os << "+planning-ct";
  if (wavelet) os << "+wavelet";
  return os.str();
}

std::vector<std::string> assembly_columns(const FeatureSetSpec& spec, const std::vector<std::string>& image_roster) {
  const bool needs_images = spec.followup_mr || spec.delta || spec.planning_mr || spec.planning_ct;
  if (spec.wavelet && needs_images) {
    bool any = false;
    for (const auto& n : image_roster) any = any || starts_with(n, "wavelet-");
    if (!any) throw ConfigError("feature set " + std::to_string(spec.id) + " needs wavelet features; extract with a wavelet bank");
  }
  std::vector<std::string> cols;
  if (spec.clinical) cols = clinical_feature_names();
  auto block = [&](std::string_view tag) {
    for (const auto& n : image_roster)
      if (keep(n, spec.wavelet)) cols.push_back(std::string(tag) + n);
  };
  if (spec.followup_mr) block(kFollowupTag);
  if (spec.delta) block(kDeltaTag);
  if (spec.planning_mr) block(kPlanningMrTag);
  if (spec.planning_ct) block(kPlanningCtTag);
  return cols;
}

bool has_required_blocks(const FeatureSetSpec& spec, const MetastasisRecord& record) {
  return !spec.planning_ct || record.planning_ct.has_value();
}

FeatureVector assemble(const FeatureSetSpec& spec, const MetastasisRecord& record, const LabeledSample& sample,
                       const ImageFeatures& features) {
  if (!has_required_blocks(spec, record)) {
    throw DataError("lesion '" + record.lesion_id + "' has no planning CT, required by feature set " + std::to_string(spec.id));
  }
  const auto& fu = record.followups.at(sample.followup);
  const long gap = days_between(record.planning_mr.date, fu.date);
  FeatureVector out;
  if (spec.clinical) {
    const auto& c = record.clinical;
    const auto& names = clinical_feature_names();
    const double values[12] = {static_cast<double>(c.rpa_class),
                               c.eqd,
                               static_cast<double>(c.n_metastases),
                               c.age,
                               static_cast<double>(c.sex),
                               c.primary_site == "lung" ? 1.0 : 0.0,
                               c.primary_site == "breast" ? 1.0 : 0.0,
                               c.primary_site == "melanoma" ? 1.0 : 0.0,
                               c.karnofsky,
                               static_cast<double>(gap),
                               static_cast<double>(lesion_count_class(c.n_metastases)),
                               c.extracranial_disease ? 1.0 : 0.0};
    for (std::size_t i = 0; i < names.size(); ++i) out.add(names[i], values[i]);
  }
  const bool need_fu = spec.followup_mr || spec.delta;
  const bool need_pmr = spec.planning_mr || spec.delta;
  const FeatureVector* fu_features = need_fu ? &lookup(features, followup_id(record, sample.followup)) : nullptr;
  const FeatureVector* pmr_features = need_pmr ? &lookup(features, planning_mr_id(record)) : nullptr;

  if (spec.followup_mr) add_block(out, kFollowupTag, *fu_features, spec.wavelet);
  if (spec.delta) add_block(out, "", delta_features(*fu_features, *pmr_features, static_cast<double>(gap)), spec.wavelet);
  if (spec.planning_mr) add_block(out, kPlanningMrTag, *pmr_features, spec.wavelet);
  if (spec.planning_ct) add_block(out, kPlanningCtTag, lookup(features, planning_ct_id(record)), spec.wavelet);
  return out;
}

}  // namespace bmrisk
