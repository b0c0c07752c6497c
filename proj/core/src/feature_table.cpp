#include "bmrisk/feature_table.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <unordered_map>

#include "bmrisk/csv.hpp"
#include "bmrisk/error.hpp"
#include "bmrisk/normalization.hpp"
#include "bmrisk/parallel.hpp"
#include "json.hpp"

namespace bmrisk {

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16) throw DataError("feature CSV: malformed fingerprint '" + s + "'");
  std::uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else throw DataError("feature CSV: malformed fingerprint '" + s + "'");
  }
  return v;
}

json settings_json(const ExtractionConfig& e, const NormalizationConfig& n) {
  return {{"extraction", {{"bin_count", e.bin_count}, {"wavelet", e.wavelet}}},
          {"normalization",
           {{"mr_zscore", n.mr_zscore}, {"mr_white_stripe", n.mr_white_stripe}, {"ct_zscore", n.ct_zscore}}}};
}

}  // namespace

VolumeImage prepare_image(const VolumeImage& img, const NormalizationConfig& cfg) {
  if (img.modality() == Modality::CT) return cfg.ct_zscore ? z_normalize(img).image : img;
  VolumeImage out = cfg.mr_zscore ? z_normalize(img).image : img;
  if (cfg.mr_white_stripe) out = white_stripe_normalize(out, RoiMask::full(out.dims()), WhiteStripeConfig{}).image;
  return out;
}

std::vector<ImageJob> image_jobs(const std::vector<MetastasisRecord>& records) {
  std::vector<ImageJob> jobs;
  for (const auto& r : records) {
    jobs.push_back({planning_mr_id(r), r.planning_mr.ref, Modality::MR});
    if (r.planning_ct) jobs.push_back({planning_ct_id(r), *r.planning_ct, Modality::CT});
    for (std::size_t f = 0; f < r.followups.size(); ++f) jobs.push_back({followup_id(r, f), r.followups[f].ref, Modality::MR});
  }
  return jobs;
}

ImageFeatures FeatureTable::by_image() const {
  ImageFeatures out;
  for (const auto& row : rows) out.emplace(row.image_id, row.features);
  return out;
}

std::string extraction_signature(const ExtractionConfig& e, const NormalizationConfig& n) {
  return settings_json(e, n).dump();
}

ExtractionResult extract_features(const std::vector<ImageJob>& jobs, const ImageStore& store,
                                  const ExtractionConfig& extraction, const NormalizationConfig& normalization,
                                  const FeatureTable* previous, int threads, bool force) {
  ExtractionResult res;
  res.table.extraction = extraction;
  res.table.normalization = normalization;
  res.table.roster = feature_roster(extraction);
  const std::string sig = extraction_signature(extraction, normalization);
  const std::uint64_t sig_hash = fnv1a(sig.data(), sig.size());

  std::unordered_map<std::string, const FeatureRow*> old;
  if (previous && !force && previous->roster == res.table.roster &&
      extraction_signature(previous->extraction, previous->normalization) == sig) {
    for (const auto& row : previous->rows) old.emplace(row.image_id, &row);
  }

  struct Slot {
    std::optional<FeatureRow> row;
    std::string error;
    bool reused = false;
  };
  std::vector<Slot> slots(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    try {
      const std::uint64_t fp = store.fingerprint(job.ref) ^ sig_hash;
      if (auto it = old.find(job.image_id); it != old.end() && it->second->fingerprint == fp) {
        slots[i].row = *it->second;
        slots[i].reused = true;
        return;
      }
      const auto loaded = store.load(job.ref, job.modality);
      const auto img = prepare_image(loaded.image, normalization);
      slots[i].row = FeatureRow{job.image_id, fp, extract_all(img, loaded.mask, extraction)};
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (slots[i].row) {
      (slots[i].reused ? res.reused : res.extracted) += 1;
      res.table.rows.push_back(std::move(*slots[i].row));
    } else {
      res.failures.push_back({jobs[i].image_id, slots[i].error});
    }
  }
  return res;
}

std::string feature_table_to_csv(const FeatureTable& table, const std::string& config_json) {
  json meta = settings_json(table.extraction, table.normalization);
  meta["config"] = config_json.empty() ? json(nullptr) : json::parse(config_json);
  std::string out = "# " + meta.dump() + "\n";
  std::vector<std::string> header = {"image_id", "fingerprint"};
  header.insert(header.end(), table.roster.begin(), table.roster.end());
  out += csv_row(header);
  for (const auto& row : table.rows) {
    if (row.features.names() != table.roster) throw DataError("feature row '" + row.image_id + "' does not match the roster");
    std::vector<std::string> fields = {row.image_id, hex64(row.fingerprint)};
    for (double v : row.features.values()) fields.push_back(format_double(v));
    out += csv_row(fields);
  }
  return out;
}

FeatureTable feature_table_from_csv(const std::string& text) {
  std::vector<std::string> comments;
  const auto rows = parse_csv(text, &comments);
  if (comments.empty()) throw DataError("feature CSV: missing configuration comment line");
  FeatureTable t;
  try {
    const json meta = json::parse(comments.front());
    t.extraction.bin_count = meta.at("extraction").at("bin_count").get<int>();
    t.extraction.wavelet = meta.at("extraction").at("wavelet").get<std::string>();
    const auto& n = meta.at("normalization");
    t.normalization.mr_zscore = n.at("mr_zscore").get<bool>();
    t.normalization.mr_white_stripe = n.at("mr_white_stripe").get<bool>();
    t.normalization.ct_zscore = n.at("ct_zscore").get<bool>();
  } catch (const json::exception& e) {
    throw DataError(std::string("feature CSV: malformed configuration comment: ") + e.what());
  }
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "image_id" || rows[0][1] != "fingerprint") {
    throw DataError("feature CSV: header must start with image_id,fingerprint");
  }
  t.roster.assign(rows[0].begin() + 2, rows[0].end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw DataError("feature CSV: row " + std::to_string(r) + " has the wrong width");
    FeatureRow row{rows[r][0], parse_hex64(rows[r][1]), {}};
    for (std::size_t c = 0; c < t.roster.size(); ++c) {
      const std::string& s = rows[r][c + 2];
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError("feature CSV: bad number '" + s + "' in row " + std::to_string(r));
      }
      row.features.add(t.roster[c], v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace bmrisk
