#include "bmrisk/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "bmrisk/csv.hpp"
#include "bmrisk/error.hpp"
#include "bmrisk/manifest.hpp"
#include "bmrisk/selection.hpp"
#include "json.hpp"

namespace bmrisk {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

json cv_json(const CvConfig& c) {
  return {{"repeats", c.repeats},
          {"test_fraction", c.test_fraction},
          {"seed", c.seed},
          {"global_selection", c.global_selection},
          {"selection_cap", c.selection_cap == 0 ? json("one per ten samples") : json(c.selection_cap)},
          {"max_split_retries", c.max_split_retries},
          {"classifier",
           {{"C", c.classifier.C},
            {"sensitivity_weight", c.classifier.sensitivity_weight},
            {"theta", c.classifier.theta},
            {"max_epochs", c.classifier.max_epochs},
            {"tolerance", c.classifier.tolerance}}}};
}

std::string comment_line(const std::string& config) { return "# config " + json::parse(config).dump() + "\n"; }

std::vector<FeatureVector> assemble_all(const std::vector<MetastasisRecord>& records,
                                        const std::vector<LabeledSample>& in, const FeatureSetSpec& spec,
                                        const ImageFeatures& features, std::vector<LabeledSample>& kept,
                                        std::vector<std::string>& excluded) {
  std::vector<FeatureVector> rows;
  for (const auto& s : in) {
    const auto& rec = records.at(s.record);
    if (!has_required_blocks(spec, rec)) {
      if (std::find(excluded.begin(), excluded.end(), rec.lesion_id) == excluded.end()) excluded.push_back(rec.lesion_id);
      continue;
    }
    rows.push_back(assemble(spec, rec, s, features));
    kept.push_back(s);
  }
  return rows;
}

FeatureMatrix to_matrix(const std::vector<FeatureVector>& rows, const std::vector<std::string>& columns) {
  if (rows.empty()) return FeatureMatrix(columns, 0);
  auto m = FeatureMatrix::from_vectors(rows);
  if (m.names() != columns) throw DataError("assembled columns do not match the set's column plan");
  return m;
}

std::string correlations_csv(const Dataset& data, const std::string& config, std::string& top_text) {
  std::vector<double> y(data.y.begin(), data.y.end());
  const auto rep = correlation_report(data.x, y);
  std::string out = comment_line(config) + csv_row({"block", "rank", "feature", "r", "degenerate"});
  std::vector<std::string> blocks;
  std::map<std::string, int> rank;
  for (const auto& e : rep.ranked) {
    const auto block = column_block(e.name);
    if (!rank.count(block)) blocks.push_back(block);
    const int k = ++rank[block];
    out += csv_row({block, std::to_string(k), e.name, format_double(e.r), e.degenerate ? "1" : "0"});
  }
  std::sort(blocks.begin(), blocks.end());
  std::ostringstream os;
  os << "Features with strongest correlation to label, per source\n";
  for (const auto& b : blocks) {
    os << "\n" << b << "\n";
    int k = 0;
    for (const auto& e : rep.ranked) {
      if (column_block(e.name) != b) continue;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%+.2f", e.r);
      os << "  " << ++k << "  " << e.name << "  " << buf << "\n";
      if (k == 3) break;
    }
  }
  top_text = os.str();
  return out;
}

std::string predictions_csv(const Dataset& data, const CvReport& cv, double theta, const std::string& config) {
  std::string out = comment_line(config) +
                    csv_row({"lesion_id", "imaging_date", "label", "days_to_event_or_censor", "event", "oof_score", "predicted"});
  auto emit = [&](const LabeledSample& s, const std::optional<double>& score) {
    out += csv_row({s.lesion_id, format_date(s.imaging_date), std::string(to_string(s.label)),
                    std::to_string(s.days_to_event_or_censor), s.censored ? "0" : "1",
                    score ? format_double(*score) : "", score ? (*score >= theta ? "HRM" : "LRM") : ""});
  };
  for (std::size_t i = 0; i < data.samples.size(); ++i) emit(data.samples[i], cv.oof_scores[i]);
  for (std::size_t i = 0; i < data.km_only.size(); ++i) emit(data.km_only[i], cv.km_only_scores[i]);
  return out;
}

json cv_report_json(const SetOutcome& o, const std::string& config) {
  json repeats = json::array();
  for (const auto& r : o.cv.repeats) {
    repeats.push_back({{"repeat", r.index},
                       {"seed", r.seed},
                       {"retries", r.retries},
                       {"n_train", r.n_train},
                       {"n_test", r.n_test},
                       {"n_selected", r.n_selected},
                       {"straddling_lesions", r.straddling_lesions},
                       {"auc", r.auc}});
  }
  json selected = json::array();
  for (std::size_t i = 0; i < o.cv.selection_counts.size() && i < 25; ++i) {
    selected.push_back({{"feature", o.cv.selection_counts[i].first}, {"repeats", o.cv.selection_counts[i].second}});
  }
  const auto& c = o.cv.pooled_confusion;
  return {{"config", json::parse(config)},
          {"set", o.spec.id},
          {"sources", o.spec.describe()},
          {"n_samples", o.n_samples},
          {"n_hrm", o.n_hrm},
          {"n_features", o.n_features},
          {"mean_auc", o.cv.mean_auc},
          {"std_auc", o.cv.std_auc},
          {"pooled_auc", o.cv.pooled_auc},
          {"pooled_confusion", {{"tp", c.tp}, {"fn", c.fn}, {"tn", c.tn}, {"fp", c.fp}}},
          {"max_straddling_lesions", o.cv.max_straddling},
          {"most_selected", selected},
          {"repeats", repeats}};
}

}  // namespace

fs::path PipelineConfig::features_path() const { return features.empty() ? output_dir / "features.csv" : features; }

std::string config_json(const PipelineConfig& c) {
  const json j = {{"manifest", c.manifest.generic_string()},
                  {"sets", c.sets},
                  {"extraction", {{"bin_count", c.extraction.bin_count}, {"wavelet", c.extraction.wavelet}}},
                  {"normalization",
                   {{"mr_zscore", c.normalization.mr_zscore},
                    {"mr_white_stripe", c.normalization.mr_white_stripe},
                    {"ct_zscore", c.normalization.ct_zscore}}},
                  {"horizon_days", c.horizon_days},
                  {"cv", cv_json(c.cv)}};
  return j.dump();
}

std::string column_block(const std::string& column) {
  for (const char* b : {"clinical", "follow-up-mr", "Delta-mr", "planning-mr", "planning-ct"}) {
    const std::string prefix = std::string(b) + "-";
    if (column.rfind(prefix, 0) == 0) return b;
  }
  return "other";
}

Dataset build_dataset(const std::vector<MetastasisRecord>& records, const LabelingResult& labels,
                      const FeatureSetSpec& spec, const FeatureTable& table) {
  Dataset d;
  d.spec = spec;
  const auto columns = assembly_columns(spec, table.roster);
  const auto features = table.by_image();
  const auto rows = assemble_all(records, labels.samples, spec, features, d.samples, d.excluded_lesions);
  const auto km_rows = assemble_all(records, labels.km_only, spec, features, d.km_only, d.excluded_lesions);
  d.x = to_matrix(rows, columns);
  d.x_km_only = to_matrix(km_rows, columns);
  for (const auto& s : d.samples) d.y.push_back(s.label == RiskLabel::HRM ? 1 : 0);
  return d;
}

ExtractionResult run_extraction(const PipelineConfig& config, const std::vector<MetastasisRecord>& records,
                                const ImageStore& store) {
  const fs::path path = config.features_path();
  std::optional<FeatureTable> previous;
  if (!config.force && fs::exists(path)) {
    try {
      previous = feature_table_from_csv(read_text(path));
    } catch (const DataError&) {
      previous.reset();  // unreadable cache: extract everything again
    }
  }
  auto res = extract_features(image_jobs(records), store, config.extraction, config.normalization,
                              previous ? &*previous : nullptr, config.cv.threads, config.force);
  write_text(path, feature_table_to_csv(res.table, config_json(config)));
  return res;
}

SetOutcome evaluate_set(const Dataset& data, const PipelineConfig& config, const fs::path& dir) {
  const std::string cfg = config_json(config);
  SetOutcome o;
  o.spec = data.spec;
  o.n_samples = data.samples.size();
  o.n_hrm = data.positives();
  o.n_features = data.x.cols();
  o.cv = monte_carlo_cv(data, config.cv);
  const double theta = config.cv.classifier.theta;
  o.risk = risk_split_report(predictions_from_cv(data, o.cv, theta));

  json meta = json::parse(cfg);
  meta["set"] = data.spec.id;
  const std::string metadata = meta.dump();
  fs::create_directories(dir);
  write_text(dir / "cv_report.json", cv_report_json(o, cfg).dump(2) + "\n");
  json risk = json::parse(risk_split_json(o.risk));
  risk["config"] = json::parse(cfg);
  risk["set"] = data.spec.id;
  write_text(dir / "risk_split.json", risk.dump(2) + "\n");
  write_text(dir / "risk_split.txt", comment_line(cfg) + render_summary(o.risk));
  write_text(dir / "km.csv", comment_line(cfg) + km_table_csv(o.risk));
  write_text(dir / "km.svg", km_svg(o.risk, metadata));
  write_text(dir / "predictions.csv", predictions_csv(data, o.cv, theta, cfg));

  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (!o.cv.oof_scores[i]) continue;
    scores.push_back(*o.cv.oof_scores[i]);
    labels.push_back(data.y[i]);
  }
  if (std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0) {
    write_text(dir / "roc.svg", roc_svg(roc_curve(scores, labels), "Out-of-fold mean scores, set " + std::to_string(data.spec.id), metadata));
  }
  std::string top;
  write_text(dir / "correlations.csv", correlations_csv(data, cfg, top));
  write_text(dir / "table2.txt", comment_line(cfg) + top);
  return o;
}

std::string render_table1(const std::vector<SetOutcome>& sets) {
  struct Row {
    const char* name;
    bool FeatureSetSpec::*flag;
  };
  const Row rows[] = {{"Clinical data", &FeatureSetSpec::clinical},
                      {"Radiomic features follow-up MRI", &FeatureSetSpec::followup_mr},
                      {"Delta-radiomic features", &FeatureSetSpec::delta},
                      {"Radiomic features planning MRI", &FeatureSetSpec::planning_mr},
                      {"Radiomic features planning CT", &FeatureSetSpec::planning_ct},
                      {"Wavelet filtered images", &FeatureSetSpec::wavelet}};
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-34s", "");
  os << buf;
  for (const auto& s : sets) {
    std::snprintf(buf, sizeof buf, "%8s", ("Set " + std::to_string(s.spec.id)).c_str());
    os << buf;
  }
  os << "\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-34s", r.name);
    os << buf;
    for (const auto& s : sets) {
      std::snprintf(buf, sizeof buf, "%8s", (s.spec.*r.flag) ? "x" : "");
      os << buf;
    }
    os << "\n";
  }
  std::snprintf(buf, sizeof buf, "%-34s", "AUC score (mean over repeats)");
  os << buf;
  for (const auto& s : sets) {
    std::snprintf(buf, sizeof buf, "%8s", fixed3(s.cv.mean_auc).c_str());
    os << buf;
  }
  os << "\n";
  return os.str();
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<MetastasisRecord>& records,
                            const ImageStore& store) {
  if (config.sets.empty()) throw ConfigError("no feature sets requested");
  for (int s : config.sets) (void)FeatureSetSpec::table_row(s);
  const std::string cfg = config_json(config);
  PipelineResult result;
  fs::create_directories(config.output_dir);

  try {
    result.extraction = run_extraction(config, records, store);
  } catch (...) {
    rethrow_with_stage("extract");
  }
  if (!result.extraction.failures.empty()) {
    const auto& f = result.extraction.failures.front();
    throw DataError("[extract] " + std::to_string(result.extraction.failures.size()) + " image(s) failed; first: " +
                    f.image_id + ": " + f.message);
  }
  LabelingResult labels;
  try {
    labels = label_samples(records, config.horizon_days);
  } catch (...) {
    rethrow_with_stage("label");
  }
  for (int id : config.sets) {
    const auto spec = FeatureSetSpec::table_row(id);
    Dataset data;
    try {
      data = build_dataset(records, labels, spec, result.extraction.table);
    } catch (...) {
      rethrow_with_stage("assemble set " + std::to_string(id));
    }
    try {
      result.sets.push_back(evaluate_set(data, config, config.output_dir / ("set-" + std::to_string(id))));
    } catch (...) {
      rethrow_with_stage("evaluate set " + std::to_string(id));
    }
  }

  std::string csv = comment_line(cfg) +
                    csv_row({"set", "sources", "n_samples", "n_hrm", "n_features", "mean_auc", "std_auc", "pooled_auc"});
  for (const auto& s : result.sets) {
    csv += csv_row({std::to_string(s.spec.id), s.spec.describe(), std::to_string(s.n_samples), std::to_string(s.n_hrm),
                    std::to_string(s.n_features), format_double(s.cv.mean_auc), format_double(s.cv.std_auc),
                    format_double(s.cv.pooled_auc)});
  }
  write_text(config.output_dir / "table1.csv", csv);
  write_text(config.output_dir / "table1.txt", comment_line(cfg) + render_table1(result.sets));
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  CohortManifest m;
  try {
    m = read_manifest(config.manifest);
  } catch (...) {
    rethrow_with_stage("manifest");
  }
  const FileImageStore store(m.base_dir);
  return run_pipeline(config, m.records, store);
}

}  // namespace bmrisk
