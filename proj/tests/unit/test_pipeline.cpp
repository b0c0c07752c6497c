#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "bmrisk/cross_validation.hpp"
#include "bmrisk/csv.hpp"
#include "bmrisk/error.hpp"
#include "bmrisk/pipeline.hpp"
#include "bmrisk/rng.hpp"
#include "bmrisk/selection.hpp"
#include "bmrisk/synth.hpp"
#include "doctest.h"
#include "oracles/temp_dir.hpp"

using namespace bmrisk;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  SynthCohort cohort;
  FeatureTable table;
  LabelingResult labels;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    SynthConfig cfg;
    cfg.seed = 9;
    cfg.n_lesions = 40;
    cfg.prevalence = 0.1;
    cfg.planning_ct_fraction = 0.8;
    Fixture out{synth_cohort(cfg), {}, {}};
    const auto res = extract_features(image_jobs(out.cohort.records), out.cohort.images, {16, "none"}, {}, nullptr, 1,
                                      false);
    REQUIRE(res.failures.empty());
    out.table = res.table;
    out.labels = label_samples(out.cohort.records, cfg.horizon_days);
    return out;
  }();
  return f;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = read_text(e.path());
  }
  return files;
}

}  // namespace

TEST_CASE("feature table CSV round trip and reuse") {
  const auto& f = fixture();
  CHECK(f.table.roster.size() == 98);
  CHECK(f.table.rows.size() == image_jobs(f.cohort.records).size());
  const auto csv = feature_table_to_csv(f.table, "{\"k\":1}");
  CHECK(csv.rfind("# ", 0) == 0);
  const auto back = feature_table_from_csv(csv);
  CHECK(back.roster == f.table.roster);
  REQUIRE(back.rows.size() == f.table.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].image_id == f.table.rows[i].image_id);
    CHECK(back.rows[i].fingerprint == f.table.rows[i].fingerprint);
    CHECK(back.rows[i].features == f.table.rows[i].features);
  }
  CHECK(feature_table_to_csv(back, "{\"k\":1}") == csv);

  const auto jobs = image_jobs(f.cohort.records);
  const auto again = extract_features(jobs, f.cohort.images, {16, "none"}, {}, &back, 2, false);
  CHECK(again.extracted == 0);
  CHECK(again.reused == jobs.size());
  const auto forced = extract_features(jobs, f.cohort.images, {16, "none"}, {}, &back, 2, true);
  CHECK(forced.extracted == jobs.size());
  CHECK(feature_table_to_csv(forced.table, "{}") == feature_table_to_csv(f.table, "{}"));
  // a different bin count invalidates every cached row
  const auto rebinned = extract_features(jobs, f.cohort.images, {8, "none"}, {}, &back, 1, false);
  CHECK(rebinned.reused == 0);
}

TEST_CASE("dataset assembly per set") {
  const auto& f = fixture();
  std::size_t without_ct = 0;
  for (const auto& r : f.cohort.records) without_ct += !r.planning_ct;
  REQUIRE(without_ct > 0);
  for (int id = 1; id <= 7; ++id) {
    if (id == 7) {
      CHECK_THROWS_AS(build_dataset(f.cohort.records, f.labels, FeatureSetSpec::table_row(7), f.table), ConfigError);
      continue;
    }
    const auto d = build_dataset(f.cohort.records, f.labels, FeatureSetSpec::table_row(id), f.table);
    CHECK(d.x.rows() == d.samples.size());
    CHECK(d.y.size() == d.samples.size());
    CHECK(d.x_km_only.rows() == d.km_only.size());
    CHECK(d.x.names() == assembly_columns(FeatureSetSpec::table_row(id), f.table.roster));
    if (id >= 5) {
      CHECK(d.excluded_lesions.size() == without_ct);
      CHECK(d.samples.size() < f.labels.samples.size());
    } else {
      CHECK(d.excluded_lesions.empty());
      CHECK(d.samples.size() == f.labels.samples.size());
    }
  }
  CHECK(build_dataset(f.cohort.records, f.labels, FeatureSetSpec::table_row(1), f.table).x.cols() == 12);
  CHECK(build_dataset(f.cohort.records, f.labels, FeatureSetSpec::table_row(6), f.table).x.cols() == 12 + 4 * 98);
}

TEST_CASE("lesion-grouped splits never straddle and keep both classes") {
  const auto& f = fixture();
  const auto d = build_dataset(f.cohort.records, f.labels, FeatureSetSpec::table_row(2), f.table);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = split_lesions(d, 1.0 / 3.0, seed, 100);
    std::set<std::string> train_l, test_l;
    for (auto i : s.train) train_l.insert(d.samples[i].lesion_id);
    for (auto i : s.test) test_l.insert(d.samples[i].lesion_id);
    for (auto i : s.test_km_only) test_l.insert(d.km_only[i].lesion_id);
    for (const auto& l : test_l) CHECK(train_l.count(l) == 0);
    CHECK(s.train.size() + s.test.size() == d.samples.size());
    auto has = [&](const std::vector<std::size_t>& idx, int label) {
      return std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return d.y[i] == label; });
    };
    CHECK(has(s.train, 1));
    CHECK(has(s.train, 0));
    CHECK(has(s.test, 1));
    CHECK(has(s.test, 0));
    const auto again = split_lesions(d, 1.0 / 3.0, seed, 100);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);
  }
  CHECK_THROWS_AS(split_lesions(d, 0.0, 1, 100), ConfigError);
  CHECK_THROWS_AS(split_lesions(d, 1.0, 1, 100), ConfigError);
}

TEST_CASE("cross-validation is deterministic and independent of the thread count") {
  const auto& f = fixture();
  const auto d = build_dataset(f.cohort.records, f.labels, FeatureSetSpec::table_row(6), f.table);
  CvConfig cfg;
  cfg.repeats = 6;
  cfg.seed = 17;
  const auto a = monte_carlo_cv(d, cfg);
  cfg.threads = 3;
  const auto b = monte_carlo_cv(d, cfg);
  REQUIRE(a.repeats.size() == 6);
  CHECK(a.mean_auc == b.mean_auc);
  CHECK(a.pooled_auc == b.pooled_auc);
  CHECK(a.oof_scores == b.oof_scores);
  CHECK(a.km_only_scores == b.km_only_scores);
  CHECK(a.selection_counts == b.selection_counts);
  CHECK(a.max_straddling == 0);
  double mean = 0;
  for (std::size_t r = 0; r < a.repeats.size(); ++r) {
    CHECK(a.repeats[r].index == static_cast<int>(r));
    CHECK(a.repeats[r].seed == derive_seed(17, r));
    CHECK(a.repeats[r].auc == b.repeats[r].auc);
    CHECK(a.repeats[r].straddling_lesions == 0);
    CHECK(a.repeats[r].n_selected <= mrmr_cap(a.repeats[r].n_train));
    mean += a.repeats[r].auc;
  }
  CHECK(a.mean_auc == doctest::Approx(mean / 6));
  const auto& c = a.pooled_confusion;
  std::size_t tested = 0;
  for (const auto& r : a.repeats) tested += r.n_test;
  CHECK(c.tp + c.fn + c.tn + c.fp == tested);

  cfg.repeats = 0;
  CHECK_THROWS_AS(monte_carlo_cv(d, cfg), ConfigError);
}

TEST_CASE("pipeline bundle: layout, embedded config and byte reproducibility") {
  const auto& f = fixture();
  testutil::TempDir a("pipe-a"), b("pipe-b");
  PipelineConfig cfg;
  cfg.manifest = "cohort/manifest.json";
  cfg.sets = {1, 3};
  cfg.extraction = {16, "none"};
  cfg.cv.repeats = 4;
  cfg.cv.seed = 2;
  cfg.output_dir = a.path();
  const auto ra = run_pipeline(cfg, f.cohort.records, f.cohort.images);
  cfg.output_dir = b.path();
  cfg.cv.threads = 2;
  const auto rb = run_pipeline(cfg, f.cohort.records, f.cohort.images);
  REQUIRE(ra.sets.size() == 2);
  CHECK(ra.sets[0].cv.mean_auc == rb.sets[0].cv.mean_auc);

  const auto ta = read_tree(a.path()), tb = read_tree(b.path());
  CHECK(ta == tb);
  for (const char* name : {"table1.csv", "table1.txt", "features.csv", "set-1/cv_report.json", "set-1/km.svg",
                           "set-1/km.csv", "set-1/roc.svg", "set-1/risk_split.json", "set-1/risk_split.txt",
                           "set-1/predictions.csv", "set-1/correlations.csv", "set-1/table2.txt", "set-3/cv_report.json"}) {
    const std::string file = name;
    REQUIRE_MESSAGE(ta.count(file) == 1, file);
    const auto& text = ta.at(file);
    const bool has_seed = text.find("\"seed\":2") != std::string::npos || text.find("\"seed\": 2") != std::string::npos;
    CHECK_MESSAGE(has_seed, file);
    CHECK_MESSAGE(text.find("threads") == std::string::npos, file);
  }
  const auto t1 = ta.at("table1.txt");
  CHECK(t1.find("Clinical data") != std::string::npos);
  CHECK(t1.find("Delta-radiomic features") != std::string::npos);
  CHECK(t1.find("AUC score") != std::string::npos);
  CHECK(t1.find("Set 1") != std::string::npos);
  CHECK(t1.find("Set 3") != std::string::npos);

  const auto t2 = ta.at("set-3/table2.txt");
  CHECK(t2.find("Delta-mr") != std::string::npos);
  CHECK(t2.find("clinical") != std::string::npos);

  cfg.sets = {};
  CHECK_THROWS_AS(run_pipeline(cfg, f.cohort.records, f.cohort.images), ConfigError);
  cfg.sets = {8};
  CHECK_THROWS_AS(run_pipeline(cfg, f.cohort.records, f.cohort.images), ConfigError);
}

TEST_CASE("column blocks and config JSON") {
  CHECK(column_block("clinical-Age") == "clinical");
  CHECK(column_block("follow-up-mr-original-shape-VoxelVolume") == "follow-up-mr");
  CHECK(column_block("Delta-mr-original-shape-VoxelVolume") == "Delta-mr");
  CHECK(column_block("planning-mr-x") == "planning-mr");
  CHECK(column_block("planning-ct-x") == "planning-ct");
  PipelineConfig c;
  c.manifest = "m.json";
  c.output_dir = "/somewhere";
  const auto j1 = config_json(c);
  c.output_dir = "/elsewhere";
  c.cv.threads = 8;
  CHECK(config_json(c) == j1);
  c.cv.seed = 5;
  CHECK(config_json(c) != j1);
  CHECK(c.features_path() == fs::path("/elsewhere/features.csv"));
}

TEST_CASE("a cohort without planted signal gives chance-level AUC") {
  SynthConfig sc;
  sc.seed = 21;
  sc.effect = 0;
  const auto cohort = synth_cohort(sc);
  const auto res = extract_features(image_jobs(cohort.records), cohort.images, {32, "none"}, {}, nullptr, 1, false);
  REQUIRE(res.failures.empty());
  const auto labels = label_samples(cohort.records, sc.horizon_days);
  const auto d = build_dataset(cohort.records, labels, FeatureSetSpec::table_row(6), res.table);
  CvConfig cfg;
  cfg.repeats = 100;
  cfg.seed = 5;
  const auto cv = monte_carlo_cv(d, cfg);
  CHECK(cv.mean_auc >= 0.4);
  CHECK(cv.mean_auc <= 0.6);
  CHECK(cv.max_straddling == 0);
}
