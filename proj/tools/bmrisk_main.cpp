#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmrisk/classifier.hpp"
#include "bmrisk/cohort.hpp"
#include "bmrisk/csv.hpp"
#include "bmrisk/error.hpp"
#include "bmrisk/manifest.hpp"
#include "bmrisk/pipeline.hpp"
#include "bmrisk/report.hpp"
#include "bmrisk/roc.hpp"
#include "bmrisk/selection.hpp"
#include "bmrisk/survival.hpp"
#include "bmrisk/svg.hpp"
#include "bmrisk/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bmrisk;

namespace {

/// "7", "1..7", "1,3,5" or a mix such as "1..3,7".
std::vector<int> parse_sets(const std::vector<std::string>& specs) {
  std::set<int> ids;
  for (const auto& spec : specs) {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      int lo = 0, hi = 0;
      try {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
          lo = hi = std::stoi(part);
        } else {
          lo = std::stoi(part.substr(0, dots));
          hi = std::stoi(part.substr(dots + 2));
        }
      } catch (const std::exception&) {
        throw ConfigError("invalid --set value '" + part + "'");
      }
      if (lo < 1 || hi > 7 || lo > hi) throw ConfigError("feature sets are numbered 1..7, got '" + part + "'");
      for (int i = lo; i <= hi; ++i) ids.insert(i);
    }
  }
  if (ids.empty()) throw ConfigError("no feature set given");
  return {ids.begin(), ids.end()};
}

fs::path default_output_dir() {
  if (const char* env = std::getenv("BMRISK_OUTPUT_DIR"); env && *env) return env;
  return "bmrisk-out";
}

struct Options {
  int threads = 1;
  fs::path output;
  fs::path manifest;
  fs::path features;
  std::vector<std::string> sets{"7"};
  int bins = 32;
  std::string wavelet = "haar";
  bool no_white_stripe = false;
  bool no_mr_zscore = false;
  bool ct_zscore = false;
  int horizon = 100;
  bool force = false;
  std::uint64_t seed = 0;
  int repeats = 100;
  double test_fraction = 1.0 / 3.0;
  bool global_selection = false;
  std::size_t cap = 0;
  double C = 1.0;
  double s = 2.0;
  double theta = 0.0;
  int max_epochs = 1000;
};

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig c;
  c.manifest = o.manifest;
  c.features = o.features;
  c.output_dir = o.output;
  c.sets = parse_sets(o.sets);
  c.extraction = {o.bins, o.wavelet};
  c.normalization = {!o.no_mr_zscore, !o.no_white_stripe, o.ct_zscore};
  c.horizon_days = o.horizon;
  c.force = o.force;
  c.cv.repeats = o.repeats;
  c.cv.test_fraction = o.test_fraction;
  c.cv.seed = o.seed;
  c.cv.global_selection = o.global_selection;
  c.cv.selection_cap = o.cap;
  c.cv.threads = o.threads;
  c.cv.classifier.C = o.C;
  c.cv.classifier.sensitivity_weight = o.s;
  c.cv.classifier.theta = o.theta;
  c.cv.classifier.seed = o.seed;
  c.cv.classifier.max_epochs = o.max_epochs;
  if (o.bins < 2) throw ConfigError("--bins must be at least 2");
  if (o.threads < 1) throw ConfigError("--threads must be at least 1");
  if (!fs::exists(c.manifest)) throw ConfigError("manifest not found: " + c.manifest.string());
  return c;
}

void add_manifest(CLI::App* cmd, Options& o) {
  cmd->add_option("-m,--manifest", o.manifest, "Cohort manifest (JSON)")->required();
}

void add_extraction(CLI::App* cmd, Options& o) {
  cmd->add_option("--features", o.features, "Feature CSV (default <output>/features.csv)");
  cmd->add_option("--bins", o.bins, "Gray-level bin count");
  cmd->add_option("--wavelet", o.wavelet, "Wavelet bank")->check(CLI::IsMember({"none", "haar", "coif1"}));
  cmd->add_flag("--no-white-stripe", o.no_white_stripe, "Skip white-stripe normalization of MR volumes");
  cmd->add_flag("--no-mr-zscore", o.no_mr_zscore, "Skip z-scoring of MR volumes");
  cmd->add_flag("--ct-zscore", o.ct_zscore, "Z-score CT volumes");
  cmd->add_flag("--force", o.force, "Re-extract every image");
}

void add_set(CLI::App* cmd, Options& o, bool many) {
  cmd->add_option("--set", o.sets, many ? "Feature sets: 7, 1..7 or 1,3,7" : "Feature set 1..7");
  cmd->add_option("--horizon", o.horizon, "HRM horizon in days");
}

void add_model(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Seed for splits and training");
  cmd->add_option("--C", o.C, "Soft-margin penalty");
  cmd->add_option("--s", o.s, "Sensitivity weight on the HRM class");
  cmd->add_option("--theta", o.theta, "Decision threshold");
  cmd->add_option("--max-epochs", o.max_epochs, "Solver budget in passes over the data");
  cmd->add_option("--cap", o.cap, "Selected-feature cap (0 = one per ten samples)");
}

/// Dataset for one set built from the manifest and an (auto-extracted) feature table.
Dataset load_dataset(const PipelineConfig& c, std::vector<MetastasisRecord>& records) {
  const auto m = read_manifest(c.manifest);
  records = m.records;
  const FileImageStore store(m.base_dir);
  ExtractionResult ex;
  try {
    ex = run_extraction(c, records, store);
  } catch (...) {
    rethrow_with_stage("extract");
  }
  if (!ex.failures.empty()) throw DataError("[extract] " + ex.failures.front().image_id + ": " + ex.failures.front().message);
  const auto labels = label_samples(records, c.horizon_days);
  if (c.sets.size() != 1) throw ConfigError("this command takes a single --set");
  return build_dataset(records, labels, FeatureSetSpec::table_row(c.sets.front()), ex.table);
}

std::string config_comment(const PipelineConfig& c) { return "# config " + config_json(c) + "\n"; }

int cmd_synth(const SynthConfig& s, const fs::path& out) {
  const auto cohort = synth_cohort(s);
  write_synth_cohort(cohort, out);
  std::size_t followups = 0;
  for (const auto& r : cohort.records) followups += r.followups.size();
  std::cout << "wrote " << cohort.records.size() << " lesions, " << followups << " follow-ups to " << out.string() << "\n";
  return 0;
}

int cmd_extract(const Options& o) {
  auto c = pipeline_config(o);
  const auto m = read_manifest(c.manifest);
  const FileImageStore store(m.base_dir);
  fs::create_directories(c.output_dir);
  if (!c.features.empty() && c.features.has_parent_path()) fs::create_directories(c.features.parent_path());
  const auto res = run_extraction(c, m.records, store);
  json sidecar = json::parse(config_json(c));
  sidecar["roster_size"] = res.table.roster.size();
  sidecar["images"] = res.table.rows.size();
  write_text(fs::path(c.features_path().string() + ".json"), sidecar.dump(2) + "\n");
  for (const auto& f : res.failures) std::cerr << "extract: " << f.image_id << ": " << f.message << "\n";
  std::cout << "extracted " << res.extracted << ", reused " << res.reused << ", failed " << res.failures.size()
            << " -> " << c.features_path().string() << "\n";
  return res.failures.empty() ? 0 : static_cast<int>(ExitCode::kDataError);
}

int cmd_select(const Options& o) {
  auto c = pipeline_config(o);
  std::vector<MetastasisRecord> records;
  const auto data = load_dataset(c, records);
  std::vector<double> y(data.y.begin(), data.y.end());
  const std::size_t k = c.cv.selection_cap ? c.cv.selection_cap : mrmr_cap(data.samples.size());
  const auto sel = mrmr_select(data.x, y, k);
  json trace = json::array();
  for (const auto& t : sel.trace) {
    trace.push_back({{"name", t.name}, {"relevance", t.relevance}, {"redundancy", t.redundancy}, {"score", t.score}});
  }
  const json out = {{"config", json::parse(config_json(c))}, {"cap", sel.cap}, {"selected", sel.selected}, {"trace", trace}};
  fs::create_directories(c.output_dir);
  write_text(c.output_dir / "selection.json", out.dump(2) + "\n");
  const auto rep = correlation_report(data.x, y);
  std::string csv = config_comment(c) + csv_row({"block", "rank", "feature", "r", "degenerate"});
  std::map<std::string, int> rank;
  for (const auto& e : rep.ranked) {
    const auto block = column_block(e.name);
    csv += csv_row({block, std::to_string(++rank[block]), e.name, format_double(e.r), e.degenerate ? "1" : "0"});
  }
  write_text(c.output_dir / "correlations.csv", csv);
  std::cout << "selected " << sel.selected.size() << " of " << data.x.cols() << " features\n";
  for (const auto& n : sel.selected) std::cout << "  " << n << "\n";
  return 0;
}

int cmd_train(const Options& o, const fs::path& model_path) {
  auto c = pipeline_config(o);
  std::vector<MetastasisRecord> records;
  const auto data = load_dataset(c, records);
  std::vector<double> y(data.y.begin(), data.y.end());
  const std::size_t k = c.cv.selection_cap ? c.cv.selection_cap : mrmr_cap(data.samples.size());
  const auto sel = mrmr_select(data.x, y, k);
  const auto fr = fit(data.x.select_columns(sel.selected), data.y, c.cv.classifier);
  const fs::path path = model_path.empty() ? c.output_dir / "model.json" : model_path;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, model_to_json(fr.model));
  std::cout << "trained on " << data.samples.size() << " samples (" << data.positives() << " HRM), "
            << sel.selected.size() << " features, " << fr.iterations << " iterations"
            << (fr.converged ? "" : " (budget exhausted)") << " -> " << path.string() << "\n";
  return 0;
}

int cmd_evaluate(const Options& o, const fs::path& model_path) {
  auto c = pipeline_config(o);
  if (!fs::exists(model_path)) throw ConfigError("model not found: " + model_path.string());
  const auto model = model_from_json(read_text(model_path));
  std::vector<MetastasisRecord> records;
  const auto data = load_dataset(c, records);
  const auto scores = decision_scores(model, data.x);
  const auto km_scores = data.x_km_only.rows() ? decision_scores(model, data.x_km_only) : std::vector<double>{};
  const auto risk = risk_split_report(predictions_from_scores(data, scores, km_scores, model.theta));
  json meta = json::parse(config_json(c));
  meta["model"] = model_path.filename().string();
  const std::string metadata = meta.dump();
  fs::create_directories(c.output_dir);
  write_text(c.output_dir / "risk_split.txt", config_comment(c) + render_summary(risk));
  write_text(c.output_dir / "risk_split.json", risk_split_json(risk));
  write_text(c.output_dir / "km.csv", config_comment(c) + km_table_csv(risk));
  write_text(c.output_dir / "km.svg", km_svg(risk, metadata));
  if (data.positives() > 0 && data.positives() < data.samples.size()) {
    const auto roc = roc_curve(scores, data.y);
    write_text(c.output_dir / "roc.svg", roc_svg(roc, "Model scores", metadata));
    std::cout << "AUC " << format_double(roc.auc) << "\n";
  }
  std::cout << render_summary(risk);
  return 0;
}

int cmd_km(const fs::path& input, const fs::path& out_dir) {
  if (!fs::exists(input)) throw ConfigError("input not found: " + input.string());
  const auto rows = parse_csv(read_text(input), nullptr);
  if (rows.empty()) throw DataError("km input is empty");
  const auto& head = rows.front();
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < head.size(); ++i) {
      if (head[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto tc = col("time"), ec = col("event"), gc = col("group");
  if (!tc || !ec) throw DataError("km input needs 'time' and 'event' columns");
  std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> groups;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < head.size()) throw DataError("km input row " + std::to_string(r + 1) + " is short");
    double t = 0;
    int e = 0;
    try {
      std::size_t used = 0;
      t = std::stod(row[*tc], &used);
      if (used != row[*tc].size()) throw std::invalid_argument("trailing");
      e = std::stoi(row[*ec]);
    } catch (const std::exception&) {
      throw DataError("km input row " + std::to_string(r + 1) + " is not numeric");
    }
    if (e != 0 && e != 1) throw DataError("km input row " + std::to_string(r + 1) + ": event must be 0 or 1");
    auto& g = groups[gc ? row[*gc] : "all"];
    g.first.push_back(t);
    g.second.push_back(e);
  }
  std::string csv = csv_row({"group", "time", "at_risk", "events", "censored", "survival", "lower", "upper"});
  PlotSpec plot;
  plot.title = "Kaplan-Meier estimate";
  plot.x_label = "time";
  plot.y_label = "survival";
  plot.y_max = 1.0;
  plot.x_max = 1.0;
  const char* colors[] = {"#2e8b57", "#c0392b", "#1f77b4", "#ff7f0e", "#9467bd"};
  std::size_t gi = 0;
  for (const auto& [name, g] : groups) {
    const auto curve = kaplan_meier(g.first, g.second);
    PlotSeries s;
    s.label = name;
    s.color = colors[gi++ % 5];
    s.step = true;
    for (const auto& st : curve.steps) {
      csv += csv_row({name, format_double(st.time), std::to_string(st.at_risk), std::to_string(st.events),
                      std::to_string(st.censored), format_double(st.survival), format_double(st.lower),
                      format_double(st.upper)});
      s.points.push_back({st.time, st.survival});
      s.band_lower.push_back({st.time, st.lower});
      s.band_upper.push_back({st.time, st.upper});
      if (st.censored) s.ticks.push_back({st.time, st.survival});
      plot.x_max = std::max(plot.x_max, st.time);
    }
    std::cout << name << ": n=" << curve.n << ", median " << (curve.median ? format_double(*curve.median) : "not reached")
              << "\n";
    plot.series.push_back(std::move(s));
  }
  if (groups.size() == 2) {
    const auto& a = groups.begin()->second;
    const auto& b = std::next(groups.begin())->second;
    const auto lr = log_rank(a.first, a.second, b.first, b.second);
    std::cout << "log-rank chi2 " << format_double(lr.chi2) << ", " << format_p(lr.p) << "\n";
    plot.title += " (" + format_p(lr.p) + ")";
  }
  fs::create_directories(out_dir);
  write_text(out_dir / "km.csv", csv);
  write_text(out_dir / "km.svg", render_plot(plot));
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Brain-metastasis progression risk from longitudinal radiomics"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file");
  Options o;
  o.output = default_output_dir();
  app.add_option("-o,--output", o.output, "Output directory (default $BMRISK_OUTPUT_DIR or ./bmrisk-out)");
  app.add_option("-j,--threads", o.threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);

  SynthConfig sc;
  fs::path synth_out;
  std::string synth_format = "nifti";
  auto* synth = app.add_subcommand("synth", "Write a synthetic cohort with a planted imaging signal");
  synth->add_option("dir", synth_out, "Destination directory")->required();
  synth->add_option("--seed", sc.seed, "Generator seed");
  synth->add_option("--lesions", sc.n_lesions, "Number of lesions");
  synth->add_option("--prevalence", sc.prevalence, "Target HRM fraction of follow-ups");
  synth->add_option("--effect", sc.effect, "Planted signal strength (0 = null cohort)");
  synth->add_option("--horizon", sc.horizon_days, "HRM horizon in days");
  synth->add_option("--ct-fraction", sc.planning_ct_fraction, "Fraction of lesions with a planning CT");
  synth->add_option("--format", synth_format, "Volume format")->check(CLI::IsMember({"nifti", "rawjson"}));

  auto* extract = app.add_subcommand("extract", "Extract radiomic features for every image in a manifest");
  add_manifest(extract, o);
  add_extraction(extract, o);

  auto* select = app.add_subcommand("select", "MRMR selection and correlation ranking on one feature set");
  add_manifest(select, o);
  add_extraction(select, o);
  add_set(select, o, false);
  select->add_option("--cap", o.cap, "Selected-feature cap (0 = one per ten samples)");

  fs::path model_path;
  auto* train = app.add_subcommand("train", "Select features and fit the classifier on all samples");
  add_manifest(train, o);
  add_extraction(train, o);
  add_set(train, o, false);
  add_model(train, o);
  train->add_option("--model", model_path, "Model output (default <output>/model.json)");

  auto* evaluate = app.add_subcommand("evaluate", "Score a cohort with a trained model; risk split and ROC");
  add_manifest(evaluate, o);
  add_extraction(evaluate, o);
  add_set(evaluate, o, false);
  evaluate->add_option("--model", model_path, "Trained model JSON")->required();

  fs::path km_input;
  auto* km = app.add_subcommand("km", "Kaplan-Meier curves and log-rank test from a CSV of time,event[,group]");
  km->add_option("input", km_input, "CSV with header time,event[,group]")->required();

  auto* run = app.add_subcommand("run", "Extract, cross-validate and report one or more feature sets");
  add_manifest(run, o);
  add_extraction(run, o);
  add_set(run, o, true);
  add_model(run, o);
  run->add_option("--repeats", o.repeats, "Cross-validation repeats")->check(CLI::PositiveNumber);
  run->add_option("--test-fraction", o.test_fraction, "Fraction of lesions held out per repeat")
      ->check(CLI::Range(0.0, 1.0));
  run->add_flag("--global-selection", o.global_selection, "Select features once on all samples (leaks labels)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kConfigError);
  }

  if (*synth) {
    sc.format = synth_format == "nifti" ? VolumeFormat::Nifti1 : VolumeFormat::RawJson;
    return cmd_synth(sc, synth_out);
  }
  if (*extract) return cmd_extract(o);
  if (*select) return cmd_select(o);
  if (*train) return cmd_train(o, model_path);
  if (*evaluate) return cmd_evaluate(o, model_path);
  if (*km) return cmd_km(km_input, o.output);
  const auto result = run_pipeline(pipeline_config(o));
  std::cout << render_table1(result.sets);
  for (const auto& s : result.sets) {
    std::cout << "\nSet " << s.spec.id << ": " << s.n_samples << " samples, " << s.n_hrm << " HRM, " << s.n_features
              << " features\n"
              << render_summary(s.risk);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfigError);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kDataError);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kNumericalFailure);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
