#include "bmrisk/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "bmrisk/error.hpp"
#include "bmrisk/parallel.hpp"
#include "bmrisk/rng.hpp"
#include "bmrisk/roc.hpp"

namespace bmrisk {

std::size_t Dataset::positives() const {
  std::size_t n = 0;
  for (int v : y) n += static_cast<std::size_t>(v);
  return n;
}

namespace {

struct LesionIndex {
  std::vector<std::string> ids;               // first-appearance order
  std::vector<bool> ever_hrm;
  std::vector<std::vector<std::size_t>> samples;
  std::vector<std::vector<std::size_t>> km_only;
};

LesionIndex index_lesions(const Dataset& d) {
  LesionIndex li;
  std::unordered_map<std::string, std::size_t> slot;
  auto get = [&](const std::string& id) {
    auto [it, fresh] = slot.emplace(id, li.ids.size());
    if (fresh) {
      li.ids.push_back(id);
      li.ever_hrm.push_back(false);
      li.samples.emplace_back();
      li.km_only.emplace_back();
    }
    return it->second;
  };
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const auto s = get(d.samples[i].lesion_id);
    li.samples[s].push_back(i);
    if (d.y[i] == 1) li.ever_hrm[s] = true;
  }
  for (std::size_t i = 0; i < d.km_only.size(); ++i) li.km_only[get(d.km_only[i].lesion_id)].push_back(i);
  return li;
}

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

LesionSplit split_lesions(const Dataset& data, double test_fraction, std::uint64_t seed, int max_retries) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must be in (0, 1)");
  if (data.y.size() != data.samples.size()) throw DataError("dataset labels and samples differ in length");
  const auto li = index_lesions(data);
  std::vector<std::size_t> strata[2];
  for (std::size_t l = 0; l < li.ids.size(); ++l) strata[li.ever_hrm[l] ? 1 : 0].push_back(l);
  if (strata[1].size() < 2 || strata[0].size() < 2) {
    throw DataError("cross-validation needs at least 2 lesions with and 2 without an HRM sample");
  }
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<bool> in_test(li.ids.size(), false);
    for (auto& stratum : strata) {
      std::vector<std::size_t> order = stratum;
      rng.shuffle(std::span<std::size_t>(order));
      const auto size = static_cast<long>(order.size());
      const long n_test = std::clamp<long>(std::lround(test_fraction * static_cast<double>(size)), 1, size - 1);
      for (long k = 0; k < n_test; ++k) in_test[order[static_cast<std::size_t>(k)]] = true;
    }
    LesionSplit split;
    split.retries = attempt;
    for (std::size_t l = 0; l < li.ids.size(); ++l) {
      auto& dst = in_test[l] ? split.test : split.train;
      dst.insert(dst.end(), li.samples[l].begin(), li.samples[l].end());
      if (in_test[l]) split.test_km_only.insert(split.test_km_only.end(), li.km_only[l].begin(), li.km_only[l].end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    std::sort(split.test_km_only.begin(), split.test_km_only.end());
    auto both = [&](const std::vector<std::size_t>& idx) {
      bool pos = false, neg = false;
      for (auto i : idx) (data.y[i] ? pos : neg) = true;
      return pos && neg;
    };
    if (both(split.train) && both(split.test)) return split;
  }
  throw DataError("could not draw a split with both classes on both sides after " + std::to_string(max_retries) +
                  " retries");
}

CvReport monte_carlo_cv(const Dataset& data, const CvConfig& cfg) {
  if (cfg.repeats < 1) throw ConfigError("cross-validation needs at least one repeat");
  if (data.samples.empty()) throw DataError("cross-validation on an empty dataset");

  std::optional<SelectionResult> global;
  if (cfg.global_selection) {
    const std::size_t cap = cfg.selection_cap ? cfg.selection_cap : mrmr_cap(data.samples.size());
    global = mrmr_select(data.x, as_double(data.y), cap);
  }

  struct Outcome {
    CvRepeat info;
    std::vector<std::pair<std::size_t, double>> test_scores;
    std::vector<std::pair<std::size_t, double>> km_scores;
    std::vector<std::string> selected;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(cfg.repeats));

  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t r) {
    Outcome& o = outcomes[r];
    o.info.index = static_cast<int>(r);
    o.info.seed = derive_seed(cfg.seed, r);
    const auto split = split_lesions(data, cfg.test_fraction, o.info.seed, cfg.max_split_retries);
    o.info.retries = split.retries;
    o.info.n_train = split.train.size();
    o.info.n_test = split.test.size();

    std::unordered_set<std::string> train_lesions;
    for (auto i : split.train) train_lesions.insert(data.samples[i].lesion_id);
    std::unordered_set<std::string> straddle;
    for (auto i : split.test)
      if (train_lesions.count(data.samples[i].lesion_id)) straddle.insert(data.samples[i].lesion_id);
    for (auto i : split.test_km_only)
      if (train_lesions.count(data.km_only[i].lesion_id)) straddle.insert(data.km_only[i].lesion_id);
    o.info.straddling_lesions = straddle.size();

    const FeatureMatrix x_train = data.x.select_rows(split.train);
    std::vector<int> y_train;
    for (auto i : split.train) y_train.push_back(data.y[i]);
    if (global) {
      o.selected = global->selected;
    } else {
      const std::size_t cap = cfg.selection_cap ? cfg.selection_cap : mrmr_cap(split.train.size());
      o.selected = mrmr_select(x_train, as_double(y_train), cap).selected;
    }
    o.info.n_selected = o.selected.size();
    ClassifierConfig cc = cfg.classifier;
    cc.seed = o.info.seed;
    const auto fitted = fit(x_train.select_columns(o.selected), y_train, cc);

    const auto test_scores = decision_scores(fitted.model, data.x.select_rows(split.test));
    std::vector<int> y_test;
    for (auto i : split.test) y_test.push_back(data.y[i]);
    o.info.auc = auc(test_scores, y_test);
    for (std::size_t k = 0; k < split.test.size(); ++k) o.test_scores.emplace_back(split.test[k], test_scores[k]);
    if (!split.test_km_only.empty()) {
      const auto km = decision_scores(fitted.model, data.x_km_only.select_rows(split.test_km_only));
      for (std::size_t k = 0; k < km.size(); ++k) o.km_scores.emplace_back(split.test_km_only[k], km[k]);
    }
  });

  CvReport rep;
  std::vector<double> sum(data.samples.size(), 0.0), km_sum(data.km_only.size(), 0.0);
  std::vector<int> cnt(data.samples.size(), 0), km_cnt(data.km_only.size(), 0);
  std::vector<double> pooled_scores;
  std::vector<int> pooled_labels;
  std::map<std::string, int> counts;
  double auc_sum = 0.0;
  for (auto& o : outcomes) {
    rep.repeats.push_back(o.info);
    auc_sum += o.info.auc;
    rep.max_straddling = std::max(rep.max_straddling, o.info.straddling_lesions);
    for (const auto& [i, s] : o.test_scores) {
      sum[i] += s;
      cnt[i] += 1;
      pooled_scores.push_back(s);
      pooled_labels.push_back(data.y[i]);
      const bool hrm_pred = s >= cfg.classifier.theta;
      if (data.y[i] == 1) (hrm_pred ? rep.pooled_confusion.tp : rep.pooled_confusion.fn) += 1;
      else (hrm_pred ? rep.pooled_confusion.fp : rep.pooled_confusion.tn) += 1;
    }
    for (const auto& [i, s] : o.km_scores) {
      km_sum[i] += s;
      km_cnt[i] += 1;
    }
    for (const auto& name : o.selected) counts[name] += 1;
  }
  const double n_rep = static_cast<double>(outcomes.size());
  rep.mean_auc = auc_sum / n_rep;
  double var = 0.0;
  for (const auto& r : rep.repeats) var += (r.auc - rep.mean_auc) * (r.auc - rep.mean_auc);
  rep.std_auc = std::sqrt(var / n_rep);
  rep.pooled_auc = auc(pooled_scores, pooled_labels);
  rep.oof_scores.resize(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i)
    if (cnt[i]) rep.oof_scores[i] = sum[i] / cnt[i];
  rep.km_only_scores.resize(km_sum.size());
  for (std::size_t i = 0; i < km_sum.size(); ++i)
    if (km_cnt[i]) rep.km_only_scores[i] = km_sum[i] / km_cnt[i];
  rep.selection_counts.assign(counts.begin(), counts.end());
  std::stable_sort(rep.selection_counts.begin(), rep.selection_counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return rep;
}

}  // namespace bmrisk
