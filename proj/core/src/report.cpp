#include "bmrisk/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "bmrisk/csv.hpp"
#include "bmrisk/error.hpp"
#include "bmrisk/svg.hpp"
#include "json.hpp"

namespace bmrisk {

namespace {

using nlohmann::json;

GroupSummary summarize(const std::vector<const RiskPrediction*>& members) {
  GroupSummary g;
  g.n = members.size();
  std::vector<double> t;
  std::vector<int> e;
  for (const auto* p : members) {
    t.push_back(p->time_days);
    e.push_back(p->event ? 1 : 0);
    g.events += p->event ? 1 : 0;
  }
  g.curve = kaplan_meier(t, e);
  return g;
}

void split(const std::vector<const RiskPrediction*>& members, std::vector<double>& t, std::vector<int>& e) {
  for (const auto* p : members) {
    t.push_back(p->time_days);
    e.push_back(p->event ? 1 : 0);
  }
}

json group_json(const GroupSummary& g) {
  return {{"n", g.n},
          {"events", g.events},
          {"median_days", g.curve.median ? json(*g.curve.median) : json(nullptr)},
          {"median", format_months(g.curve.median)}};
}

PlotSeries km_series(const GroupSummary& g, const std::string& label, const std::string& color, bool dashed) {
  PlotSeries s;
  s.label = label + " (n=" + std::to_string(g.n) + ")";
  s.color = color;
  s.step = true;
  s.dashed = dashed;
  for (const auto& st : g.curve.steps) {
    s.points.emplace_back(st.time, st.survival);
    s.band_lower.emplace_back(st.time, st.lower);
    s.band_upper.emplace_back(st.time, st.upper);
    if (st.censored > 0) s.ticks.emplace_back(st.time, st.survival);
  }
  if (dashed) {
    s.band_lower.clear();
    s.band_upper.clear();
  }
  return s;
}

}  // namespace

RiskSplitReport risk_split_report(const std::vector<RiskPrediction>& predictions) {
  if (predictions.empty()) throw DataError("risk split: no predictions");
  std::vector<const RiskPrediction*> hrm, lrm, all;
  RiskSplitReport r;
  for (const auto& p : predictions) {
    all.push_back(&p);
    (p.predicted_hrm ? hrm : lrm).push_back(&p);
    if (p.true_label) {
      if (*p.true_label == 1) (p.predicted_hrm ? r.confusion.tp : r.confusion.fn) += 1;
      else (p.predicted_hrm ? r.confusion.fp : r.confusion.tn) += 1;
    } else {
      (p.predicted_hrm ? r.censored_predicted_hrm : r.censored_predicted_lrm) += 1;
    }
  }
  r.all = summarize(all);
  if (!hrm.empty()) r.hrm = summarize(hrm);
  if (!lrm.empty()) r.lrm = summarize(lrm);
  if (hrm.empty() || lrm.empty()) {
    r.log_rank_note = std::string("no samples predicted ") + (hrm.empty() ? "HRM" : "LRM");
  } else if (r.all.events == 0) {
    r.log_rank_note = "no events";
  } else {
    std::vector<double> ta, tb;
    std::vector<int> ea, eb;
    split(hrm, ta, ea);
    split(lrm, tb, eb);
    try {
      r.log_rank = log_rank(ta, ea, tb, eb);
    } catch (const NumericalError& e) {
      r.log_rank_note = e.what();
    }
  }
  return r;
}

std::vector<RiskPrediction> predictions_from_cv(const Dataset& data, const CvReport& cv, double theta) {
  std::vector<RiskPrediction> out;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (!cv.oof_scores.at(i)) continue;
    const auto& s = data.samples[i];
    out.push_back({static_cast<double>(s.days_to_event_or_censor), !s.censored, data.y[i], *cv.oof_scores[i] >= theta,
                   *cv.oof_scores[i]});
  }
  for (std::size_t i = 0; i < data.km_only.size(); ++i) {
    if (!cv.km_only_scores.at(i)) continue;
    const auto& s = data.km_only[i];
    out.push_back({static_cast<double>(s.days_to_event_or_censor), !s.censored, std::nullopt,
                   *cv.km_only_scores[i] >= theta, *cv.km_only_scores[i]});
  }
  return out;
}

std::vector<RiskPrediction> predictions_from_scores(const Dataset& data, const std::vector<double>& scores,
                                                    const std::vector<double>& km_only_scores, double theta) {
  if (scores.size() != data.samples.size() || km_only_scores.size() != data.km_only.size()) {
    throw DataError("risk split: score count does not match the dataset");
  }
  std::vector<RiskPrediction> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = data.samples[i];
    out.push_back({static_cast<double>(s.days_to_event_or_censor), !s.censored, data.y[i], scores[i] >= theta, scores[i]});
  }
  for (std::size_t i = 0; i < km_only_scores.size(); ++i) {
    const auto& s = data.km_only[i];
    out.push_back({static_cast<double>(s.days_to_event_or_censor), !s.censored, std::nullopt, km_only_scores[i] >= theta,
                   km_only_scores[i]});
  }
  return out;
}

std::string format_months(std::optional<double> days) {
  if (!days) return "not reached";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f months", *days / kDaysPerMonth);
  return buf;
}

std::string format_p(double p) {
  if (p < 0.001) return "p < 0.001";
  if (p < 0.01) return "p < 0.01";
  char buf[32];
  std::snprintf(buf, sizeof buf, "p = %.3f", p);
  return buf;
}

std::string format_confusion(const Confusion& c) {
  std::ostringstream os;
  os << "TP " << c.tp << " / FN " << c.fn << " of " << (c.tp + c.fn) << " progressing; TN " << c.tn << " / FP " << c.fp
     << " of " << (c.tn + c.fp) << " (excluding censoring)";
  return os.str();
}

std::string render_summary(const RiskSplitReport& r) {
  std::ostringstream os;
  os << "Predicted HRM: n=" << r.hrm.n << ", events=" << r.hrm.events << ", median time to progression "
     << format_months(r.hrm.curve.median) << "\n";
  os << "Predicted LRM: n=" << r.lrm.n << ", events=" << r.lrm.events << ", median time to progression "
     << format_months(r.lrm.curve.median) << "\n";
  os << "Full cohort:   n=" << r.all.n << ", events=" << r.all.events << ", median time to progression "
     << format_months(r.all.curve.median) << "\n";
  if (r.log_rank) {
    char chi[32];
    std::snprintf(chi, sizeof chi, "%.3f", r.log_rank->chi2);
    os << "Log-rank HRM vs LRM: chi2 = " << chi << ", " << format_p(r.log_rank->p) << "\n";
  } else {
    os << "Log-rank HRM vs LRM: unavailable (" << r.log_rank_note << ")\n";
  }
  os << "Confusion: " << format_confusion(r.confusion) << "\n";
  os << "Censored before the horizon: " << r.censored_predicted_hrm << " predicted HRM, " << r.censored_predicted_lrm
     << " predicted LRM\n";
  return os.str();
}

std::string km_table_csv(const RiskSplitReport& r) {
  std::string out = csv_row({"group", "time_days", "at_risk", "events", "censored", "survival", "lower", "upper"});
  auto emit = [&](const char* name, const GroupSummary& g) {
    for (const auto& s : g.curve.steps) {
      out += csv_row({name, format_double(s.time), std::to_string(s.at_risk), std::to_string(s.events),
                      std::to_string(s.censored), format_double(s.survival), format_double(s.lower), format_double(s.upper)});
    }
  };
  emit("HRM", r.hrm);
  emit("LRM", r.lrm);
  emit("all", r.all);
  return out;
}

std::string km_svg(const RiskSplitReport& r, const std::string& metadata) {
  PlotSpec spec;
  spec.title = "Freedom from progression by predicted risk";
  if (r.log_rank) spec.title += " (" + format_p(r.log_rank->p) + ")";
  spec.x_label = "days from imaging";
  spec.y_label = "progression-free fraction";
  double t_max = 1.0;
  for (const auto& s : r.all.curve.steps) t_max = std::max(t_max, s.time);
  spec.x_max = t_max;
  spec.y_max = 1.0;
  spec.metadata = metadata;
  if (r.lrm.n) spec.series.push_back(km_series(r.lrm, "LRM", "#2e8b57", false));
  if (r.hrm.n) spec.series.push_back(km_series(r.hrm, "HRM", "#c0392b", false));
  spec.series.push_back(km_series(r.all, "all", "#000000", true));
  return render_plot(spec);
}

std::string roc_svg(const RocCurve& roc, const std::string& title, const std::string& metadata) {
  PlotSpec spec;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", roc.auc);
  spec.title = title + " (AUC " + buf + ")";
  spec.x_label = "false positive rate";
  spec.y_label = "true positive rate";
  spec.metadata = metadata;
  spec.diagonal = true;
  PlotSeries s;
  s.label = "ROC";
  s.color = "#1f4e79";
  for (const auto& p : roc.points) s.points.emplace_back(p.fpr, p.tpr);
  spec.series.push_back(std::move(s));
  return render_plot(spec);
}

std::string risk_split_json(const RiskSplitReport& r) {
  json j = {{"hrm", group_json(r.hrm)},
            {"lrm", group_json(r.lrm)},
            {"all", group_json(r.all)},
            {"confusion", {{"tp", r.confusion.tp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}, {"fp", r.confusion.fp}}},
            {"censored_predicted_hrm", r.censored_predicted_hrm},
            {"censored_predicted_lrm", r.censored_predicted_lrm}};
  if (r.log_rank) {
    j["log_rank"] = {{"chi2", r.log_rank->chi2}, {"p", r.log_rank->p}, {"p_text", format_p(r.log_rank->p)}};
  } else {
    j["log_rank"] = {{"unavailable", r.log_rank_note}};
  }
  return j.dump(2) + "\n";
}

}  // namespace bmrisk
