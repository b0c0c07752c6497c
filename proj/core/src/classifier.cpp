#include "bmrisk/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "bmrisk/error.hpp"
#include "json.hpp"

namespace bmrisk {

namespace {

constexpr double kTau = 1e-12;

struct Solver {
  std::size_t n;
  std::vector<double> K;  // Gram matrix, row-major
  std::vector<double> y;  // +1 / -1
  std::vector<double> ub; // per-sample box bound
  std::vector<double> alpha;
  std::vector<double> G;  // gradient of 1/2 a'Qa - e'a

  double Q(std::size_t i, std::size_t j) const { return y[i] * y[j] * K[i * n + j]; }
  bool at_upper(std::size_t t) const { return alpha[t] >= ub[t]; }
  bool at_lower(std::size_t t) const { return alpha[t] <= 0.0; }

  // Returns false when the KKT gap is below eps.
  bool select(double eps, std::size_t& out_i, std::size_t& out_j, double& gap) const {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!at_upper(t) && -G[t] >= gmax) {
          gmax = -G[t];
          i = t;
        }
      } else if (!at_lower(t) && G[t] >= gmax) {
        gmax = G[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n && i < n; ++t) {
      double grad_diff = 0.0;
      double quad = 0.0;
      if (y[t] > 0) {
        if (at_lower(t)) continue;
        gmax2 = std::max(gmax2, G[t]);
        grad_diff = gmax + G[t];
        quad = K[i * n + i] + K[t * n + t] - 2.0 * y[i] * Q(i, t);
      } else {
        if (at_upper(t)) continue;
        gmax2 = std::max(gmax2, -G[t]);
        grad_diff = gmax - G[t];
        quad = K[i * n + i] + K[t * n + t] + 2.0 * y[i] * Q(i, t);
      }
      if (grad_diff > 0.0) {
        const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    gap = (i < n && gmax2 > -std::numeric_limits<double>::infinity()) ? gmax + gmax2 : 0.0;
    if (gap < eps || j == n) return false;
    out_i = i;
    out_j = j;
    return true;
  }

  void update(std::size_t i, std::size_t j) {
    const double ci = ub[i], cj = ub[j];
    const double old_i = alpha[i], old_j = alpha[j];
    double& ai = alpha[i];
    double& aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = K[i * n + i] + K[j * n + j] + 2.0 * Q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > ci - cj) {
        if (ai > ci) {
          ai = ci;
          aj = ci - diff;
        }
      } else if (aj > cj) {
        aj = cj;
        ai = cj + diff;
      }
    } else {
      double quad = K[i * n + i] + K[j * n + j] - 2.0 * Q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > ci) {
        if (ai > ci) {
          ai = ci;
          aj = sum - ci;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > cj) {
        if (aj > cj) {
          aj = cj;
          ai = sum - cj;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    const double di = ai - old_i, dj = aj - old_j;
    for (std::size_t t = 0; t < n; ++t) G[t] += Q(i, t) * di + Q(j, t) * dj;
  }

  double rho() const {
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double yg = y[t] * G[t];
      if (at_upper(t)) {
        if (y[t] < 0) upper = std::min(upper, yg);
        else lower = std::max(lower, yg);
      } else if (at_lower(t)) {
        if (y[t] > 0) upper = std::min(upper, yg);
        else lower = std::max(lower, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    return n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (upper + lower);
  }
};

using nlohmann::json;

}  // namespace

FitResult fit(const FeatureMatrix& x, std::span<const int> labels, const ClassifierConfig& cfg) {
  const std::size_t n = x.rows(), p = x.cols();
  if (labels.size() != n) throw DataError("fit: label count does not match rows");
  if (!(cfg.C > 0.0) || !std::isfinite(cfg.C)) throw ConfigError("fit: C must be positive");
  if (!(cfg.sensitivity_weight > 0.0) || !std::isfinite(cfg.sensitivity_weight)) {
    throw ConfigError("fit: sensitivity weight must be positive");
  }
  if (cfg.max_epochs < 1 || !(cfg.tolerance > 0.0)) throw ConfigError("fit: invalid solver budget");
  std::size_t n_pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError("fit: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(l);
  }
  if (n_pos == 0 || n_pos == n) throw DataError("fit: both classes must be present");
  for (std::size_t c = 0; c < p; ++c)
    for (double v : x.column(c))
      if (!std::isfinite(v)) throw NumericalError("fit: non-finite value in '" + x.names()[c] + "'");

  FitResult res;
  TrainedModel& m = res.model;
  m.features = x.names();
  m.config = cfg;
  m.theta = cfg.theta;
  m.c_pos = cfg.sensitivity_weight * static_cast<double>(n - n_pos) / static_cast<double>(n_pos);
  m.c_neg = 1.0;
  m.mu.assign(p, 0.0);
  m.sigma.assign(p, 1.0);
  std::vector<double> z(n * p);  // standardized, row-major
  for (std::size_t c = 0; c < p; ++c) {
    const auto col = x.column(c);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    m.mu[c] = mean;
    m.sigma[c] = sd > 0.0 ? sd : 1.0;
    for (std::size_t r = 0; r < n; ++r) z[r * p + c] = (col[r] - mean) / m.sigma[c];
  }

  Solver s;
  s.n = n;
  s.K.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < p; ++c) dot += z[i * p + c] * z[j * p + c];
      s.K[i * n + j] = s.K[j * n + i] = dot;
    }
  s.y.resize(n);
  s.ub.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.y[i] = labels[i] == 1 ? 1.0 : -1.0;
    s.ub[i] = cfg.C * (labels[i] == 1 ? m.c_pos : m.c_neg);
  }
  s.alpha.assign(n, 0.0);
  s.G.assign(n, -1.0);

  const std::size_t budget = static_cast<std::size_t>(cfg.max_epochs) * std::max<std::size_t>(n, 1);
  std::size_t it = 0;
  for (; it < budget; ++it) {
    std::size_t i = 0, j = 0;
    if (!s.select(cfg.tolerance, i, j, res.kkt_gap)) {
      res.converged = true;
      break;
    }
    s.update(i, j);
  }
  if (!res.converged) {
    std::size_t i = 0, j = 0;
    res.converged = !s.select(cfg.tolerance, i, j, res.kkt_gap);
  }
  res.iterations = it;

  m.w.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.alpha[i] == 0.0) continue;
    for (std::size_t c = 0; c < p; ++c) m.w[c] += s.alpha[i] * s.y[i] * z[i * p + c];
  }
  m.b = -s.rho();
  for (double v : m.w)
    if (!std::isfinite(v)) throw NumericalError("fit: solver produced non-finite weights");
  if (!std::isfinite(m.b)) throw NumericalError("fit: solver produced a non-finite bias");
  res.train_scores = decision_scores(m, x);
  return res;
}

std::vector<double> decision_scores(const TrainedModel& m, const FeatureMatrix& x) {
  std::vector<std::size_t> idx(m.features.size());
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = x.column_index(m.features[j]);
  std::vector<double> out(x.rows(), m.b);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = m.b;
    for (std::size_t j = 0; j < idx.size(); ++j) s += m.w[j] * ((x(r, idx[j]) - m.mu[j]) / m.sigma[j]);
    out[r] = s;
  }
  return out;
}

std::vector<int> predict(std::span<const double> scores, double theta) {
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= theta ? 1 : 0;
  return out;
}

std::vector<int> predict(const TrainedModel& m, const FeatureMatrix& x) { return predict(decision_scores(m, x), m.theta); }

std::string model_to_json(const TrainedModel& m) {
  const json j = {{"format", "bmrisk-model/1"},
                  {"features", m.features},
                  {"mu", m.mu},
                  {"sigma", m.sigma},
                  {"w", m.w},
                  {"b", m.b},
                  {"theta", m.theta},
                  {"class_weights", {{"positive", m.c_pos}, {"negative", m.c_neg}}},
                  {"config",
                   {{"C", m.config.C},
                    {"sensitivity_weight", m.config.sensitivity_weight},
                    {"theta", m.config.theta},
                    {"seed", m.config.seed},
                    {"max_epochs", m.config.max_epochs},
                    {"tolerance", m.config.tolerance}}}};
  return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  TrainedModel m;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "bmrisk-model/1") throw DataError("unsupported model format");
    m.features = j.at("features").get<std::vector<std::string>>();
    m.mu = j.at("mu").get<std::vector<double>>();
    m.sigma = j.at("sigma").get<std::vector<double>>();
    m.w = j.at("w").get<std::vector<double>>();
    m.b = j.at("b").get<double>();
    m.theta = j.at("theta").get<double>();
    m.c_pos = j.at("class_weights").at("positive").get<double>();
    m.c_neg = j.at("class_weights").at("negative").get<double>();
    const auto& c = j.at("config");
    m.config.C = c.at("C").get<double>();
    m.config.sensitivity_weight = c.at("sensitivity_weight").get<double>();
    m.config.theta = c.at("theta").get<double>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.max_epochs = c.at("max_epochs").get<int>();
    m.config.tolerance = c.at("tolerance").get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
  const std::size_t p = m.features.size();
  if (m.mu.size() != p || m.sigma.size() != p || m.w.size() != p) throw DataError("model JSON: inconsistent lengths");
  for (double s : m.sigma)
    if (!(s > 0.0)) throw DataError("model JSON: sigma must be positive");
  return m;
}

}  // namespace bmrisk
