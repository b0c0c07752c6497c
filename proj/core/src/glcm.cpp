#include <algorithm>
#include <cmath>

#include "bmrisk/features.hpp"
#include "texture_internal.hpp"

namespace bmrisk {

namespace {

constexpr std::size_t kGlcmCount = 22;

// Entropy terms treat 0 * log(0) as 0.
double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Below this gap HXY2 - HXY is treated as zero before taking the square root in Imc2.
constexpr double kImc2Floor = 1e-12;

std::array<double, kGlcmCount> glcm_direction_features(const LevelMatrix& m) {
  const int ng = m.rows;
  const double total = m.total();
  std::vector<double> p(m.counts.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = m.counts[k] / total;
  auto at = [&](int i, int j) { return p[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(ng) + static_cast<std::size_t>(j - 1)]; };

  std::vector<double> px(static_cast<std::size_t>(ng) + 1, 0.0);
  std::vector<double> py(static_cast<std::size_t>(ng) + 1, 0.0);
  std::vector<double> psum(2 * static_cast<std::size_t>(ng) + 1, 0.0);   // index i + j
  std::vector<double> pdiff(static_cast<std::size_t>(ng), 0.0);            // index |i - j|
  for (int i = 1; i <= ng; ++i) {
    for (int j = 1; j <= ng; ++j) {
      const double v = at(i, j);
      px[static_cast<std::size_t>(i)] += v;
      py[static_cast<std::size_t>(j)] += v;
      psum[static_cast<std::size_t>(i + j)] += v;
      pdiff[static_cast<std::size_t>(std::abs(i - j))] += v;
    }
  }
  double mux = 0.0;
  double muy = 0.0;
  for (int i = 1; i <= ng; ++i) {
    mux += i * px[static_cast<std::size_t>(i)];
    muy += i * py[static_cast<std::size_t>(i)];
  }
  double varx = 0.0;
  double vary = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  for (int i = 1; i <= ng; ++i) {
    varx += (i - mux) * (i - mux) * px[static_cast<std::size_t>(i)];
    vary += (i - muy) * (i - muy) * py[static_cast<std::size_t>(i)];
    hx -= plogp(px[static_cast<std::size_t>(i)]);
    hy -= plogp(py[static_cast<std::size_t>(i)]);
  }

  double autocorr = 0.0, prominence = 0.0, shade = 0.0, tendency = 0.0, contrast = 0.0;
  double energy = 0.0, hxy = 0.0, hxy1 = 0.0, hxy2 = 0.0;
  double idm = 0.0, idmn = 0.0, id = 0.0, idn = 0.0, maxp = 0.0;
  const double ngd = static_cast<double>(ng);
  for (int i = 1; i <= ng; ++i) {
    for (int j = 1; j <= ng; ++j) {
      const double v = at(i, j);
      const double pxy = px[static_cast<std::size_t>(i)] * py[static_cast<std::size_t>(j)];
      hxy2 -= pxy > 0.0 ? pxy * std::log2(pxy) : 0.0;
      if (v <= 0.0) continue;
      const double s = i + j - mux - muy;
      const double d = i - j;
      autocorr += v * i * j;
      prominence += v * s * s * s * s;
      shade += v * s * s * s;
      tendency += v * s * s;
      contrast += v * d * d;
      energy += v * v;
      hxy -= v * std::log2(v);
      hxy1 -= v * std::log2(pxy);
      idm += v / (1.0 + d * d);
      idmn += v / (1.0 + d * d / (ngd * ngd));
      id += v / (1.0 + std::fabs(d));
      idn += v / (1.0 + std::fabs(d) / ngd);
      maxp = std::max(maxp, v);
    }
  }

  double diff_avg = 0.0, diff_entropy = 0.0, inv_var = 0.0;
  for (int k = 0; k < ng; ++k) {
    const double v = pdiff[static_cast<std::size_t>(k)];
    diff_avg += k * v;
    diff_entropy -= plogp(v);
    if (k > 0) inv_var += v / (static_cast<double>(k) * k);
  }
  double diff_var = 0.0;
  for (int k = 0; k < ng; ++k) diff_var += (k - diff_avg) * (k - diff_avg) * pdiff[static_cast<std::size_t>(k)];
  double sum_entropy = 0.0;
  for (double v : psum) sum_entropy -= plogp(v);

  const double sigma = std::sqrt(varx) * std::sqrt(vary);
  const double correlation = sigma > 0.0 ? (autocorr - mux * muy) / sigma : 1.0;
  const double hmax = std::max(hx, hy);
  const double imc1 = hmax > 0.0 ? (hxy - hxy1) / hmax : 0.0;
  const double gap = hxy2 - hxy;
  const double imc2 = gap > kImc2Floor ? std::sqrt(1.0 - std::exp(-2.0 * gap)) : 0.0;

  return {autocorr, mux, prominence, shade, tendency, contrast, correlation, diff_avg, diff_entropy, diff_var,
          energy, hxy, imc1, imc2, idm, idmn, id, idn, inv_var, maxp, sum_entropy, varx};
}

}  // namespace

std::vector<LevelMatrix> glcm_matrices(const DiscretizedRoi& roi) {
  std::vector<LevelMatrix> out;
  out.reserve(13);
  for (const auto& d : unique_directions()) {
    LevelMatrix m(roi.bin_count, roi.bin_count);
    for (std::size_t k = 0; k < roi.size(); ++k) {
      const auto& c = roi.coords[k];
      const int j = roi.level_at(c[0] + d[0], c[1] + d[1], c[2] + d[2]);
      if (j == 0) continue;
      const int i = roi.levels[k];
      m(i, j) += 1.0;
      m(j, i) += 1.0;
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace detail {

const std::vector<std::string>& glcm_feature_names() {
  static const std::vector<std::string> names = {
      "glcm-Autocorrelation",   "glcm-JointAverage",     "glcm-ClusterProminence", "glcm-ClusterShade",
      "glcm-ClusterTendency",   "glcm-Contrast",         "glcm-Correlation",       "glcm-DifferenceAverage",
      "glcm-DifferenceEntropy", "glcm-DifferenceVariance", "glcm-JointEnergy",     "glcm-JointEntropy",
      "glcm-Imc1",              "glcm-Imc2",             "glcm-Idm",               "glcm-Idmn",
      "glcm-Id",                "glcm-Idn",              "glcm-InverseVariance",   "glcm-MaximumProbability",
      "glcm-SumEntropy",        "glcm-SumSquares",
  };
  return names;
}

FeatureVector glcm_features(const DiscretizedRoi& roi) {
  std::array<double, kGlcmCount> acc{};
  int used = 0;
  for (const auto& m : glcm_matrices(roi)) {
    if (m.total() <= 0.0) continue;
    const auto f = glcm_direction_features(m);
    for (std::size_t k = 0; k < kGlcmCount; ++k) acc[k] += f[k];
    ++used;
  }
  FeatureVector out;
  const auto& names = glcm_feature_names();
  for (std::size_t k = 0; k < kGlcmCount; ++k) out.add(names[k], used > 0 ? acc[k] / used : 0.0);
  return out;
}

}  // namespace detail
}  // namespace bmrisk
