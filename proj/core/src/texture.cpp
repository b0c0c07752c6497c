#include <cmath>

#include "bmrisk/features.hpp"
#include "texture_internal.hpp"

namespace bmrisk {

namespace detail {

SizeMatrixStats size_matrix_stats(const LevelMatrix& m) {
  SizeMatrixStats s;
  s.total = m.total();
  if (s.total <= 0.0) return s;
  const double n = s.total;
  std::vector<double> gray(static_cast<std::size_t>(m.rows) + 1, 0.0);
  std::vector<double> size(static_cast<std::size_t>(m.cols) + 1, 0.0);
  double mu_i = 0.0;
  double mu_j = 0.0;
  for (int i = 1; i <= m.rows; ++i) {
    for (int j = 1; j <= m.cols; ++j) {
      const double c = m(i, j);
      if (c <= 0.0) continue;
      gray[static_cast<std::size_t>(i)] += c;
      size[static_cast<std::size_t>(j)] += c;
      const double p = c / n;
      const double ii = static_cast<double>(i) * i;
      const double jj = static_cast<double>(j) * j;
      mu_i += p * i;
      mu_j += p * j;
      s.small_emphasis += p / jj;
      s.large_emphasis += p * jj;
      s.entropy -= p * std::log2(p);
      s.low_gray_emphasis += p / ii;
      s.high_gray_emphasis += p * ii;
      s.small_low_gray += p / (ii * jj);
      s.small_high_gray += p * ii / jj;
      s.large_low_gray += p * jj / ii;
      s.large_high_gray += p * ii * jj;
    }
  }
  for (double g : gray) s.gray_nonuniformity += g * g;
  for (double z : size) s.size_nonuniformity += z * z;
  s.gray_nonuniformity_norm = s.gray_nonuniformity / (n * n);
  s.size_nonuniformity_norm = s.size_nonuniformity / (n * n);
  s.gray_nonuniformity /= n;
  s.size_nonuniformity /= n;
  for (int i = 1; i <= m.rows; ++i) {
    for (int j = 1; j <= m.cols; ++j) {
      const double c = m(i, j);
      if (c <= 0.0) continue;
      const double p = c / n;
      s.gray_variance += p * (i - mu_i) * (i - mu_i);
      s.size_variance += p * (j - mu_j) * (j - mu_j);
    }
  }
  return s;
}

}  // namespace detail

FeatureVector texture_features(const DiscretizedRoi& roi, TextureFamily family) {
  switch (family) {
    case TextureFamily::GLCM: return detail::glcm_features(roi);
    case TextureFamily::GLRLM: return detail::glrlm_features(roi);
    case TextureFamily::GLSZM: return detail::glszm_features(roi);
    case TextureFamily::GLDM: return detail::gldm_features(roi);
  }
  return {};
}

const std::vector<std::string>& texture_feature_names(TextureFamily family) {
  switch (family) {
    case TextureFamily::GLCM: return detail::glcm_feature_names();
    case TextureFamily::GLRLM: return detail::glrlm_feature_names();
    case TextureFamily::GLSZM: return detail::glszm_feature_names();
    case TextureFamily::GLDM: break;
  }
  return detail::gldm_feature_names();
}

}  // namespace bmrisk
