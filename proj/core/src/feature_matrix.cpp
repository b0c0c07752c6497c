#include "bmrisk/feature_matrix.hpp"

#include <cmath>

#include "bmrisk/error.hpp"

namespace bmrisk {

FeatureMatrix::FeatureMatrix(std::vector<std::string> names, std::size_t rows)
    : names_(std::move(names)), rows_(rows), data_(names_.size() * rows, 0.0) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) throw DataError("duplicate feature column '" + names_[i] + "'");
  }
}

FeatureMatrix FeatureMatrix::from_rows(std::vector<std::string> names, const std::vector<std::vector<double>>& rows) {
  FeatureMatrix m(std::move(names), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw DataError("feature row " + std::to_string(r) + " has the wrong length");
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(rows[r][c])) throw NumericalError("non-finite value in column '" + m.names_[c] + "'");
      m(r, c) = rows[r][c];
    }
  }
  return m;
}

FeatureMatrix FeatureMatrix::from_vectors(const std::vector<FeatureVector>& rows) {
  if (rows.empty()) return {};
  FeatureMatrix m(rows.front().names(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& e = rows[r].entries();
    if (e.size() != m.cols()) throw DataError("feature rows have different rosters");
    for (std::size_t c = 0; c < e.size(); ++c) {
      if (e[c].first != m.names_[c]) throw DataError("feature rows have different column order at '" + e[c].first + "'");
      m(r, c) = e[c].second;
    }
  }
  return m;
}

std::vector<double> FeatureMatrix::row(std::size_t r) const {
  std::vector<double> out(cols());
  for (std::size_t c = 0; c < cols(); ++c) out[c] = (*this)(r, c);
  return out;
}

std::size_t FeatureMatrix::column_index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw DataError("no feature column '" + std::string(name) + "'");
  return it->second;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix m(names_, rows.size());
  for (std::size_t c = 0; c < cols(); ++c)
    for (std::size_t i = 0; i < rows.size(); ++i) m(i, c) = (*this)(rows[i], c);
  return m;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::string>& names) const {
  FeatureMatrix m(names, rows_);
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto src = column(column_index(names[j]));
    std::copy(src.begin(), src.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(j * rows_));
  }
  return m;
}

}  // namespace bmrisk
