#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bmrisk/feature_vector.hpp"

namespace bmrisk {

/// Samples x features, stored column-major. Column names are unique.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> names, std::size_t rows);

  /// Rows must all have names.size() entries.
  static FeatureMatrix from_rows(std::vector<std::string> names, const std::vector<std::vector<double>>& rows);
  /// Rows must carry identical names in identical order.
  static FeatureMatrix from_vectors(const std::vector<FeatureVector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  std::span<const double> column(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }
  std::vector<double> row(std::size_t r) const;

  /// Throws DataError when absent.
  std::size_t column_index(std::string_view name) const;

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix select_columns(const std::vector<std::string>& names) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t rows_ = 0;
  std::vector<double> data_;
};

}  // namespace bmrisk
