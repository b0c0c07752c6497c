#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bmrisk {

/// Ordered name -> value map. Names are unique and values finite; insertion
/// order is the column order everywhere downstream.
///
/// Names follow `<image-tag>-<filter>-<class>-<feature>`, e.g.
/// `follow-up-mr-wavelet-LHL-firstorder-Range`. Extraction produces untagged
/// names (`original-shape-Volume`); assembly adds the image tag.
class FeatureVector {
 public:
  FeatureVector() = default;

  /// Throws DataError on a duplicate name, NumericalError on a non-finite value.
  void add(std::string name, double value);
  void append(const FeatureVector& other);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
  std::vector<std::string> names() const;
  std::vector<double> values() const;

  std::optional<double> find(std::string_view name) const;
  /// Throws DataError when absent.
  double at(std::string_view name) const;
  bool contains(std::string_view name) const { return index_.count(std::string(name)) != 0; }

  FeatureVector with_prefix(std::string_view prefix) const;

  bool operator==(const FeatureVector& other) const { return entries_ == other.entries_; }

 private:
  std::vector<std::pair<std::string, double>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace bmrisk
