#include "bmrisk/feature_vector.hpp"

#include <cmath>

#include "bmrisk/error.hpp"

namespace bmrisk {

void FeatureVector::add(std::string name, double value) {
  if (!std::isfinite(value)) throw NumericalError("feature '" + name + "' is not finite");
  const auto [it, inserted] = index_.emplace(name, entries_.size());
  if (!inserted) throw DataError("duplicate feature name '" + name + "'");
  entries_.emplace_back(std::move(name), value);
}

void FeatureVector::append(const FeatureVector& other) {
  for (const auto& [name, value] : other.entries_) add(name, value);
}

std::vector<std::string> FeatureVector::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

std::vector<double> FeatureVector::values() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.second);
  return out;
}

std::optional<double> FeatureVector::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].second;
}

double FeatureVector::at(std::string_view name) const {
  const auto v = find(name);
  if (!v) throw DataError("feature '" + std::string(name) + "' not present");
  return *v;
}

FeatureVector FeatureVector::with_prefix(std::string_view prefix) const {
  FeatureVector out;
  for (const auto& [name, value] : entries_) out.add(std::string(prefix) + name, value);
  return out;
}

}  // namespace bmrisk
