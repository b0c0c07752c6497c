#pragma once

#include <span>
#include <string>
#include <vector>

#include "bmrisk/feature_matrix.hpp"

namespace bmrisk {

struct PearsonResult {
  double r = 0.0;
  /// Either input is constant; r is then 0 by convention.
  bool degenerate = false;
};

/// Sample Pearson correlation. Throws DataError on a length mismatch or n < 2.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationEntry {
  std::string name;
  double r = 0.0;
  bool degenerate = false;
};

/// Signed correlation of every column with the label, ranked by |r|
/// (descending, ties by name).
struct CorrelationReport {
  std::vector<CorrelationEntry> ranked;
};

CorrelationReport correlation_report(const FeatureMatrix& x, std::span<const double> y);

/// |r| between every pair of the named columns, row-major.
std::vector<double> pairwise_abs_correlation(const FeatureMatrix& x, const std::vector<std::string>& names);

struct SelectionStep {
  std::string name;
  double relevance = 0.0;   // |r(f, y)|
  double redundancy = 0.0;  // mean |r(f, s)| over already selected s
  double score = 0.0;       // relevance - redundancy
};

struct SelectionResult {
  std::vector<std::string> selected;
  std::vector<SelectionStep> trace;
  std::size_t cap = 0;
};

/// One feature per ten samples, at least one.
std::size_t mrmr_cap(std::size_t n_samples);

/// Scores within this distance of the best are ties, broken by name; a best
/// score within it of zero counts as non-positive.
inline constexpr double kSelectionTieTolerance = 1e-12;

/// Greedy forward MRMR with the difference criterion. Step 1 takes the largest
/// |r(f, y)|; later steps maximize |r(f, y)| - mean_s |r(f, s)|. Stops after k
/// picks or once no remaining score is positive. Throws ConfigError for k < 1
/// and DataError for an empty matrix or label mismatch.
SelectionResult mrmr_select(const FeatureMatrix& x, std::span<const double> y, std::size_t k);

}  // namespace bmrisk
