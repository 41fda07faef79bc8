#pragma once

#include <span>
#include <string>
#include <vector>

#include "alpool/classifier.hpp"
#include "alpool/data.hpp"
#include "alpool/matrix.hpp"

namespace alpool {

// -sum p ln p in nats, 0 ln 0 := 0. Validates entries >= 0 and sum within
// 1e-6 of 1.
double shannon_entropy(std::span<const double> p);

struct EntropySummary {
  double mean_entropy = 0.0;
  std::vector<double> per_sample_entropy;
};

// Penultimate activations for the given samples, one row each.
Matrix penultimate_matrix(const ClassifierHead& head, const FeaturePool& pool,
                          const std::vector<std::size_t>& indices);

// Mean predictive entropy over the pool's evaluation set (deterministic
// forwards). Passing the eval penultimate matrix skips its recomputation;
// cached and uncached paths agree bitwise.
EntropySummary eval_set_entropy(const ClassifierHead& head, const FeaturePool& pool,
                                const Matrix* cached_penultimate = nullptr);

struct AucResult {
  double macro_auc = 0.0;
  std::vector<double> per_class_auc;   // NaN for skipped classes
  std::vector<std::string> warnings;   // one entry per skipped class
};

// Macro one-vs-rest ROC AUC by rank statistics with mid-rank tie handling.
// Classes with no positives or no negatives are skipped with a warning and
// excluded from the average. Scores need not be normalized rows; only
// finiteness is required, so it also serves raw score matrices.
AucResult macro_ovr_auc(const Matrix& scores, const std::vector<int>& labels);

struct AcquisitionTables {
  std::vector<std::vector<std::size_t>> per_round;   // row per round, C columns
  std::vector<std::vector<std::size_t>> cumulative;  // prefix sums of the above
};

// Tabulates per-class acquisition counts; records must be consecutive rounds
// starting at 1.
AcquisitionTables acquisition_histogram(const std::vector<AcquisitionRecord>& records);

}  // namespace alpool
