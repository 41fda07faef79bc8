#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alpool/matrix.hpp"

namespace alpool {

enum class Split { train, valid, test };

const char* split_name(Split s);
std::optional<Split> parse_split(const std::string& token);

// All samples of all splits, features row-major. Labels are stored for every
// sample; label *visibility* is governed by FeaturePool, not here.
struct Dataset {
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  Matrix features;            // size() x dim
  std::vector<int> labels;    // each in [0, num_classes)
  std::vector<Split> splits;

  std::size_t size() const { return labels.size(); }
  std::vector<std::size_t> indices_of(Split s) const;
  std::vector<std::size_t> class_counts(Split s) const;
  // Throws std::runtime_error on any structural inconsistency.
  void validate() const;
};

struct ClassFrequencies {
  std::vector<std::size_t> counts;  // per class, over the evaluation set
  std::vector<double> weights;      // counts / total, sums to 1
};

struct AcquisitionRecord {
  int round = 0;                                       // 1-based
  std::vector<std::size_t> selected_indices;           // ascending
  std::vector<std::size_t> per_class_counts;           // length C
  std::vector<std::size_t> cumulative_per_class_counts;
};

// Labeled/unlabeled partition of the training split plus the fixed evaluation
// set (the validation split). Sample features are readable for every index;
// labels are revealed only for labeled and evaluation samples, so selection
// strategies cannot peek at ground truth. Holds a pointer to the Dataset,
// which must outlive the pool.
class FeaturePool {
 public:
  explicit FeaturePool(const Dataset& ds);

  std::size_t dim() const { return ds_->dim; }
  std::size_t num_classes() const { return ds_->num_classes; }
  std::size_t train_size() const { return labeled_.size() + unlabeled_.size(); }

  const std::vector<std::size_t>& labeled() const { return labeled_; }
  const std::vector<std::size_t>& unlabeled() const { return unlabeled_; }
  const std::vector<std::size_t>& eval() const { return eval_; }

  std::span<const double> features(std::size_t index) const;
  // Throws std::runtime_error for indices whose label has not been revealed.
  int label(std::size_t index) const;

  // Simulated oracle: moves `selected` from unlabeled to labeled, revealing
  // their labels. Throws on duplicates or indices not currently unlabeled.
  AcquisitionRecord apply_acquisition(const std::vector<std::size_t>& selected);
  int rounds_applied() const { return rounds_; }

 private:
  friend FeaturePool initialize_pool(const Dataset&, double, std::uint64_t);

  const Dataset* ds_;
  std::vector<std::size_t> labeled_;    // ascending
  std::vector<std::size_t> unlabeled_;  // ascending
  std::vector<std::size_t> eval_;       // ascending
  std::vector<char> state_;             // per sample: see data.cpp
  std::vector<std::size_t> cumulative_counts_;
  int rounds_ = 0;
};

// Uniformly samples floor(seed_fraction * train size) training indices as the
// initial labeled set; the rest become the unlabeled pool. Pure function of
// rng_seed.
FeaturePool initialize_pool(const Dataset& ds, double seed_fraction,
                            std::uint64_t rng_seed);

ClassFrequencies eval_class_frequencies(const FeaturePool& pool);

}  // namespace alpool
