#include "alpool/data.hpp"

#include <algorithm>
#include <cmath>

#include "alpool/rng.hpp"
#include "alpool/util.hpp"

namespace alpool {

namespace {
// FeaturePool per-sample state codes.
constexpr char kOutside = 0;    // test split: features visible, label hidden
constexpr char kUnlabeled = 1;  // train split, label hidden
constexpr char kLabeled = 2;    // train split, label revealed
constexpr char kEval = 3;       // validation split, label visible
}  // namespace

const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "?";
}

std::optional<Split> parse_split(const std::string& token) {
  if (token == "train") return Split::train;
  if (token == "valid") return Split::valid;
  if (token == "test") return Split::test;
  return std::nullopt;
}

std::vector<std::size_t> Dataset::indices_of(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == s) out.push_back(i);
  return out;
}

std::vector<std::size_t> Dataset::class_counts(Split s) const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == s) ++counts[static_cast<std::size_t>(labels[i])];
  return counts;
}

void Dataset::validate() const {
  if (dim == 0) fail("dataset: dimension must be positive");
  if (num_classes < 2) fail("dataset: need at least 2 classes");
  if (features.rows != labels.size() || labels.size() != splits.size())
    fail(strfmt("dataset: inconsistent sizes (features %zu, labels %zu, splits %zu)",
                features.rows, labels.size(), splits.size()));
  if (features.cols != dim)
    fail(strfmt("dataset: feature width %zu != dimension %zu", features.cols, dim));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes)
      fail(strfmt("dataset: sample %zu has label %d outside [0,%zu)", i, labels[i],
                  num_classes));
  }
  for (std::size_t i = 0; i < features.data.size(); ++i)
    if (!std::isfinite(features.data[i]))
      fail(strfmt("dataset: non-finite feature value at sample %zu", i / dim));
}

FeaturePool::FeaturePool(const Dataset& ds) : ds_(&ds) {
  ds.validate();
  state_.assign(ds.size(), kOutside);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.splits[i] == Split::train) {
      state_[i] = kUnlabeled;
      unlabeled_.push_back(i);
    } else if (ds.splits[i] == Split::valid) {
      state_[i] = kEval;
      eval_.push_back(i);
    }
  }
  cumulative_counts_.assign(ds.num_classes, 0);
}

std::span<const double> FeaturePool::features(std::size_t index) const {
  if (index >= ds_->size()) fail(strfmt("pool: sample index %zu out of range", index));
  return {ds_->features.row(index), ds_->dim};
}

int FeaturePool::label(std::size_t index) const {
  if (index >= ds_->size()) fail(strfmt("pool: sample index %zu out of range", index));
  const char st = state_[index];
  if (st != kLabeled && st != kEval)
    fail(strfmt("pool: label of sample %zu has not been revealed", index));
  return ds_->labels[index];
}

AcquisitionRecord FeaturePool::apply_acquisition(const std::vector<std::size_t>& selected) {
  if (selected.empty()) fail_arg("acquisition: empty selection");
  std::vector<std::size_t> sorted = selected;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k > 0 && sorted[k] == sorted[k - 1])
      fail_arg(strfmt("acquisition: duplicate sample index %zu", sorted[k]));
    if (sorted[k] >= ds_->size() || state_[sorted[k]] != kUnlabeled)
      fail_arg(strfmt("acquisition: sample %zu is not in the unlabeled pool", sorted[k]));
  }

  AcquisitionRecord rec;
  rec.round = ++rounds_;
  rec.selected_indices = sorted;
  rec.per_class_counts.assign(ds_->num_classes, 0);
  for (std::size_t idx : sorted) {
    state_[idx] = kLabeled;
    ++rec.per_class_counts[static_cast<std::size_t>(ds_->labels[idx])];
  }
  for (std::size_t c = 0; c < ds_->num_classes; ++c)
    cumulative_counts_[c] += rec.per_class_counts[c];
  rec.cumulative_per_class_counts = cumulative_counts_;

  std::vector<std::size_t> merged;
  merged.reserve(labeled_.size() + sorted.size());
  std::merge(labeled_.begin(), labeled_.end(), sorted.begin(), sorted.end(),
             std::back_inserter(merged));
  labeled_ = std::move(merged);
  std::vector<std::size_t> remaining;
  remaining.reserve(unlabeled_.size() - sorted.size());
  std::set_difference(unlabeled_.begin(), unlabeled_.end(), sorted.begin(), sorted.end(),
                      std::back_inserter(remaining));
  unlabeled_ = std::move(remaining);
  return rec;
}

FeaturePool initialize_pool(const Dataset& ds, double seed_fraction,
                            std::uint64_t rng_seed) {
  if (!(seed_fraction > 0.0 && seed_fraction < 1.0))
    fail_arg(strfmt("initialize_pool: seed_fraction %g outside (0,1)", seed_fraction));
  FeaturePool pool(ds);
  std::vector<std::size_t> train = pool.unlabeled_;
  if (train.empty()) fail("initialize_pool: dataset has no training samples");

  const std::size_t m =
      static_cast<std::size_t>(seed_fraction * static_cast<double>(train.size()));
  Rng rng(derive_seed(rng_seed, "pool"));
  rng.partial_shuffle(train, m);
  train.resize(m);
  std::sort(train.begin(), train.end());

  for (std::size_t idx : train) pool.state_[idx] = kLabeled;
  pool.labeled_ = train;
  std::vector<std::size_t> remaining;
  std::set_difference(pool.unlabeled_.begin(), pool.unlabeled_.end(), train.begin(),
                      train.end(), std::back_inserter(remaining));
  pool.unlabeled_ = std::move(remaining);
  return pool;
}

ClassFrequencies eval_class_frequencies(const FeaturePool& pool) {
  const auto& eval = pool.eval();
  if (eval.empty()) fail("eval_class_frequencies: evaluation set is empty");
  ClassFrequencies out;
  out.counts.assign(pool.num_classes(), 0);
  for (std::size_t idx : eval)
    ++out.counts[static_cast<std::size_t>(pool.label(idx))];
  out.weights.resize(out.counts.size());
  const double total = static_cast<double>(eval.size());
  for (std::size_t c = 0; c < out.counts.size(); ++c)
    out.weights[c] = static_cast<double>(out.counts[c]) / total;
  return out;
}

}  // namespace alpool
