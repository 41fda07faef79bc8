#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alpool/data.hpp"

namespace alpool {

// Gaussian-mixture dataset with prescribed (exact, not expected) per-class
// counts per split. Class means are a seeded random orthonormal frame scaled
// so every pair of means is `cluster_separation` apart, in units of the unit
// isotropic noise.
struct SyntheticSpec {
  std::size_t num_classes = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> train_counts;  // length C
  std::vector<std::size_t> valid_counts;
  std::vector<std::size_t> test_counts;
  double cluster_separation = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws std::invalid_argument naming the field
};

// Splits `total` into per-class counts proportional to `weights` with exact
// sum: floor allocation plus largest-remainder top-up, remainder ties going
// to the lower class index.
std::vector<std::size_t> scale_counts(const std::vector<double>& weights,
                                      std::size_t total);

// Five imbalanced classes in 32 dimensions, 5000/1000/2000 train/valid/test.
SyntheticSpec dr_like_preset();
// Seven imbalanced classes, 6000/1500/2515.
SyntheticSpec isic_like_preset();

Dataset generate_synthetic(const SyntheticSpec& spec);

// Comma-separated text: header f0..f{d-1},label,split; one sample per row.
// Floats use 17 significant digits so write/read round-trips exactly.
Dataset load_dataset(const std::string& path, std::size_t expected_classes = 0);
void save_dataset(const Dataset& ds, const std::string& path);

}  // namespace alpool
