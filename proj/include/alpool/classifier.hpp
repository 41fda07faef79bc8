#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alpool/data.hpp"
#include "alpool/matrix.hpp"
#include "alpool/rng.hpp"

namespace alpool {

struct TrainConfig {
  double learning_rate = 0.0005;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double weight_decay = 0.00001;
  double lr_decay_per_epoch = 0.995;  // multiplicative, applied each epoch
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws std::invalid_argument naming the field
};

struct HeadArchitecture {
  std::size_t hidden_width = 64;  // 0 = linear softmax head
  double dropout_rate = 0.2;      // applied to the final layer's input
};

// Feed-forward classifier: optional hidden layer (rectifier), inverted
// dropout before the output layer, softmax output. Weight matrices are
// row-major with one row per output unit.
struct ClassifierHead {
  std::size_t input_dim = 0;
  std::size_t hidden_width = 0;  // 0 => logits computed from raw features
  std::size_t num_classes = 0;
  double dropout_rate = 0.0;
  Matrix hidden_weights;             // hidden_width x input_dim
  std::vector<double> hidden_bias;   // hidden_width
  Matrix output_weights;             // num_classes x feature_width()
  std::vector<double> output_bias;   // num_classes

  std::size_t feature_width() const { return hidden_width ? hidden_width : input_dim; }
  bool operator==(const ClassifierHead&) const = default;
};

// Fresh parameters: hidden layer uniform in +-sqrt(6/(fan_in+fan_out)) drawn
// from rng_seed, biases and the whole output layer zero (so an untrained head
// predicts exactly uniform).
ClassifierHead make_head(std::size_t input_dim, std::size_t num_classes,
                         const HeadArchitecture& arch, std::uint64_t rng_seed);

// Cold-start mini-batch gradient descent on mean cross-entropy over the
// pool's labeled set: re-initializes from config.rng_seed, then runs
// `epochs` passes with weight decay (weights only) and per-epoch learning
// rate decay. Dropout is active during training. Deterministic.
ClassifierHead train(const FeaturePool& pool, const HeadArchitecture& arch,
                     const TrainConfig& config);

// Hidden activation for the sample, or the raw features for a linear head.
std::vector<double> penultimate_features(const ClassifierHead& head,
                                         std::span<const double> x);
// Buffer variant; out must hold feature_width() values.
void penultimate_features(const ClassifierHead& head, std::span<const double> x,
                          double* out);

// Softmax class probabilities. dropout_active zeroes each final-layer input
// with probability dropout_rate and rescales survivors by 1/(1-p); it
// requires a caller-supplied rng so parallel use stays deterministic.
std::vector<double> predict_proba(const ClassifierHead& head, std::span<const double> x,
                                  bool dropout_active = false, Rng* rng = nullptr);

// One steepest-descent step on the cross-entropy of (x, assumed_label),
// applied to the output layer only; hidden parameters are copied verbatim.
// The input head is not mutated.
ClassifierHead gradient_step_on_head(const ClassifierHead& head,
                                     std::span<const double> x, int assumed_label,
                                     double step_size);

// The update inside gradient_step_on_head, exposed so bulk scoring can step
// detached output-layer copies over cached activations with identical
// arithmetic: weights (C x dim) and bias change in place by one step on the
// cross-entropy of (activation, label). logits/probs are scratch (size C).
void step_output_layer(double* weights, double* bias, const double* activation,
                       std::size_t dim, std::size_t num_classes, int label,
                       double step_size, double* logits_scratch, double* probs_scratch);

// Text checkpoint with a dims header; exact round-trip.
void save_head(const ClassifierHead& head, const std::string& path);
ClassifierHead load_head(const std::string& path);

// Numerically stabilized in-place softmax.
void softmax_inplace(double* logits, std::size_t n);

}  // namespace alpool
