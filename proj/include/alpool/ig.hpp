#pragma once

#include <optional>
#include <span>
#include <vector>

#include "alpool/classifier.hpp"
#include "alpool/counters.hpp"
#include "alpool/data.hpp"
#include "alpool/matrix.hpp"
#include "alpool/metrics.hpp"

namespace alpool {

// How the per-class entropy drops are weighted into one acquisition score.
enum class IGKind {
  predicted,                  // EIG: the model's predicted class probability
  predicted_times_frequency,  // AEIG: predicted probability x eval class frequency
  uniform,                    // UIG: 1/C
  frequency,                  // CFIG: eval class frequency
};

struct IGWeighting {
  IGKind kind = IGKind::predicted;
  std::optional<ClassFrequencies> frequencies;  // required for AEIG/CFIG
};

struct IGScoreResult {
  std::size_t candidate_index = 0;
  double score = 0.0;
  double h1 = 0.0;
  std::vector<double> per_class_h2;
  std::vector<double> per_class_weight;
};

// The per-class weights P entering score = H1 - sum_c P_c H2(c). AEIG's
// products are deliberately not renormalized; only pure-EIG weights sum to 1
// in general.
std::vector<double> class_weights(const IGWeighting& weighting,
                                  std::span<const double> predicted,
                                  std::size_t num_classes);

// Scores one unlabeled candidate: for each assumed class, steps a detached
// copy of the output layer on the candidate and measures the evaluation
// set's mean entropy under the stepped head. `h1` and the cached eval
// activations must come from this same head.
IGScoreResult score_candidate(const ClassifierHead& head, const FeaturePool& pool,
                              std::size_t candidate_index, const IGWeighting& weighting,
                              double step_size, const Matrix& cached_eval_penultimate,
                              const EntropySummary& h1, WorkCounters* counters = nullptr);

// Scores every unlabeled candidate. H1 and the eval activation cache are
// computed once and shared; candidates are scored in parallel across `jobs`
// workers with results merged in ascending candidate order, so the output is
// independent of the job count.
std::vector<IGScoreResult> score_pool(const ClassifierHead& head, const FeaturePool& pool,
                                      const IGWeighting& weighting, double step_size,
                                      int jobs = 1, WorkCounters* counters = nullptr);

}  // namespace alpool
