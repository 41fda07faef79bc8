#include "alpool/ig.hpp"

#include <algorithm>
#include <cmath>

#include "alpool/kernels.hpp"
#include "alpool/parallel.hpp"
#include "alpool/util.hpp"

namespace alpool {

std::vector<double> class_weights(const IGWeighting& weighting,
                                  std::span<const double> predicted,
                                  std::size_t num_classes) {
  const bool needs_freq = weighting.kind == IGKind::predicted_times_frequency ||
                          weighting.kind == IGKind::frequency;
  if (needs_freq) {
    if (!weighting.frequencies)
      fail_arg("class_weights: this weighting requires eval class frequencies");
    if (weighting.frequencies->weights.size() != num_classes)
      fail_arg(strfmt("class_weights: frequencies cover %zu classes, expected %zu",
                  weighting.frequencies->weights.size(), num_classes));
  }
  const bool needs_pred = weighting.kind == IGKind::predicted ||
                          weighting.kind == IGKind::predicted_times_frequency;
  if (needs_pred && predicted.size() != num_classes)
    fail_arg(strfmt("class_weights: prediction has %zu entries, expected %zu",
                predicted.size(), num_classes));

  std::vector<double> w(num_classes);
  switch (weighting.kind) {
    case IGKind::predicted:
      std::copy(predicted.begin(), predicted.end(), w.begin());
      break;
    case IGKind::predicted_times_frequency:
      for (std::size_t c = 0; c < num_classes; ++c)
        w[c] = predicted[c] * weighting.frequencies->weights[c];
      break;
    case IGKind::uniform:
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(num_classes));
      break;
    case IGKind::frequency:
      std::copy(weighting.frequencies->weights.begin(),
                weighting.frequencies->weights.end(), w.begin());
      break;
  }
  return w;
}

namespace {

// Per-worker scratch for the inner scoring loop, so parallel workers never
// share mutable state.
struct Scratch {
  std::vector<double> act;      // candidate penultimate activation
  std::vector<double> pred;     // candidate class probabilities (pre-step)
  std::vector<double> weights;  // C x feature_width stepped copy
  std::vector<double> bias;
  std::vector<double> logits;
  std::vector<double> probs;

  Scratch(std::size_t hw, std::size_t C)
      : act(hw), pred(C), weights(C * hw), bias(C), logits(C), probs(C) {}
};

IGScoreResult score_one(const ClassifierHead& head, const FeaturePool& pool,
                        std::size_t candidate, const IGWeighting& weighting,
                        double step_size, const Matrix& cache,
                        const EntropySummary& h1, Scratch& s, WorkCounters& wc) {
  const std::size_t hw = head.feature_width(), C = head.num_classes;
  const std::size_t K = cache.rows;
  const kernels::Ops& ops = kernels::active();

  penultimate_features(head, pool.features(candidate), s.act.data());
  ops.matvec(head.output_weights.data.data(), C, hw, s.act.data(),
             head.output_bias.data(), s.pred.data());
  softmax_inplace(s.pred.data(), C);
  wc.candidate_forwards += 1;

  IGScoreResult out;
  out.candidate_index = candidate;
  out.h1 = h1.mean_entropy;
  out.per_class_weight = class_weights(weighting, s.pred, C);
  out.per_class_h2.resize(C);

  double weighted_h2 = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    std::copy(head.output_weights.data.begin(), head.output_weights.data.end(),
              s.weights.begin());
    std::copy(head.output_bias.begin(), head.output_bias.end(), s.bias.begin());
    step_output_layer(s.weights.data(), s.bias.data(), s.act.data(), hw, C,
                      static_cast<int>(c), step_size, s.logits.data(), s.probs.data());
    wc.gradient_steps += 1;
    const double sum = ops.head_entropy_sum(s.weights.data(), s.bias.data(), C, hw,
                                            cache.data.data(), K, nullptr);
    wc.head_eval_forwards += K;
    out.per_class_h2[c] = sum / static_cast<double>(K);
    weighted_h2 += out.per_class_weight[c] * out.per_class_h2[c];
  }
  out.score = out.h1 - weighted_h2;
  return out;
}

}  // namespace

IGScoreResult score_candidate(const ClassifierHead& head, const FeaturePool& pool,
                              std::size_t candidate_index, const IGWeighting& weighting,
                              double step_size, const Matrix& cached_eval_penultimate,
                              const EntropySummary& h1, WorkCounters* counters) {
  const auto& unlabeled = pool.unlabeled();
  if (!std::binary_search(unlabeled.begin(), unlabeled.end(), candidate_index))
    fail_arg(strfmt("score_candidate: sample %zu is not an unlabeled candidate",
                candidate_index));
  Scratch s(head.feature_width(), head.num_classes);
  WorkCounters local;
  IGScoreResult out = score_one(head, pool, candidate_index, weighting, step_size,
                                cached_eval_penultimate, h1, s, local);
  if (counters) *counters += local;
  return out;
}

std::vector<IGScoreResult> score_pool(const ClassifierHead& head, const FeaturePool& pool,
                                      const IGWeighting& weighting, double step_size,
                                      int jobs, WorkCounters* counters) {
  const auto& candidates = pool.unlabeled();
  if (candidates.empty()) fail("score_pool: unlabeled pool is empty");
  // Validate the weighting eagerly so a missing-frequency error surfaces once,
  // before any scoring work.
  (void)class_weights(weighting, std::vector<double>(head.num_classes, 0.0),
                      head.num_classes);

  WorkCounters shared;
  const Matrix cache = penultimate_matrix(head, pool, pool.eval());
  shared.shared_forwards += cache.rows;
  const EntropySummary h1 = eval_set_entropy(head, pool, &cache);
  shared.shared_forwards += cache.rows;

  std::vector<IGScoreResult> results(candidates.size());
  const int workers = resolve_jobs(jobs);
  std::vector<WorkCounters> worker_counters(static_cast<std::size_t>(workers));
  parallel_for(candidates.size(), jobs,
               [&](std::size_t begin, std::size_t end, int worker) {
                 Scratch s(head.feature_width(), head.num_classes);
                 WorkCounters& wc = worker_counters[static_cast<std::size_t>(worker)];
                 for (std::size_t i = begin; i < end; ++i)
                   results[i] = score_one(head, pool, candidates[i], weighting,
                                          step_size, cache, h1, s, wc);
               });
  if (counters) {
    *counters += shared;
    for (const auto& wc : worker_counters) *counters += wc;
  }
  return results;
}

}  // namespace alpool
