#pragma once

#include <cstdint>

namespace alpool {

// Tallies of the distinct kinds of model work done while scoring a candidate
// pool. "Forward" means one full input->probability pass through the model;
// "head eval forward" means one output-layer-only pass over a cached
// penultimate activation.
struct WorkCounters {
  std::uint64_t candidate_forwards = 0;  // full forwards over pool candidates
  std::uint64_t head_eval_forwards = 0;  // output-layer sweeps over eval activations
  std::uint64_t gradient_steps = 0;      // single-example output-layer updates
  std::uint64_t mc_forwards = 0;         // stochastic (dropout-active) forwards
  std::uint64_t distance_evals = 0;      // pairwise distance computations
  std::uint64_t shared_forwards = 0;     // per-pass shared work (eval cache, base entropy)

  WorkCounters& operator+=(const WorkCounters& o) {
    candidate_forwards += o.candidate_forwards;
    head_eval_forwards += o.head_eval_forwards;
    gradient_steps += o.gradient_steps;
    mc_forwards += o.mc_forwards;
    distance_evals += o.distance_evals;
    shared_forwards += o.shared_forwards;
    return *this;
  }

  bool operator==(const WorkCounters&) const = default;
};

}  // namespace alpool
