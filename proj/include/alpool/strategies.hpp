#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alpool/classifier.hpp"
#include "alpool/counters.hpp"
#include "alpool/data.hpp"
#include "alpool/ig.hpp"

namespace alpool {

enum class StrategyKind {
  random_sampling,
  entropy,
  mcd_entropy,
  mcd_bald,
  coreset,
  eig,
  uig,
  cfig,
  aeig,
};

// Canonical identifier (the accepted config/CLI spelling, lowercase).
const char* strategy_name(StrategyKind kind);
// Case-insensitive; returns nullopt for unknown names.
std::optional<StrategyKind> parse_strategy(const std::string& name);
std::vector<StrategyKind> all_strategies();

bool strategy_uses_ig(StrategyKind kind);
IGKind ig_kind_of(StrategyKind kind);  // valid only when strategy_uses_ig

// Entropy of the deterministic predictive distribution.
double entropy_score(const ClassifierHead& head, std::span<const double> x);

// Entropy of the mean of T dropout-active predictive distributions.
double mcd_entropy_score(const ClassifierHead& head, std::span<const double> x,
                         std::size_t mc_samples, Rng& rng);

// H(mean of draws) - mean(H(draw)): the mutual information between the
// prediction and the dropout mask, from the same T draws.
double mcd_bald_score(const ClassifierHead& head, std::span<const double> x,
                      std::size_t mc_samples, Rng& rng);

// k-center greedy: B times, pick the candidate farthest (Euclidean, compared
// squared) from its nearest center, starting from the rows of `center_emb`;
// distance ties select the lowest candidate id. Returns candidate ids in
// pick order.
std::vector<std::size_t> coreset_select(const Matrix& center_emb,
                                        const Matrix& candidate_emb,
                                        const std::vector<std::size_t>& candidate_ids,
                                        std::size_t batch, int jobs = 1,
                                        WorkCounters* counters = nullptr);

// Ids of the `batch` highest scores, ties broken by ascending id; result
// ordered by descending score. scores[i] belongs to ids[i].
std::vector<std::size_t> select_top_b(const std::vector<double>& scores,
                                      const std::vector<std::size_t>& ids,
                                      std::size_t batch);

struct StrategyParams {
  std::size_t batch = 0;           // B, samples to select
  std::size_t mc_samples = 20;     // T, dropout draws for MCD strategies
  double ig_step_size = 0.0005;
  int jobs = 1;
  std::uint64_t rng_seed = 0;      // drives Random draws and MCD dropout masks
  bool collect_ig_details = false; // keep per-candidate IGScoreResults
};

struct SelectionResult {
  std::vector<std::size_t> selected;       // B ids, selection order
  std::vector<double> scores;              // per pool.unlabeled() entry; empty for Random/CoreSet
  std::vector<IGScoreResult> ig_details;   // populated for IG kinds when requested
  WorkCounters counters;
  double scoring_seconds = 0.0;
  std::vector<std::string> warnings;
};

// Scores the unlabeled pool with the given strategy and picks B samples.
// Deterministic for a fixed (strategy, head, pool, params) — the job count
// never changes the outcome.
SelectionResult run_strategy(StrategyKind kind, const ClassifierHead& head,
                             const FeaturePool& pool, const StrategyParams& params);

}  // namespace alpool
