#include "alpool/strategies.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "alpool/kernels.hpp"
#include "alpool/metrics.hpp"
#include "alpool/parallel.hpp"
#include "alpool/util.hpp"

namespace alpool {

const char* strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::random_sampling: return "random";
    case StrategyKind::entropy: return "entropy";
    case StrategyKind::mcd_entropy: return "mcdentropy";
    case StrategyKind::mcd_bald: return "mcdbald";
    case StrategyKind::coreset: return "coreset";
    case StrategyKind::eig: return "eig";
    case StrategyKind::uig: return "uig";
    case StrategyKind::cfig: return "cfig";
    case StrategyKind::aeig: return "aeig";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(const std::string& name) {
  std::string canon;
  for (char ch : name) {
    if (ch == '-' || ch == '_') continue;
    canon += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  for (StrategyKind kind : all_strategies())
    if (canon == strategy_name(kind)) return kind;
  return std::nullopt;
}

std::vector<StrategyKind> all_strategies() {
  return {StrategyKind::random_sampling, StrategyKind::entropy, StrategyKind::mcd_entropy,
          StrategyKind::mcd_bald, StrategyKind::coreset, StrategyKind::eig,
          StrategyKind::uig, StrategyKind::cfig, StrategyKind::aeig};
}

bool strategy_uses_ig(StrategyKind kind) {
  return kind == StrategyKind::eig || kind == StrategyKind::uig ||
         kind == StrategyKind::cfig || kind == StrategyKind::aeig;
}

IGKind ig_kind_of(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::eig: return IGKind::predicted;
    case StrategyKind::uig: return IGKind::uniform;
    case StrategyKind::cfig: return IGKind::frequency;
    case StrategyKind::aeig: return IGKind::predicted_times_frequency;
    default: fail("ig_kind_of: not an information-gain strategy");
  }
}

double entropy_score(const ClassifierHead& head, std::span<const double> x) {
  return shannon_entropy(predict_proba(head, x));
}

namespace {

// Runs T dropout-active forwards; returns the mean distribution and the mean
// entropy of the individual draws.
void mcd_draws(const ClassifierHead& head, std::span<const double> x,
               std::size_t mc_samples, Rng& rng, std::vector<double>& mean_probs,
               double& mean_draw_entropy) {
  if (mc_samples == 0) fail_arg("mcd: mc_samples must be >= 1");
  mean_probs.assign(head.num_classes, 0.0);
  mean_draw_entropy = 0.0;
  for (std::size_t t = 0; t < mc_samples; ++t) {
    const std::vector<double> probs = predict_proba(head, x, true, &rng);
    for (std::size_t c = 0; c < head.num_classes; ++c) mean_probs[c] += probs[c];
    mean_draw_entropy += shannon_entropy(probs);
  }
  const double inv = 1.0 / static_cast<double>(mc_samples);
  for (double& v : mean_probs) v *= inv;
  mean_draw_entropy *= inv;
}

}  // namespace

double mcd_entropy_score(const ClassifierHead& head, std::span<const double> x,
                         std::size_t mc_samples, Rng& rng) {
  std::vector<double> mean_probs;
  double mean_ent = 0.0;
  mcd_draws(head, x, mc_samples, rng, mean_probs, mean_ent);
  return shannon_entropy(mean_probs);
}

double mcd_bald_score(const ClassifierHead& head, std::span<const double> x,
                      std::size_t mc_samples, Rng& rng) {
  std::vector<double> mean_probs;
  double mean_ent = 0.0;
  mcd_draws(head, x, mc_samples, rng, mean_probs, mean_ent);
  return shannon_entropy(mean_probs) - mean_ent;
}

std::vector<std::size_t> coreset_select(const Matrix& center_emb,
                                        const Matrix& candidate_emb,
                                        const std::vector<std::size_t>& candidate_ids,
                                        std::size_t batch, int jobs,
                                        WorkCounters* counters) {
  const std::size_t n = candidate_ids.size();
  if (candidate_emb.rows != n)
    fail(strfmt("coreset: %zu embeddings for %zu candidates", candidate_emb.rows, n));
  if (batch > n)
    fail(strfmt("coreset: batch %zu exceeds candidate count %zu", batch, n));
  if (center_emb.rows > 0 && center_emb.cols != candidate_emb.cols)
    fail("coreset: center and candidate embedding widths differ");
  const std::size_t dim = candidate_emb.cols;
  const kernels::Ops& ops = kernels::active();

  // Squared distance from each candidate to its nearest center so far.
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  std::uint64_t dist_evals = 0;
  if (center_emb.rows > 0) {
    parallel_for(n, jobs, [&](std::size_t begin, std::size_t end, int) {
      for (std::size_t i = begin; i < end; ++i) {
        double best = min_d2[i];
        for (std::size_t m = 0; m < center_emb.rows; ++m) {
          const double d2 =
              ops.squared_distance(candidate_emb.row(i), center_emb.row(m), dim);
          best = std::min(best, d2);
        }
        min_d2[i] = best;
      }
    });
    dist_evals += static_cast<std::uint64_t>(n) * center_emb.rows;
  }

  std::vector<char> picked(n, 0);
  std::vector<std::size_t> selected;
  selected.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    // Farthest-first pick; ties resolved toward the lowest candidate id, so
    // the result cannot depend on scan order.
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (picked[i]) continue;
      if (best == n || min_d2[i] > min_d2[best] ||
          (min_d2[i] == min_d2[best] && candidate_ids[i] < candidate_ids[best]))
        best = i;
    }
    picked[best] = 1;
    selected.push_back(candidate_ids[best]);
    if (b + 1 == batch) break;
    const double* chosen = candidate_emb.row(best);
    parallel_for(n, jobs, [&](std::size_t begin, std::size_t end, int) {
      for (std::size_t i = begin; i < end; ++i) {
        if (picked[i]) continue;
        const double d2 = ops.squared_distance(candidate_emb.row(i), chosen, dim);
        min_d2[i] = std::min(min_d2[i], d2);
      }
    });
    dist_evals += static_cast<std::uint64_t>(n) - (b + 1);
  }
  if (counters) counters->distance_evals += dist_evals;
  return selected;
}

std::vector<std::size_t> select_top_b(const std::vector<double>& scores,
                                      const std::vector<std::size_t>& ids,
                                      std::size_t batch) {
  if (scores.size() != ids.size())
    fail_arg(strfmt("select_top_b: %zu scores for %zu ids", scores.size(), ids.size()));
  if (batch == 0) fail_arg("select_top_b: batch must be positive");
  if (batch > ids.size())
    fail_arg(strfmt("select_top_b: batch %zu exceeds pool size %zu", batch, ids.size()));
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (!std::isfinite(scores[i]))
      fail_arg(strfmt("select_top_b: non-finite score %g for sample %zu", scores[i], ids[i]));

  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  std::vector<std::size_t> out(batch);
  for (std::size_t k = 0; k < batch; ++k) out[k] = ids[order[k]];
  return out;
}

SelectionResult run_strategy(StrategyKind kind, const ClassifierHead& head,
                             const FeaturePool& pool, const StrategyParams& params) {
  const auto& candidates = pool.unlabeled();
  if (params.batch == 0) fail_arg("run_strategy: batch must be positive");
  if (params.batch > candidates.size())
    fail_arg(strfmt("run_strategy: batch %zu exceeds unlabeled pool size %zu", params.batch,
                    candidates.size()));

  SelectionResult res;
  const auto t0 = std::chrono::steady_clock::now();

  switch (kind) {
    case StrategyKind::random_sampling: {
      std::vector<std::size_t> draw(candidates.begin(), candidates.end());
      Rng rng(derive_seed(params.rng_seed, "random"));
      rng.partial_shuffle(draw, params.batch);
      draw.resize(params.batch);
      res.selected = std::move(draw);
      break;
    }
    case StrategyKind::entropy: {
      res.scores.resize(candidates.size());
      std::vector<WorkCounters> wc(static_cast<std::size_t>(resolve_jobs(params.jobs)));
      parallel_for(candidates.size(), params.jobs,
                   [&](std::size_t begin, std::size_t end, int worker) {
                     for (std::size_t i = begin; i < end; ++i) {
                       res.scores[i] = entropy_score(head, pool.features(candidates[i]));
                       wc[static_cast<std::size_t>(worker)].candidate_forwards += 1;
                     }
                   });
      for (const auto& c : wc) res.counters += c;
      res.selected = select_top_b(res.scores, candidates, params.batch);
      break;
    }
    case StrategyKind::mcd_entropy:
    case StrategyKind::mcd_bald: {
      if (params.mc_samples == 0) fail_arg("run_strategy: mc_samples must be >= 1");
      if (head.dropout_rate == 0.0)
        res.warnings.push_back(
            "dropout rate is 0: every stochastic draw equals the deterministic forward, "
            "so this strategy degenerates (entropy ranking / all-zero mutual information)");
      res.scores.resize(candidates.size());
      std::vector<WorkCounters> wc(static_cast<std::size_t>(resolve_jobs(params.jobs)));
      parallel_for(candidates.size(), params.jobs,
                   [&](std::size_t begin, std::size_t end, int worker) {
                     for (std::size_t i = begin; i < end; ++i) {
                       // Per-candidate stream keyed by the sample id, so scores
                       // do not depend on the worker layout.
                       Rng rng(derive_seed(params.rng_seed, "mcd", candidates[i]));
                       const auto x = pool.features(candidates[i]);
                       res.scores[i] =
                           kind == StrategyKind::mcd_entropy
                               ? mcd_entropy_score(head, x, params.mc_samples, rng)
                               : mcd_bald_score(head, x, params.mc_samples, rng);
                       wc[static_cast<std::size_t>(worker)].mc_forwards +=
                           params.mc_samples;
                     }
                   });
      for (const auto& c : wc) res.counters += c;
      res.selected = select_top_b(res.scores, candidates, params.batch);
      break;
    }
    case StrategyKind::coreset: {
      const Matrix centers = penultimate_matrix(head, pool, pool.labeled());
      const Matrix cands = penultimate_matrix(head, pool, candidates);
      res.counters.shared_forwards += centers.rows;
      res.counters.candidate_forwards += cands.rows;
      res.selected = coreset_select(centers, cands, candidates, params.batch,
                                    params.jobs, &res.counters);
      break;
    }
    case StrategyKind::eig:
    case StrategyKind::uig:
    case StrategyKind::cfig:
    case StrategyKind::aeig: {
      IGWeighting weighting;
      weighting.kind = ig_kind_of(kind);
      if (weighting.kind == IGKind::predicted_times_frequency ||
          weighting.kind == IGKind::frequency)
        weighting.frequencies = eval_class_frequencies(pool);
      std::vector<IGScoreResult> results = score_pool(head, pool, weighting,
                                                      params.ig_step_size, params.jobs,
                                                      &res.counters);
      res.scores.resize(results.size());
      for (std::size_t i = 0; i < results.size(); ++i) res.scores[i] = results[i].score;
      res.selected = select_top_b(res.scores, candidates, params.batch);
      if (params.collect_ig_details) res.ig_details = std::move(results);
      break;
    }
  }

  res.scoring_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace alpool
