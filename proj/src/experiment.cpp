#include "alpool/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alpool/metrics.hpp"
#include "alpool/util.hpp"

namespace alpool {

std::vector<std::string> ExperimentConfig::validation_errors(std::size_t train_size) const {
  std::vector<std::string> errors;
  if (!(seed_fraction > 0.0 && seed_fraction < 1.0))
    errors.push_back(strfmt("seed_fraction %g must be in (0,1)", seed_fraction));
  if (batch == 0) errors.push_back("batch must be positive");
  if (rounds == 0) errors.push_back("rounds must be positive");
  if (repetitions == 0) errors.push_back("repetitions must be positive");
  if (!(ig_step_size >= 0.0) || !std::isfinite(ig_step_size))
    errors.push_back("ig_step_size must be non-negative and finite");
  if (mc_samples == 0) errors.push_back("mc_samples must be positive");
  if (!(arch.dropout_rate >= 0.0 && arch.dropout_rate < 1.0))
    errors.push_back(strfmt("dropout rate %g must be in [0,1)", arch.dropout_rate));
  try {
    train_config.validate();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  if (train_size > 0 && seed_fraction > 0.0 && seed_fraction < 1.0) {
    const std::size_t seeded =
        static_cast<std::size_t>(seed_fraction * static_cast<double>(train_size));
    const std::size_t initial_unlabeled = train_size - seeded;
    if (batch * rounds > initial_unlabeled)
      errors.push_back(
          strfmt("budget batch*rounds = %zu exceeds the initial unlabeled pool of %zu "
                 "(train %zu, seeded %zu)",
                 batch * rounds, initial_unlabeled, train_size, seeded));
  }
  return errors;
}

Dataset resolve_dataset(const ExperimentConfig& config) {
  if (!config.dataset_path.empty()) return load_dataset(config.dataset_path);
  if (config.synthetic) return generate_synthetic(*config.synthetic);
  fail("experiment config names neither a dataset path nor a synthetic spec");
}

AucResult auc_on_split(const ClassifierHead& head, const Dataset& ds, Split split) {
  const auto indices = ds.indices_of(split);
  if (indices.empty()) fail(strfmt("auc_on_split: %s split is empty", split_name(split)));
  Matrix probs(indices.size(), ds.num_classes);
  std::vector<int> labels(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::vector<double> p =
        predict_proba(head, std::span<const double>(ds.features.row(indices[k]), ds.dim));
    std::copy(p.begin(), p.end(), probs.row(k));
    labels[k] = ds.labels[indices[k]];
  }
  return macro_ovr_auc(probs, labels);
}

namespace {

RunRecord run_one_repetition(const ExperimentConfig& config, const Dataset& ds,
                             std::size_t rep_id) {
  RunRecord run;
  run.repetition = rep_id;
  run.seed = config.base_seed + (rep_id - 1);

  const std::size_t train_size = ds.indices_of(Split::train).size();
  FeaturePool pool = initialize_pool(ds, config.seed_fraction, run.seed);
  const std::size_t seeded = pool.labeled().size();

  for (std::size_t j = 1; j <= config.rounds; ++j) {
    RoundRecord round;
    round.round = static_cast<int>(j);
    round.labeled_count = pool.labeled().size();
    round.labeled_percent =
        100.0 * static_cast<double>(round.labeled_count) / static_cast<double>(train_size);

    TrainConfig tc = config.train_config;
    tc.rng_seed = derive_seed(run.seed, "train", j);
    const ClassifierHead head = train(pool, config.arch, tc);
    round.valid_auc = auc_on_split(head, ds, Split::valid).macro_auc;
    round.test_auc = auc_on_split(head, ds, Split::test).macro_auc;
    if (config.save_heads) round.head = head;

    if (j < config.rounds) {
      StrategyParams params;
      params.batch = config.batch;
      params.mc_samples = config.mc_samples;
      params.ig_step_size = config.ig_step_size;
      params.jobs = config.jobs;
      params.rng_seed = derive_seed(run.seed, "score", j);
      params.collect_ig_details = config.dump_scores;

      round.scored_candidates = pool.unlabeled().size();
      SelectionResult sel = run_strategy(config.strategy, head, pool, params);
      round.counters = sel.counters;
      round.scoring_seconds = sel.scoring_seconds;
      round.ig_scores = std::move(sel.ig_details);
      round.acquisition = pool.apply_acquisition(sel.selected);

      // Pool accounting must hold exactly after every acquisition.
      if (pool.labeled().size() != seeded + j * config.batch ||
          pool.unlabeled().size() != train_size - seeded - j * config.batch)
        fail(strfmt("round %zu: pool accounting violated (labeled %zu, unlabeled %zu)",
                    j, pool.labeled().size(), pool.unlabeled().size()));
    }
    run.rounds.push_back(std::move(round));
  }
  return run;
}

double population_std(const std::vector<double>& values, double mean) {
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace

std::vector<RoundAggregate> aggregate_runs(const std::vector<RunRecord>& runs) {
  std::vector<const RunRecord*> ok;
  for (const auto& run : runs)
    if (!run.failed) ok.push_back(&run);
  if (ok.empty()) fail("aggregate_runs: no successful repetitions to aggregate");

  const std::size_t rounds = ok.front()->rounds.size();
  for (const auto* run : ok)
    if (run->rounds.size() != rounds)
      fail("aggregate_runs: repetitions disagree on the number of rounds");

  std::vector<RoundAggregate> aggregate(rounds);
  for (std::size_t j = 0; j < rounds; ++j) {
    RoundAggregate& agg = aggregate[j];
    agg.round = ok.front()->rounds[j].round;
    agg.labeled_percent = ok.front()->rounds[j].labeled_percent;

    std::vector<double> valid, test;
    for (const auto* run : ok) {
      valid.push_back(run->rounds[j].valid_auc);
      test.push_back(run->rounds[j].test_auc);
    }
    agg.mean_valid_auc = std::accumulate(valid.begin(), valid.end(), 0.0) /
                         static_cast<double>(valid.size());
    agg.mean_test_auc = std::accumulate(test.begin(), test.end(), 0.0) /
                        static_cast<double>(test.size());
    agg.std_valid_auc = population_std(valid, agg.mean_valid_auc);
    agg.std_test_auc = population_std(test, agg.mean_test_auc);

    // Mean cumulative per-class acquisition counts at this round; rounds
    // without an acquisition inherit the previous cumulative state.
    std::vector<double> cum;
    for (const auto* run : ok) {
      const std::vector<std::size_t>* counts = nullptr;
      for (std::size_t i = 0; i <= j; ++i)
        if (run->rounds[i].acquisition)
          counts = &run->rounds[i].acquisition->cumulative_per_class_counts;
      if (counts == nullptr) continue;
      if (cum.empty()) cum.assign(counts->size(), 0.0);
      for (std::size_t c = 0; c < counts->size(); ++c)
        cum[c] += static_cast<double>((*counts)[c]);
    }
    for (double& v : cum) v /= static_cast<double>(ok.size());
    agg.mean_cumulative_per_class = std::move(cum);
  }
  return aggregate;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& ds) {
  const std::size_t train_size = ds.indices_of(Split::train).size();
  const auto errors = config.validation_errors(train_size);
  if (!errors.empty()) {
    std::string joined = "invalid experiment config:";
    for (const auto& e : errors) joined += "\n  - " + e;
    fail(joined);
  }

  ExperimentResult result;
  result.train_size = train_size;
  result.num_classes = ds.num_classes;
  for (std::size_t r = 1; r <= config.repetitions; ++r) {
    try {
      result.runs.push_back(run_one_repetition(config, ds, r));
    } catch (const std::exception& e) {
      RunRecord failed;
      failed.repetition = r;
      failed.seed = config.base_seed + (r - 1);
      failed.failed = true;
      failed.error = e.what();
      result.runs.push_back(std::move(failed));
      ++result.failed_runs;
    }
  }
  if (result.failed_runs < result.runs.size())
    result.aggregate = aggregate_runs(result.runs);
  return result;
}

std::optional<double> percent_to_target(const std::vector<RoundAggregate>& aggregate,
                                        double target, bool interpolate) {
  if (aggregate.empty()) fail("percent_to_target: empty aggregate");
  if (!std::isfinite(target)) fail_arg("percent_to_target: target must be finite");
  for (std::size_t j = 0; j < aggregate.size(); ++j) {
    if (aggregate[j].mean_test_auc < target) continue;
    if (interpolate && j > 0) {
      const RoundAggregate& lo = aggregate[j - 1];
      const RoundAggregate& hi = aggregate[j];
      const double rise = hi.mean_test_auc - lo.mean_test_auc;
      if (rise > 0.0)
        return lo.labeled_percent +
               (target - lo.mean_test_auc) * (hi.labeled_percent - lo.labeled_percent) / rise;
    }
    return aggregate[j].labeled_percent;
  }
  return std::nullopt;
}

FullDataReference full_data_reference(const ExperimentConfig& config, const Dataset& ds) {
  FullDataReference ref;
  double valid_sum = 0.0, test_sum = 0.0;
  for (std::size_t r = 1; r <= config.repetitions; ++r) {
    const std::uint64_t seed = config.base_seed + (r - 1);
    FeaturePool pool(ds);
    const std::vector<std::size_t> whole_pool = pool.unlabeled();
    pool.apply_acquisition(whole_pool);  // reveal the whole training split
    TrainConfig tc = config.train_config;
    tc.rng_seed = derive_seed(seed, "train_full");
    const ClassifierHead head = train(pool, config.arch, tc);
    const double valid = auc_on_split(head, ds, Split::valid).macro_auc;
    const double test = auc_on_split(head, ds, Split::test).macro_auc;
    valid_sum += valid;
    test_sum += test;
    ref.per_rep_test_auc.push_back(test);
  }
  ref.mean_valid_auc = valid_sum / static_cast<double>(config.repetitions);
  ref.mean_test_auc = test_sum / static_cast<double>(config.repetitions);
  return ref;
}

}  // namespace alpool
