#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alpool/classifier.hpp"
#include "alpool/counters.hpp"
#include "alpool/data.hpp"
#include "alpool/ig.hpp"
#include "alpool/io.hpp"
#include "alpool/strategies.hpp"

namespace alpool {

struct ExperimentConfig {
  // Dataset source: a CSV path, or a synthetic spec when the path is empty.
  std::string dataset_path;
  std::optional<SyntheticSpec> synthetic;

  StrategyKind strategy = StrategyKind::aeig;
  double seed_fraction = 0.10;
  std::size_t batch = 0;        // B, acquisitions per round
  std::size_t rounds = 0;       // J, evaluation rounds (J-1 acquisitions)
  std::size_t repetitions = 1;  // R
  std::uint64_t base_seed = 0;  // repetition r uses base_seed + r

  HeadArchitecture arch;
  TrainConfig train_config;     // its rng_seed is ignored; seeds derive per round
  double ig_step_size = 0.0005;
  std::size_t mc_samples = 20;

  int jobs = 1;                 // worker cap for candidate scoring
  bool save_heads = false;      // keep per-round trained heads in the records
  bool dump_scores = false;     // keep per-candidate scores in the records

  // All validation problems at once (empty means valid). Needs the training
  // split size for the B*(J) budget check.
  std::vector<std::string> validation_errors(std::size_t train_size) const;
};

struct RoundRecord {
  int round = 0;               // 1..J
  std::size_t labeled_count = 0;
  double labeled_percent = 0.0;     // 100 * labeled_count / train size
  double valid_auc = 0.0;
  double test_auc = 0.0;
  std::size_t scored_candidates = 0;         // 0 on the final round
  std::optional<AcquisitionRecord> acquisition;  // absent on the final round
  WorkCounters counters;
  double scoring_seconds = 0.0;  // diagnostic only; never persisted
  std::optional<ClassifierHead> head;        // when save_heads
  std::vector<IGScoreResult> ig_scores;      // when dump_scores, IG strategies
};

struct RunRecord {
  std::size_t repetition = 0;  // 1..R
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::vector<RoundRecord> rounds;
};

struct RoundAggregate {
  int round = 0;
  double labeled_percent = 0.0;
  double mean_valid_auc = 0.0, std_valid_auc = 0.0;
  double mean_test_auc = 0.0, std_test_auc = 0.0;
  std::vector<double> mean_cumulative_per_class;  // acquisition counts so far
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<RoundAggregate> aggregate;  // over successful runs only
  std::size_t failed_runs = 0;
  std::size_t train_size = 0;
  std::size_t num_classes = 0;
};

Dataset resolve_dataset(const ExperimentConfig& config);

// The J-round protocol across R seeded repetitions: each round cold-start
// trains on the labeled set and measures macro OVR AUC on the validation and
// test splits; every round but the last then scores the unlabeled pool,
// selects B samples, and reveals their labels. A repetition that throws is
// flagged and excluded from aggregates; the rest continue.
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& ds);

// Aggregates recomputed from per-run records (used when merging stored runs).
std::vector<RoundAggregate> aggregate_runs(const std::vector<RunRecord>& runs);

// Smallest labeled percent whose mean test AUC reaches `target`; with
// `interpolate`, the linear crossing point between the two straddling rounds.
// Empty when the curve never reaches the target.
std::optional<double> percent_to_target(const std::vector<RoundAggregate>& aggregate,
                                        double target, bool interpolate = false);

struct FullDataReference {
  double mean_valid_auc = 0.0;
  double mean_test_auc = 0.0;
  std::vector<double> per_rep_test_auc;
};

// Trains on the fully labeled training split once per repetition seed; its
// mean test AUC is the reference whose 0.95 multiple defines the label-
// efficiency threshold.
FullDataReference full_data_reference(const ExperimentConfig& config, const Dataset& ds);

// Macro OVR AUC of the head's deterministic predictions over one split.
AucResult auc_on_split(const ClassifierHead& head, const Dataset& ds, Split split);

}  // namespace alpool
