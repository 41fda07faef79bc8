#pragma once

#include <string>
#include <vector>

#include "alpool/configfile.hpp"
#include "alpool/experiment.hpp"

namespace alpool {

// Writes an experiment's artifact files under out_dir:
//   curve.csv         one row per (repetition, round): labeled size and AUCs
//   aggregate.csv     per-round mean/std AUC and mean cumulative class counts
//   acquisitions.csv  per-round per-class acquisition counts per repetition
//   config.txt        the resolved config; re-running it reproduces the files
// plus scores_rep*_round*.csv and heads/ when the config asked for them.
// Deterministic: identical inputs produce identical bytes.
void write_results(const ExperimentResult& result, const ExperimentConfig& config,
                   const std::string& out_dir);

// Canonical `key = value` form of a config; parseable by ConfigMap and
// experiment_config_from.
std::string serialize_experiment_config(const ExperimentConfig& config);

// Builds a config from parsed keys (consuming them). Call
// map.unconsumed_keys() afterwards to reject unknown keys.
ExperimentConfig experiment_config_from(const ConfigMap& map);

struct CurveRow {
  std::size_t rep = 0;
  int round = 0;
  std::size_t labeled_count = 0;
  double labeled_percent = 0.0;
  std::size_t scored_candidates = 0;
  double valid_auc = 0.0;
  double test_auc = 0.0;
};

// Parses a curve.csv; unknown extra columns are ignored, missing required
// columns are an error naming the column.
std::vector<CurveRow> read_curve(const std::string& path);

// Reconstructs just enough per-run structure from curve rows for
// aggregate_runs (AUC statistics; no acquisition counts).
std::vector<RunRecord> runs_from_curve(const std::vector<CurveRow>& rows);

}  // namespace alpool
