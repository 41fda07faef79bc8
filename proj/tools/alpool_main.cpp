// alpool: pool-based active-learning experiments with information-gain
// acquisition. Subcommands: generate, run, compare, bench, report.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alpool/configfile.hpp"
#include "alpool/experiment.hpp"
#include "alpool/io.hpp"
#include "alpool/kernels.hpp"
#include "alpool/metrics.hpp"
#include "alpool/results.hpp"
#include "alpool/strategies.hpp"
#include "alpool/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string strategy;
  std::string kernels = "auto";
  int jobs = 0;  // 0 = all cores
  bool json_summary = false;
  std::optional<std::uint64_t> seed;
};

void apply_kernels_flag(const std::string& name) {
  if (!alpool::kernels::select(name)) {
    std::string names = "auto";
    for (const auto* ops : alpool::kernels::available())
      names += std::string(", ") + ops->name;
    alpool::fail(alpool::strfmt("kernel lane '%s' is not available (choose from: %s)",
                                name.c_str(), names.c_str()));
  }
}

std::string resolve_out_dir(const CommonFlags& flags, const alpool::ConfigMap& cfg,
                            const std::string& fallback) {
  if (!flags.out_dir.empty()) return flags.out_dir;
  const std::string from_cfg = cfg.get_string("output.dir", "");
  if (!from_cfg.empty()) return from_cfg;
  if (const char* env = std::getenv("ALPOOL_OUT"); env && *env) return env;
  return fallback;
}

alpool::ConfigMap load_config(const CommonFlags& flags) {
  alpool::ConfigMap cfg;
  if (!flags.config_path.empty()) cfg = alpool::ConfigMap::parse_file(flags.config_path);
  if (!flags.strategy.empty()) cfg.set("strategy", flags.strategy);
  if (flags.seed) cfg.set("base_seed", std::to_string(*flags.seed));
  return cfg;
}

// Enumerate every config problem at once; throw if any.
void reject_bad_config(const alpool::ExperimentConfig& config,
                       const alpool::ConfigMap& cfg, std::size_t train_size) {
  std::vector<std::string> errors = config.validation_errors(train_size);
  for (const auto& key : cfg.unconsumed_keys())
    errors.push_back("unknown config key '" + key + "'");
  if (errors.empty()) return;
  std::string joined = "invalid configuration:";
  for (const auto& e : errors) joined += "\n  - " + e;
  alpool::fail(joined);
}

json aggregate_to_json(const std::vector<alpool::RoundAggregate>& aggregate) {
  json rows = json::array();
  for (const auto& agg : aggregate) {
    rows.push_back({{"round", agg.round},
                    {"labeled_pct", agg.labeled_percent},
                    {"mean_valid_auc", agg.mean_valid_auc},
                    {"std_valid_auc", agg.std_valid_auc},
                    {"mean_test_auc", agg.mean_test_auc},
                    {"std_test_auc", agg.std_test_auc},
                    {"mean_cumulative_per_class", agg.mean_cumulative_per_class}});
  }
  return rows;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) alpool::fail(alpool::strfmt("cannot write '%s'", path.string().c_str()));
  out << j.dump(2) << '\n';
}

void print_aggregate_table(std::ostream& os, const std::string& name,
                           const std::vector<alpool::RoundAggregate>& aggregate) {
  os << "strategy " << name << ": mean +- std macro AUC (test split)\n";
  os << alpool::strfmt("%-6s %-12s %-20s %-20s\n", "round", "labeled%", "valid_auc",
                       "test_auc");
  for (const auto& agg : aggregate)
    os << alpool::strfmt("%-6d %-12.2f %.4f +- %-10.4f %.4f +- %-10.4f\n", agg.round,
                         agg.labeled_percent, agg.mean_valid_auc, agg.std_valid_auc,
                         agg.mean_test_auc, agg.std_test_auc);
}

alpool::SyntheticSpec synthetic_spec_from_cli(const std::string& preset,
                                              alpool::ConfigMap& cfg,
                                              std::optional<std::uint64_t> seed) {
  if (!preset.empty()) cfg.set("dataset.preset", preset);
  if (seed) cfg.set("dataset.seed", std::to_string(*seed));
  alpool::ExperimentConfig probe = alpool::experiment_config_from(cfg);
  if (!probe.synthetic)
    alpool::fail("no synthetic dataset specified: pass --preset or dataset.* config keys");
  return *probe.synthetic;
}

int cmd_generate(const CommonFlags& flags, const std::string& preset,
                 const std::string& out_path) {
  alpool::ConfigMap cfg = load_config(flags);
  const alpool::SyntheticSpec spec = synthetic_spec_from_cli(preset, cfg, flags.seed);
  cfg.get_string("output.dir", "");  // legitimate key, unused here
  if (const auto unknown = cfg.unconsumed_keys(); !unknown.empty()) {
    std::string joined = "invalid configuration:";
    for (const auto& key : unknown) joined += "\n  - unknown config key '" + key + "'";
    alpool::fail(joined);
  }
  const alpool::Dataset ds = alpool::generate_synthetic(spec);
  alpool::save_dataset(ds, out_path);

  std::cout << "wrote " << ds.size() << " samples to " << out_path << "\n";
  std::cout << alpool::strfmt("%-8s", "class");
  for (std::size_t c = 0; c < ds.num_classes; ++c) std::cout << alpool::strfmt("%8zu", c);
  std::cout << "\n";
  for (const alpool::Split split :
       {alpool::Split::train, alpool::Split::valid, alpool::Split::test}) {
    const auto counts = ds.class_counts(split);
    std::cout << alpool::strfmt("%-8s", alpool::split_name(split));
    for (std::size_t c = 0; c < ds.num_classes; ++c)
      std::cout << alpool::strfmt("%8zu", counts[c]);
    std::cout << "\n";
  }
  if (flags.json_summary) {
    json j{{"command", "generate"},
           {"path", out_path},
           {"samples", ds.size()},
           {"num_classes", ds.num_classes},
           {"dim", ds.dim}};
    for (const alpool::Split split :
         {alpool::Split::train, alpool::Split::valid, alpool::Split::test})
      j["class_counts"][alpool::split_name(split)] = ds.class_counts(split);
    write_json_file(fs::path(out_path).parent_path() / "generate_summary.json", j);
  }
  return 0;
}

json run_summary_json(const alpool::ExperimentConfig& config,
                      const alpool::ExperimentResult& result) {
  json failures = json::array();
  for (const auto& run : result.runs)
    if (run.failed)
      failures.push_back({{"rep", run.repetition}, {"error", run.error}});
  return json{{"strategy", alpool::strategy_name(config.strategy)},
              {"repetitions", config.repetitions},
              {"rounds", config.rounds},
              {"batch", config.batch},
              {"train_size", result.train_size},
              {"failed_runs", failures},
              {"aggregate", aggregate_to_json(result.aggregate)}};
}

int cmd_run(const CommonFlags& flags) {
  alpool::ConfigMap cfg = load_config(flags);
  alpool::ExperimentConfig config = alpool::experiment_config_from(cfg);
  config.jobs = flags.jobs;
  const std::string out_dir = resolve_out_dir(flags, cfg, "alpool-results");

  const alpool::Dataset ds = alpool::resolve_dataset(config);
  reject_bad_config(config, cfg, ds.indices_of(alpool::Split::train).size());

  const alpool::ExperimentResult result = alpool::run_experiment(config, ds);
  alpool::write_results(result, config, out_dir);

  for (const auto& run : result.runs)
    if (run.failed)
      std::cerr << "warning: repetition " << run.repetition << " failed: " << run.error
                << "\n";
  print_aggregate_table(std::cout, alpool::strategy_name(config.strategy),
                        result.aggregate);
  std::cout << "results written to " << out_dir << "\n";
  if (flags.json_summary) {
    json j = run_summary_json(config, result);
    j["command"] = "run";
    j["out_dir"] = out_dir;
    write_json_file(fs::path(out_dir) / "summary.json", j);
  }
  return result.failed_runs == 0 ? 0 : 1;
}

int cmd_compare(const CommonFlags& flags, const std::string& strategies_flag) {
  alpool::ConfigMap cfg = load_config(flags);
  std::string list = strategies_flag;
  if (list.empty()) list = cfg.get_string("strategies", "");
  if (list.empty()) alpool::fail("compare needs --strategies or a 'strategies' config key");

  std::vector<alpool::StrategyKind> kinds;
  std::istringstream ss(list);
  std::string token;
  while (ss >> token) {
    if (const auto kind = alpool::parse_strategy(token))
      kinds.push_back(*kind);
    else
      alpool::fail(alpool::strfmt("unknown strategy '%s'", token.c_str()));
  }

  alpool::ExperimentConfig base = alpool::experiment_config_from(cfg);
  base.jobs = flags.jobs;
  const std::string out_dir = resolve_out_dir(flags, cfg, "alpool-compare");
  const alpool::Dataset ds = alpool::resolve_dataset(base);
  reject_bad_config(base, cfg, ds.indices_of(alpool::Split::train).size());

  // Shared seeds and pools across strategies: only the selection rule varies.
  std::map<alpool::StrategyKind, alpool::ExperimentResult> results;
  for (const alpool::StrategyKind kind : kinds) {
    alpool::ExperimentConfig config = base;
    config.strategy = kind;
    alpool::ExperimentResult result = alpool::run_experiment(config, ds);
    alpool::write_results(result, config,
                          (fs::path(out_dir) / alpool::strategy_name(kind)).string());
    for (const auto& run : result.runs)
      if (run.failed)
        std::cerr << "warning: " << alpool::strategy_name(kind) << " repetition "
                  << run.repetition << " failed: " << run.error << "\n";
    results.emplace(kind, std::move(result));
  }

  const alpool::FullDataReference ref = alpool::full_data_reference(base, ds);
  const double threshold = 0.95 * ref.mean_test_auc;

  std::cout << "mean test macro AUC by labeled fraction\n";
  std::cout << alpool::strfmt("%-12s", "labeled%");
  const auto& first_agg = results.at(kinds.front()).aggregate;
  for (const auto& agg : first_agg) std::cout << alpool::strfmt("%10.2f", agg.labeled_percent);
  std::cout << alpool::strfmt("  %-12s", "all-95%");
  std::cout << "\n";
  json jstrategies = json::object();
  for (const alpool::StrategyKind kind : kinds) {
    const auto& result = results.at(kind);
    std::cout << alpool::strfmt("%-12s", alpool::strategy_name(kind));
    for (const auto& agg : result.aggregate)
      std::cout << alpool::strfmt("%10.4f", agg.mean_test_auc);
    const auto reached = alpool::percent_to_target(result.aggregate, threshold, false);
    if (reached)
      std::cout << alpool::strfmt("  %.2f%%", *reached);
    else
      std::cout << "  not reached";
    std::cout << "\n";
    json entry = run_summary_json(
        [&] {
          alpool::ExperimentConfig c = base;
          c.strategy = kind;
          return c;
        }(),
        result);
    entry["percent_to_all95"] =
        reached ? json(*reached) : json("not reached");
    jstrategies[alpool::strategy_name(kind)] = std::move(entry);
  }
  std::cout << alpool::strfmt(
      "full-data reference: %.4f test macro AUC (all-95%% threshold %.4f)\n",
      ref.mean_test_auc, threshold);
  std::cout << "results written to " << out_dir << "\n";

  if (flags.json_summary) {
    json j{{"command", "compare"},
           {"out_dir", out_dir},
           {"full_data_test_auc", ref.mean_test_auc},
           {"all95_threshold", threshold},
           {"strategies", std::move(jstrategies)}};
    write_json_file(fs::path(out_dir) / "summary.json", j);
  }
  return 0;
}

int cmd_bench(const CommonFlags& flags, const std::string& strategies_flag) {
  alpool::ConfigMap cfg = load_config(flags);
  std::string list = strategies_flag;
  if (list.empty()) list = cfg.get_string("strategies", "");
  alpool::ExperimentConfig config = alpool::experiment_config_from(cfg);
  config.jobs = flags.jobs;
  const std::string out_dir = resolve_out_dir(flags, cfg, ".");
  const alpool::Dataset ds = alpool::resolve_dataset(config);
  reject_bad_config(config, cfg, ds.indices_of(alpool::Split::train).size());

  std::vector<alpool::StrategyKind> kinds = alpool::all_strategies();
  if (!list.empty()) {
    kinds.clear();
    std::istringstream ss(list);
    std::string token;
    while (ss >> token) {
      if (const auto kind = alpool::parse_strategy(token))
        kinds.push_back(*kind);
      else
        alpool::fail(alpool::strfmt("unknown strategy '%s'", token.c_str()));
    }
  }

  // One shared pool and trained head; each strategy times one scoring pass.
  alpool::FeaturePool pool =
      alpool::initialize_pool(ds, config.seed_fraction, config.base_seed);
  alpool::TrainConfig tc = config.train_config;
  tc.rng_seed = alpool::derive_seed(config.base_seed, "train", 1);
  const alpool::ClassifierHead head = alpool::train(pool, config.arch, tc);
  const std::size_t candidates = pool.unlabeled().size();

  alpool::StrategyParams params;
  params.batch = config.batch > 0 ? std::min(config.batch, candidates) : 1;
  params.mc_samples = config.mc_samples;
  params.ig_step_size = config.ig_step_size;
  params.jobs = flags.jobs;
  params.rng_seed = alpool::derive_seed(config.base_seed, "score", 1);

  std::cout << alpool::strfmt("%zu candidates, %zu eval samples, %zu classes\n",
                              candidates, pool.eval().size(), pool.num_classes());
  std::cout << alpool::strfmt("%-12s %14s %12s %12s %12s %12s %12s %12s\n", "strategy",
                              "ms/candidate", "cand_fwd", "head_fwd", "grad_steps",
                              "mc_fwd", "dist_evals", "shared_fwd");
  json jrows = json::array();
  for (const alpool::StrategyKind kind : kinds) {
    const alpool::SelectionResult sel = alpool::run_strategy(kind, head, pool, params);
    for (const auto& w : sel.warnings)
      std::cerr << "warning: " << alpool::strategy_name(kind) << ": " << w << "\n";
    const double ms_per =
        1000.0 * sel.scoring_seconds / static_cast<double>(candidates);
    const auto& c = sel.counters;
    std::cout << alpool::strfmt(
        "%-12s %14.4f %12llu %12llu %12llu %12llu %12llu %12llu\n",
        alpool::strategy_name(kind), ms_per,
        static_cast<unsigned long long>(c.candidate_forwards),
        static_cast<unsigned long long>(c.head_eval_forwards),
        static_cast<unsigned long long>(c.gradient_steps),
        static_cast<unsigned long long>(c.mc_forwards),
        static_cast<unsigned long long>(c.distance_evals),
        static_cast<unsigned long long>(c.shared_forwards));
    jrows.push_back({{"strategy", alpool::strategy_name(kind)},
                     {"ms_per_candidate", ms_per},
                     {"candidate_forwards", c.candidate_forwards},
                     {"head_eval_forwards", c.head_eval_forwards},
                     {"gradient_steps", c.gradient_steps},
                     {"mc_forwards", c.mc_forwards},
                     {"distance_evals", c.distance_evals},
                     {"shared_forwards", c.shared_forwards}});
  }
  if (flags.json_summary) {
    fs::create_directories(out_dir);
    write_json_file(fs::path(out_dir) / "bench_summary.json",
                    json{{"command", "bench"},
                         {"candidates", candidates},
                         {"eval_samples", pool.eval().size()},
                         {"strategies", std::move(jrows)}});
  }
  return 0;
}

int cmd_report(const CommonFlags& flags, const std::vector<std::string>& dirs) {
  if (dirs.empty()) alpool::fail("report needs at least one result directory");

  struct Entry {
    std::string name;
    std::vector<alpool::RoundAggregate> aggregate;
  };
  std::vector<Entry> entries;
  std::map<std::string, int> name_uses;
  for (const std::string& dir : dirs) {
    const auto rows = alpool::read_curve((fs::path(dir) / "curve.csv").string());
    if (rows.empty())
      alpool::fail(alpool::strfmt("%s/curve.csv has no data rows", dir.c_str()));
    std::string name = "unknown";
    const fs::path cfg_path = fs::path(dir) / "config.txt";
    if (fs::exists(cfg_path)) {
      alpool::ConfigMap cfg = alpool::ConfigMap::parse_file(cfg_path.string());
      name = cfg.get_string("strategy", name);
    }
    const int uses = ++name_uses[name];
    if (uses > 1) name += alpool::strfmt("#%d", uses);
    entries.push_back({name, alpool::aggregate_runs(alpool::runs_from_curve(rows))});
  }

  json jentries = json::object();
  for (const auto& entry : entries) {
    print_aggregate_table(std::cout, entry.name, entry.aggregate);
    jentries[entry.name] = aggregate_to_json(entry.aggregate);
  }
  if (flags.json_summary) {
    const std::string out_dir = resolve_out_dir(flags, alpool::ConfigMap(), ".");
    fs::create_directories(out_dir);
    write_json_file(fs::path(out_dir) / "report_summary.json",
                    json{{"command", "report"}, {"strategies", std::move(jentries)}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pool-based active learning with information-gain acquisition"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string preset, out_path, strategies_flag;
  std::vector<std::string> report_dirs;

  auto add_common = [&](CLI::App* cmd, bool with_strategy = true) {
    cmd->add_option("--config,-c", flags.config_path, "config file (key = value lines)");
    cmd->add_option("--out,-o", flags.out_dir, "output directory");
    cmd->add_option("--jobs,-j", flags.jobs, "worker threads (0 = all cores)");
    cmd->add_option("--seed", flags.seed, "base RNG seed (overrides config)");
    cmd->add_option("--kernels", flags.kernels, "kernel lane: auto, scalar, avx2, neon");
    cmd->add_flag("--json", flags.json_summary, "also write a JSON summary file");
    if (with_strategy)
      cmd->add_option("--strategy,-s", flags.strategy, "strategy name (overrides config)");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic dataset CSV");
  add_common(generate, false);
  generate->add_option("--preset", preset, "dr-like or isic-like");
  generate->add_option("--data-out", out_path, "dataset file to write")->required();

  CLI::App* run = app.add_subcommand("run", "run one strategy's experiment");
  add_common(run);

  CLI::App* compare = app.add_subcommand("compare", "run several strategies, shared seeds");
  add_common(compare, false);
  compare->add_option("--strategies", strategies_flag,
                      "space-separated strategy names (else 'strategies' config key)");

  CLI::App* bench = app.add_subcommand("bench", "time one scoring pass per strategy");
  add_common(bench, false);
  bench->add_option("--strategies", strategies_flag, "space-separated strategy names");

  CLI::App* report = app.add_subcommand("report", "merge result directories into one table");
  add_common(report, false);
  report->add_option("dirs", report_dirs, "experiment output directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    apply_kernels_flag(flags.kernels);
    if (app.got_subcommand(generate)) return cmd_generate(flags, preset, out_path);
    if (app.got_subcommand(run)) return cmd_run(flags);
    if (app.got_subcommand(compare)) return cmd_compare(flags, strategies_flag);
    if (app.got_subcommand(bench)) return cmd_bench(flags, strategies_flag);
    if (app.got_subcommand(report)) return cmd_report(flags, report_dirs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
