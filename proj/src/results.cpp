#include "alpool/results.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "alpool/util.hpp"

namespace fs = std::filesystem;

namespace alpool {

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail(strfmt("cannot write '%s'", path.string().c_str()));
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) fail(strfmt("write failure on '%s'", path.string().c_str()));
}

std::string size_list(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string serialize_experiment_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "# resolved experiment configuration\n";
  out << "strategy = " << strategy_name(config.strategy) << '\n';
  out << "seed_fraction = " << fmt_g17(config.seed_fraction) << '\n';
  out << "batch = " << config.batch << '\n';
  out << "rounds = " << config.rounds << '\n';
  out << "repetitions = " << config.repetitions << '\n';
  out << "base_seed = " << config.base_seed << '\n';
  if (!config.dataset_path.empty()) {
    out << "dataset.path = " << config.dataset_path << '\n';
  } else if (config.synthetic) {
    const SyntheticSpec& s = *config.synthetic;
    out << "dataset.num_classes = " << s.num_classes << '\n';
    out << "dataset.dim = " << s.dim << '\n';
    out << "dataset.separation = " << fmt_g17(s.cluster_separation) << '\n';
    out << "dataset.seed = " << s.rng_seed << '\n';
    out << "dataset.train_counts = " << size_list(s.train_counts) << '\n';
    out << "dataset.valid_counts = " << size_list(s.valid_counts) << '\n';
    out << "dataset.test_counts = " << size_list(s.test_counts) << '\n';
  }
  out << "head.hidden_width = " << config.arch.hidden_width << '\n';
  out << "head.dropout = " << fmt_g17(config.arch.dropout_rate) << '\n';
  out << "train.learning_rate = " << fmt_g17(config.train_config.learning_rate) << '\n';
  out << "train.epochs = " << config.train_config.epochs << '\n';
  out << "train.batch_size = " << config.train_config.batch_size << '\n';
  out << "train.weight_decay = " << fmt_g17(config.train_config.weight_decay) << '\n';
  out << "train.lr_decay = " << fmt_g17(config.train_config.lr_decay_per_epoch) << '\n';
  out << "ig.step_size = " << fmt_g17(config.ig_step_size) << '\n';
  out << "mcd.samples = " << config.mc_samples << '\n';
  out << "output.save_heads = " << (config.save_heads ? "true" : "false") << '\n';
  out << "output.dump_scores = " << (config.dump_scores ? "true" : "false") << '\n';
  return out.str();
}

ExperimentConfig experiment_config_from(const ConfigMap& map) {
  ExperimentConfig c;
  c.dataset_path = map.get_string("dataset.path", "");
  const std::string preset = map.get_string("dataset.preset", "");
  if (!c.dataset_path.empty() && !preset.empty())
    fail("config sets both dataset.path and dataset.preset; pick one");
  if (c.dataset_path.empty()) {
    SyntheticSpec spec;
    bool have = false;
    if (!preset.empty()) {
      if (preset == "dr-like") spec = dr_like_preset();
      else if (preset == "isic-like") spec = isic_like_preset();
      else fail(strfmt("unknown dataset.preset '%s' (expected dr-like or isic-like)",
                       preset.c_str()));
      have = true;
    }
    if (map.has("dataset.num_classes")) {
      spec.num_classes = map.get_size("dataset.num_classes", 0);
      have = true;
    }
    if (map.has("dataset.dim")) {
      spec.dim = map.get_size("dataset.dim", 0);
      have = true;
    }
    if (map.has("dataset.separation")) {
      spec.cluster_separation = map.get_double("dataset.separation", 0.0);
      have = true;
    }
    if (map.has("dataset.train_counts")) {
      spec.train_counts = map.get_size_list("dataset.train_counts");
      have = true;
    }
    if (map.has("dataset.valid_counts")) {
      spec.valid_counts = map.get_size_list("dataset.valid_counts");
      have = true;
    }
    if (map.has("dataset.test_counts")) {
      spec.test_counts = map.get_size_list("dataset.test_counts");
      have = true;
    }
    if (have) {
      spec.rng_seed = map.get_u64("dataset.seed", spec.rng_seed);
      c.synthetic = spec;
    }
  }

  const std::string strategy = map.get_string("strategy", "aeig");
  const auto kind = parse_strategy(strategy);
  if (!kind) {
    std::string names;
    for (StrategyKind k : all_strategies()) {
      if (!names.empty()) names += ", ";
      names += strategy_name(k);
    }
    fail(strfmt("unknown strategy '%s' (expected one of: %s)", strategy.c_str(),
                names.c_str()));
  }
  c.strategy = *kind;

  c.seed_fraction = map.get_double("seed_fraction", c.seed_fraction);
  c.batch = map.get_size("batch", c.batch);
  c.rounds = map.get_size("rounds", c.rounds);
  c.repetitions = map.get_size("repetitions", c.repetitions);
  c.base_seed = map.get_u64("base_seed", c.base_seed);

  c.arch.hidden_width = map.get_size("head.hidden_width", c.arch.hidden_width);
  c.arch.dropout_rate = map.get_double("head.dropout", c.arch.dropout_rate);

  c.train_config.learning_rate =
      map.get_double("train.learning_rate", c.train_config.learning_rate);
  c.train_config.epochs = map.get_size("train.epochs", c.train_config.epochs);
  c.train_config.batch_size = map.get_size("train.batch_size", c.train_config.batch_size);
  c.train_config.weight_decay =
      map.get_double("train.weight_decay", c.train_config.weight_decay);
  c.train_config.lr_decay_per_epoch =
      map.get_double("train.lr_decay", c.train_config.lr_decay_per_epoch);

  // The hypothetical-update step defaults to the training learning rate.
  c.ig_step_size = map.get_double("ig.step_size", c.train_config.learning_rate);
  c.mc_samples = map.get_size("mcd.samples", c.mc_samples);
  c.save_heads = map.get_bool("output.save_heads", c.save_heads);
  c.dump_scores = map.get_bool("output.dump_scores", c.dump_scores);
  return c;
}

void write_results(const ExperimentResult& result, const ExperimentConfig& config,
                   const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    const fs::path path = dir / "curve.csv";
    std::ofstream out = open_out(path);
    out << "rep,round,labeled_count,labeled_pct,scored_candidates,valid_auc,test_auc\n";
    for (const auto& run : result.runs) {
      if (run.failed) continue;
      for (const auto& round : run.rounds)
        out << run.repetition << ',' << round.round << ',' << round.labeled_count << ','
            << fmt_g17(round.labeled_percent) << ',' << round.scored_candidates << ','
            << fmt_g17(round.valid_auc) << ',' << fmt_g17(round.test_auc) << '\n';
    }
    finish(out, path);
  }

  {
    const fs::path path = dir / "aggregate.csv";
    std::ofstream out = open_out(path);
    out << "round,labeled_pct,mean_valid_auc,std_valid_auc,mean_test_auc,std_test_auc";
    for (std::size_t c = 0; c < result.num_classes; ++c) out << ",mean_cum_class_" << c;
    out << '\n';
    for (const auto& agg : result.aggregate) {
      out << agg.round << ',' << fmt_g17(agg.labeled_percent) << ','
          << fmt_g17(agg.mean_valid_auc) << ',' << fmt_g17(agg.std_valid_auc) << ','
          << fmt_g17(agg.mean_test_auc) << ',' << fmt_g17(agg.std_test_auc);
      for (std::size_t c = 0; c < result.num_classes; ++c) {
        const double v = c < agg.mean_cumulative_per_class.size()
                             ? agg.mean_cumulative_per_class[c]
                             : 0.0;
        out << ',' << fmt_g17(v);
      }
      out << '\n';
    }
    finish(out, path);
  }

  {
    const fs::path path = dir / "acquisitions.csv";
    std::ofstream out = open_out(path);
    out << "rep,round";
    for (std::size_t c = 0; c < result.num_classes; ++c) out << ",count_" << c;
    for (std::size_t c = 0; c < result.num_classes; ++c) out << ",cum_" << c;
    out << '\n';
    for (const auto& run : result.runs) {
      if (run.failed) continue;
      for (const auto& round : run.rounds) {
        if (!round.acquisition) continue;
        out << run.repetition << ',' << round.acquisition->round;
        for (std::size_t v : round.acquisition->per_class_counts) out << ',' << v;
        for (std::size_t v : round.acquisition->cumulative_per_class_counts)
          out << ',' << v;
        out << '\n';
      }
    }
    finish(out, path);
  }

  {
    const fs::path path = dir / "config.txt";
    std::ofstream out = open_out(path);
    out << serialize_experiment_config(config);
    finish(out, path);
  }

  if (config.dump_scores) {
    for (const auto& run : result.runs) {
      if (run.failed) continue;
      for (const auto& round : run.rounds) {
        if (round.ig_scores.empty()) continue;
        const fs::path path =
            dir / strfmt("scores_rep%zu_round%d.csv", run.repetition, round.round);
        std::ofstream out = open_out(path);
        out << "candidate,score,h1";
        for (std::size_t c = 0; c < result.num_classes; ++c) out << ",h2_" << c;
        out << '\n';
        for (const auto& s : round.ig_scores) {
          out << s.candidate_index << ',' << fmt_g17(s.score) << ',' << fmt_g17(s.h1);
          for (double h2 : s.per_class_h2) out << ',' << fmt_g17(h2);
          out << '\n';
        }
        finish(out, path);
      }
    }
  }

  if (config.save_heads) {
    fs::create_directories(dir / "heads");
    for (const auto& run : result.runs) {
      if (run.failed) continue;
      for (const auto& round : run.rounds)
        if (round.head)
          save_head(*round.head,
                    (dir / "heads" /
                     strfmt("rep%zu_round%d.head", run.repetition, round.round))
                        .string());
    }
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& path, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    fail(strfmt("%s:%zu: '%s' is not a number", path.c_str(), line, s.c_str()));
  return v;
}

}  // namespace

std::vector<CurveRow> read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(strfmt("cannot open curve file '%s'", path.c_str()));
  std::string line;
  if (!std::getline(in, line)) fail(strfmt("%s: empty file", path.c_str()));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"rep", "round", "labeled_count", "labeled_pct",
                               "scored_candidates", "valid_auc", "test_auc"})
    if (!col.count(required))
      fail(strfmt("%s: missing required column '%s'", path.c_str(), required));

  std::vector<CurveRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size())
      fail(strfmt("%s:%zu: expected %zu columns, found %zu", path.c_str(), lineno,
                  header.size(), fields.size()));
    CurveRow row;
    row.rep = static_cast<std::size_t>(to_double(fields[col["rep"]], path, lineno));
    row.round = static_cast<int>(to_double(fields[col["round"]], path, lineno));
    row.labeled_count =
        static_cast<std::size_t>(to_double(fields[col["labeled_count"]], path, lineno));
    row.labeled_percent = to_double(fields[col["labeled_pct"]], path, lineno);
    row.scored_candidates = static_cast<std::size_t>(
        to_double(fields[col["scored_candidates"]], path, lineno));
    row.valid_auc = to_double(fields[col["valid_auc"]], path, lineno);
    row.test_auc = to_double(fields[col["test_auc"]], path, lineno);
    rows.push_back(row);
  }
  return rows;
}

std::vector<RunRecord> runs_from_curve(const std::vector<CurveRow>& rows) {
  std::map<std::size_t, RunRecord> by_rep;
  for (const auto& row : rows) {
    RunRecord& run = by_rep[row.rep];
    run.repetition = row.rep;
    RoundRecord& round = run.rounds.emplace_back();
    round.round = row.round;
    round.labeled_count = row.labeled_count;
    round.labeled_percent = row.labeled_percent;
    round.scored_candidates = row.scored_candidates;
    round.valid_auc = row.valid_auc;
    round.test_auc = row.test_auc;
  }
  std::vector<RunRecord> runs;
  for (auto& [rep, run] : by_rep) {
    std::sort(run.rounds.begin(), run.rounds.end(),
              [](const RoundRecord& a, const RoundRecord& b) { return a.round < b.round; });
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace alpool
