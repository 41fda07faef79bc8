// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// Criteria are checked against independent in-file oracles, not the library's
// own intermediate values.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <unistd.h>

#include "alpool/classifier.hpp"
#include "alpool/data.hpp"
#include "alpool/experiment.hpp"
#include "alpool/ig.hpp"
#include "alpool/io.hpp"
#include "alpool/kernels.hpp"
#include "alpool/metrics.hpp"
#include "alpool/results.hpp"
#include "alpool/rng.hpp"
#include "alpool/strategies.hpp"

using namespace alpool;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const char* what, bool ok, const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, what,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

// ---------------------------------------------------------------- shared bits

Dataset tiny_blobs(std::size_t C, std::size_t d, std::vector<std::size_t> train,
                   std::vector<std::size_t> valid, std::vector<std::size_t> test,
                   double sep, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_classes = C;
  spec.dim = d;
  spec.train_counts = std::move(train);
  spec.valid_counts = std::move(valid);
  spec.test_counts = std::move(test);
  spec.cluster_separation = sep;
  spec.rng_seed = seed;
  return generate_synthetic(spec);
}

ClassifierHead random_head(std::size_t d, std::size_t C, std::size_t hidden,
                           double dropout, Rng& rng) {
  ClassifierHead head = make_head(d, C, HeadArchitecture{hidden, dropout}, rng.next_u64());
  for (auto& w : head.output_weights.data) w = rng.normal();
  for (auto& b : head.output_bias) b = 0.3 * rng.normal();
  return head;
}

// NLL of the output layer at activation a (independent of library internals).
double oracle_nll(const Matrix& w, const std::vector<double>& b,
                  const std::vector<double>& a, int y) {
  const std::size_t C = w.rows;
  std::vector<double> z(C);
  for (std::size_t c = 0; c < C; ++c) {
    double s = b[c];
    for (std::size_t j = 0; j < w.cols; ++j) s += w.at(c, j) * a[j];
    z[c] = s;
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  double lse = 0.0;
  for (double v : z) lse += std::exp(v - zmax);
  return std::log(lse) + zmax - z[y];
}

double oracle_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

// ------------------------------------------------------------- criterion 1

bool softmax_normalization() {
  Rng rng(101);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + rng.below(10), C = 2 + rng.below(6);
    const std::size_t hidden = rng.bernoulli(0.5) ? 1 + rng.below(12) : 0;
    const ClassifierHead head = random_head(d, C, hidden, 0.0, rng);
    std::vector<double> x(d);
    for (auto& v : x) v = 3.0 * rng.normal();
    const auto p = predict_proba(head, x);
    double sum = 0.0;
    for (double v : p) {
      if (v < 0.0) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) return false;
  }
  return true;
}

bool entropy_bounds() {
  Rng rng(102);
  for (int t = 0; t < 500; ++t) {
    const std::size_t C = 2 + rng.below(7);
    std::vector<double> p(C);
    double s = 0.0;
    for (auto& v : p) s += v = -std::log(1.0 - rng.uniform());
    for (auto& v : p) v /= s;
    const double h = shannon_entropy(p);
    if (h < 0.0 || h > std::log(static_cast<double>(C)) + 1e-12) return false;

    std::vector<double> z(C);
    for (auto& v : z) v = 20.0 * rng.normal();
    const double hz = kernels::softmax_entropy_from_logits(z.data(), C);
    if (hz < 0.0 || hz > std::log(static_cast<double>(C)) + 1e-12) return false;
  }
  return true;
}

bool finite_difference_gradients() {
  Rng rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.below(8), C = 2 + rng.below(5);
    const std::size_t hidden = rng.bernoulli(0.5) ? 1 + rng.below(8) : 0;
    const ClassifierHead head = random_head(d, C, hidden, 0.0, rng);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.normal();
    const int y = static_cast<int>(rng.below(C));

    const ClassifierHead stepped = gradient_step_on_head(head, x, y, 1.0);
    const auto a = penultimate_features(head, x);
    const std::size_t W = head.feature_width();
    const double h = 1e-5;
    double gmax = 0.0, errmax = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t j = 0; j <= W; ++j) {
        const double analytic = j < W
            ? head.output_weights.at(c, j) - stepped.output_weights.at(c, j)
            : head.output_bias[c] - stepped.output_bias[c];
        Matrix wp = head.output_weights, wm = head.output_weights;
        std::vector<double> bp = head.output_bias, bm = head.output_bias;
        if (j < W) {
          wp.at(c, j) += h;
          wm.at(c, j) -= h;
        } else {
          bp[c] += h;
          bm[c] -= h;
        }
        const double numeric = (oracle_nll(wp, bp, a, y) - oracle_nll(wm, bm, a, y)) / (2 * h);
        gmax = std::max(gmax, std::abs(analytic));
        errmax = std::max(errmax, std::abs(analytic - numeric));
      }
    }
    if (errmax >= 1e-6 * std::max(gmax, 1e-10)) return false;
  }
  return true;
}

bool bald_nonnegative() {
  Rng rng(104);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 2 + rng.below(8), C = 2 + rng.below(5);
    const ClassifierHead head = random_head(d, C, 4 + rng.below(8), 0.3, rng);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.normal();
    Rng draws(rng.next_u64());
    if (mcd_bald_score(head, x, 12, draws) < -1e-12) return false;
  }
  return true;
}

bool zero_step_identities(std::string& detail) {
  const Dataset ds = tiny_blobs(4, 8, {30, 20, 15, 10}, {12, 8, 6, 4}, {4, 4, 4, 3}, 2.0, 7);
  const FeaturePool pool = initialize_pool(ds, 0.3, 3);
  Rng rng(105);
  const ClassifierHead head = random_head(8, 4, 10, 0.0, rng);
  const ClassFrequencies freq = eval_class_frequencies(pool);
  const Matrix cache = penultimate_matrix(head, pool, pool.eval());
  const EntropySummary h1 = eval_set_entropy(head, pool, &cache);

  IGWeighting eig{IGKind::predicted, std::nullopt};
  IGWeighting uig{IGKind::uniform, std::nullopt};
  IGWeighting cfig{IGKind::frequency, freq};
  IGWeighting aeig{IGKind::predicted_times_frequency, freq};

  for (std::size_t i = 0; i < pool.unlabeled().size(); ++i) {
    const std::size_t cand = pool.unlabeled()[i];
    for (const IGWeighting* w : {&eig, &uig, &cfig}) {
      const auto res = score_candidate(head, pool, cand, *w, 0.0, cache, h1);
      if (std::abs(res.score) >= 1e-9) {
        detail = "normalized weighting at zero step gave " + std::to_string(res.score);
        return false;
      }
    }
    const auto res = score_candidate(head, pool, cand, aeig, 0.0, cache, h1);
    const auto p = predict_proba(head, pool.features(cand));
    double pw = 0.0;
    for (std::size_t c = 0; c < 4; ++c) pw += p[c] * freq.weights[c];
    if (res.score < -1e-9 ||
        std::abs(res.score - h1.mean_entropy * (1.0 - pw)) >= 1e-9) {
      detail = "AEIG zero-step identity violated";
      return false;
    }
  }
  return true;
}

// ------------------------------------------------------------- criterion 2

double pair_count_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double credit = 0.0;
  for (double p : pos)
    for (double n : neg) credit += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return credit / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

bool auc_matches_pair_counting(std::string& detail) {
  Rng rng(201);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t C = 2 + rng.below(4);       // <= 5 classes
    const std::size_t n = 4 + rng.below(47);      // <= 50 samples
    Matrix scores(n, C);
    std::vector<int> labels(n);
    const bool discrete = rng.bernoulli(0.5);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(rng.below(C));
      for (std::size_t c = 0; c < C; ++c)
        scores.at(i, c) = discrete ? 0.2 * static_cast<double>(rng.below(6)) : rng.uniform();
    }
    double oracle = 0.0;
    std::size_t defined = 0;
    for (std::size_t c = 0; c < C; ++c) {
      std::vector<double> pos, neg;
      for (std::size_t i = 0; i < n; ++i)
        (labels[i] == static_cast<int>(c) ? pos : neg).push_back(scores.at(i, c));
      if (pos.empty() || neg.empty()) continue;
      oracle += pair_count_auc(pos, neg);
      ++defined;
    }
    if (defined == 0) continue;
    oracle /= static_cast<double>(defined);
    const double mine = macro_ovr_auc(scores, labels).macro_auc;
    if (mine != oracle) {
      detail = "trial " + std::to_string(trial) + ": " + std::to_string(mine) +
               " != " + std::to_string(oracle);
      return false;
    }
  }
  return true;
}

std::vector<std::size_t> naive_coreset(const Matrix& centers, const Matrix& cands,
                                       const std::vector<std::size_t>& ids,
                                       std::size_t batch) {
  std::vector<std::size_t> picked, result;
  const auto d2 = [&](const double* a, const double* b) {
    double s = 0.0;
    for (std::size_t j = 0; j < cands.cols; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return s;
  };
  for (std::size_t b = 0; b < batch; ++b) {
    double best = -1.0;
    std::size_t best_row = cands.rows;
    for (std::size_t i = 0; i < cands.rows; ++i) {
      if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
      double mind = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.rows; ++c)
        mind = std::min(mind, d2(cands.row(i), centers.row(c)));
      for (std::size_t p : picked) mind = std::min(mind, d2(cands.row(i), cands.row(p)));
      if (mind > best || (mind == best && best_row < cands.rows && ids[i] < ids[best_row])) {
        best = mind;
        best_row = i;
      }
    }
    picked.push_back(best_row);
    result.push_back(ids[best_row]);
  }
  return result;
}

double kcenter_radius(const Matrix& centers, const Matrix& cands,
                      const std::vector<std::size_t>& chosen_rows) {
  double radius = 0.0;
  for (std::size_t i = 0; i < cands.rows; ++i) {
    double mind = std::numeric_limits<double>::infinity();
    const auto probe = [&](const double* p) {
      double s = 0.0;
      for (std::size_t j = 0; j < cands.cols; ++j)
        s += (cands.at(i, j) - p[j]) * (cands.at(i, j) - p[j]);
      mind = std::min(mind, s);
    };
    for (std::size_t c = 0; c < centers.rows; ++c) probe(centers.row(c));
    for (std::size_t p : chosen_rows) probe(cands.row(p));
    radius = std::max(radius, mind);
  }
  return std::sqrt(radius);
}

bool coreset_oracles(std::string& detail) {
  Rng rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + rng.below(4);
    Matrix centers(1 + rng.below(4), dim), cands(2 + rng.below(14), dim);
    for (auto& v : centers.data) v = rng.normal();
    for (auto& v : cands.data) v = rng.normal();
    std::vector<std::size_t> ids(cands.rows);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = 3 * i + 1;
    const std::size_t batch = 1 + rng.below(std::min<std::size_t>(cands.rows, 5));
    if (coreset_select(centers, cands, ids, batch) !=
        naive_coreset(centers, cands, ids, batch)) {
      detail = "greedy mismatch on trial " + std::to_string(trial);
      return false;
    }
  }

  // 2-approximation vs brute force on small instances
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + rng.below(8);  // <= 12
    const std::size_t batch = 1 + rng.below(3);
    Matrix centers(1, 2), cands(n, 2);
    for (auto& v : centers.data) v = 4.0 * rng.uniform();
    for (auto& v : cands.data) v = 4.0 * rng.uniform();
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;

    const auto picks = coreset_select(centers, cands, ids, batch);
    const double greedy = kcenter_radius(centers, cands, picks);

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> subset(batch);
    const auto recurse = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
      if (depth == batch) {
        best = std::min(best, kcenter_radius(centers, cands, subset));
        return;
      }
      for (std::size_t i = start; i < n; ++i) {
        subset[depth] = i;
        self(self, i + 1, depth + 1);
      }
    };
    recurse(recurse, 0, 0);
    if (greedy > 2.0 * best + 1e-9) {
      detail = "radius " + std::to_string(greedy) + " > 2x optimal " + std::to_string(best);
      return false;
    }
  }
  return true;
}

// ------------------------------------------------------------- criterion 3

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  const auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return v[x] < v[y];
    });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = mid;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

// Full-batch GD to (near) convergence of the L2-regularized softmax NLL over
// `samples` — the convex objective the single-step scorer approximates.
void convex_fit(Matrix& w, std::vector<double>& b, const std::vector<std::vector<double>>& xs,
                const std::vector<int>& ys, double lr, double lambda, int iters) {
  const std::size_t C = w.rows, d = w.cols, n = xs.size();
  std::vector<double> z(C), p(C);
  Matrix gw(C, d);
  std::vector<double> gb(C);
  for (int it = 0; it < iters; ++it) {
    std::fill(gw.data.begin(), gw.data.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < C; ++c) {
        double s = b[c];
        for (std::size_t j = 0; j < d; ++j) s += w.at(c, j) * xs[i][j];
        z[c] = s;
      }
      const double zmax = *std::max_element(z.begin(), z.end());
      double lse = 0.0;
      for (std::size_t c = 0; c < C; ++c) lse += p[c] = std::exp(z[c] - zmax);
      for (std::size_t c = 0; c < C; ++c) p[c] /= lse;
      for (std::size_t c = 0; c < C; ++c) {
        const double g = p[c] - (ys[i] == static_cast<int>(c) ? 1.0 : 0.0);
        gb[c] += g;
        for (std::size_t j = 0; j < d; ++j) gw.at(c, j) += g * xs[i][j];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t c = 0; c < C; ++c) {
      b[c] -= lr * gb[c] * inv_n;
      for (std::size_t j = 0; j < d; ++j)
        w.at(c, j) -= lr * (gw.at(c, j) * inv_n + lambda * w.at(c, j));
    }
  }
}

bool ig_vs_retraining(std::string& detail) {
  const std::size_t d = 4, C = 3;
  double sum_rho = 0.0;
  int trials = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Dataset ds = tiny_blobs(C, d, {7, 7, 6}, {4, 3, 3}, {1, 1, 1}, 1.6,
                                  500 + static_cast<std::uint64_t>(trial));
    FeaturePool pool = initialize_pool(ds, 0.5, 40 + trial);  // 10 labeled, 10 candidates
    const auto labeled = pool.labeled();
    const auto eval = pool.eval();
    const auto cands = pool.unlabeled();

    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (std::size_t i : labeled) {
      const auto x = pool.features(i);
      xs.emplace_back(x.begin(), x.end());
      ys.push_back(pool.label(i));
    }

    // base model: converged convex fit
    Matrix w0(C, d);
    std::vector<double> b0(C, 0.0);
    convex_fit(w0, b0, xs, ys, 0.5, 1e-3, 4000);

    ClassifierHead head;
    head.input_dim = d;
    head.hidden_width = 0;
    head.num_classes = C;
    head.dropout_rate = 0.0;
    head.output_weights = w0;
    head.output_bias = b0;

    // engine: single-step EIG scores
    const IGWeighting eig{IGKind::predicted, std::nullopt};
    const auto scores = score_pool(head, pool, eig, 0.5);
    std::vector<double> approx;
    for (const auto& s : scores) approx.push_back(s.score);

    // oracle: exact IG by full convex retraining per (candidate, class)
    const auto mean_eval_entropy = [&](const Matrix& w, const std::vector<double>& b) {
      double sum = 0.0;
      std::vector<double> z(C), p(C);
      for (std::size_t i : eval) {
        const auto x = pool.features(i);
        for (std::size_t c = 0; c < C; ++c) {
          double s = b[c];
          for (std::size_t j = 0; j < d; ++j) s += w.at(c, j) * x[j];
          z[c] = s;
        }
        const double zmax = *std::max_element(z.begin(), z.end());
        double lse = 0.0;
        for (std::size_t c = 0; c < C; ++c) lse += p[c] = std::exp(z[c] - zmax);
        for (std::size_t c = 0; c < C; ++c) p[c] /= lse;
        sum += oracle_entropy(p);
      }
      return sum / static_cast<double>(eval.size());
    };
    const double h1 = mean_eval_entropy(w0, b0);

    std::vector<double> exact;
    for (std::size_t cand : cands) {
      const auto xspan = pool.features(cand);
      const auto p = predict_proba(head, xspan);
      auto xs_aug = xs;
      auto ys_aug = ys;
      xs_aug.emplace_back(xspan.begin(), xspan.end());
      ys_aug.push_back(0);
      double ig = h1;
      for (std::size_t c = 0; c < C; ++c) {
        ys_aug.back() = static_cast<int>(c);
        Matrix w = w0;  // warm start; the objective is convex so this is benign
        std::vector<double> b = b0;
        convex_fit(w, b, xs_aug, ys_aug, 0.5, 1e-3, 4000);
        ig -= p[c] * mean_eval_entropy(w, b);
      }
      exact.push_back(ig);
    }

    const double rho = spearman(approx, exact);
    sum_rho += rho;
    ++trials;
  }
  const double mean_rho = sum_rho / static_cast<double>(trials);
  detail = "mean Spearman over " + std::to_string(trials) + " trials = " +
           std::to_string(mean_rho);
  return mean_rho > 0.0;
}

// ------------------------------------------------------------- criterion 4

ExperimentConfig schedule_config(std::size_t batch, std::size_t rounds) {
  ExperimentConfig cfg;
  cfg.strategy = StrategyKind::random_sampling;
  cfg.seed_fraction = 0.10;
  cfg.batch = batch;
  cfg.rounds = rounds;
  cfg.repetitions = 1;
  cfg.base_seed = 9;
  cfg.arch = HeadArchitecture{0, 0.0};
  cfg.train_config.learning_rate = 0.1;
  cfg.train_config.epochs = 1;
  cfg.train_config.batch_size = 256;
  return cfg;
}

bool schedule_matches(std::string& detail) {
  {
    const Dataset ds = tiny_blobs(3, 6, {2500, 1500, 1000}, {60, 25, 15}, {30, 20, 10},
                                  3.0, 11);
    const ExperimentResult res = run_experiment(schedule_config(300, 6), ds);
    const std::vector<double> expect{10, 16, 22, 28, 34, 40};
    for (std::size_t j = 0; j < 6; ++j) {
      const double got = res.runs[0].rounds[j].labeled_percent;
      if (got != expect[j]) {
        detail = "train=5000 B=300 round " + std::to_string(j + 1) + ": got " +
                 std::to_string(got);
        return false;
      }
    }
  }
  {
    const Dataset ds = tiny_blobs(3, 6, {3000, 1800, 1200}, {60, 25, 15}, {30, 20, 10},
                                  3.0, 12);
    const ExperimentResult res = run_experiment(schedule_config(350, 6), ds);
    const std::vector<double> expect{10.0, 15.83, 21.67, 27.5, 33.33, 39.17};
    for (std::size_t j = 0; j < 6; ++j) {
      const double got =
          std::round(res.runs[0].rounds[j].labeled_percent * 100.0) / 100.0;
      if (std::abs(got - expect[j]) > 1e-9) {
        detail = "train=6000 B=350 round " + std::to_string(j + 1) + ": got " +
                 std::to_string(got);
        return false;
      }
    }
  }
  return true;
}

// ------------------------------------------------------------- criterion 5

// Tuned so the 10% seed model sits clearly below the 95% threshold while the
// curve still crosses it within six rounds — the regime the comparison is
// about. More epochs saturate the model from the seed set alone.
TrainConfig dr_train_config() {
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 10;
  cfg.batch_size = 64;
  cfg.weight_decay = 1e-5;
  cfg.lr_decay_per_epoch = 0.995;
  return cfg;
}

ExperimentConfig dr_config(StrategyKind strategy) {
  ExperimentConfig cfg;
  cfg.strategy = strategy;
  cfg.seed_fraction = 0.10;
  cfg.batch = 300;
  cfg.rounds = 6;
  cfg.repetitions = 5;
  cfg.base_seed = 17;
  cfg.arch = HeadArchitecture{64, 0.2};
  cfg.train_config = dr_train_config();
  cfg.ig_step_size = dr_train_config().learning_rate;
  cfg.jobs = 0;  // all cores
  return cfg;
}

bool qualitative_reproduction(std::string& detail) {
  const Dataset ds = generate_synthetic(dr_like_preset());

  const ExperimentResult aeig = run_experiment(dr_config(StrategyKind::aeig), ds);
  const ExperimentResult rnd = run_experiment(dr_config(StrategyKind::random_sampling), ds);
  if (aeig.failed_runs || rnd.failed_runs) {
    detail = "a repetition failed";
    return false;
  }

  // (a) cumulative rare-class acquisitions: classes sorted by train count,
  // rarest three are {4, 3, 1} for the dr-like preset.
  const std::vector<std::size_t> rare{4, 3, 1};
  double ratio_sum = 0.0;
  int ratio_rounds = 0;
  for (std::size_t j = 0; j < 6; ++j) {
    double a = 0.0, r = 0.0;
    for (std::size_t c : rare) {
      a += aeig.aggregate[j].mean_cumulative_per_class[c];
      r += rnd.aggregate[j].mean_cumulative_per_class[c];
    }
    if (r > 0.0) {
      ratio_sum += a / r;
      ++ratio_rounds;
    }
  }
  const double mean_ratio = ratio_sum / static_cast<double>(ratio_rounds);

  // (b) mean test AUC dominance at every round
  bool dominates = true;
  double min_gap = 1e9;
  for (std::size_t j = 0; j < 6; ++j) {
    const double gap = aeig.aggregate[j].mean_test_auc - rnd.aggregate[j].mean_test_auc;
    min_gap = std::min(min_gap, gap);
    if (gap < 0.0) dominates = false;
  }

  // (c) labeled fraction to reach 95% of the full-data AUC. The seed model
  // must start below the threshold, otherwise the comparison is vacuous.
  const FullDataReference ref = full_data_reference(dr_config(StrategyKind::aeig), ds);
  const double threshold = 0.95 * ref.mean_test_auc;
  const bool crossing_visible = aeig.aggregate[0].mean_test_auc < threshold;
  const auto a_pct = percent_to_target(aeig.aggregate, threshold, false);
  const auto r_pct = percent_to_target(rnd.aggregate, threshold, false);
  const bool reaches = a_pct.has_value() && (!r_pct.has_value() || *a_pct <= *r_pct);

  char buffer[320];
  std::snprintf(buffer, sizeof buffer,
                "rare-class ratio %.2f (need >= 1.5); min AUC gap %+.4f; "
                "threshold %.4f (starts at %.4f); all-95%% at %s%% vs %s%%",
                mean_ratio, min_gap, threshold, aeig.aggregate[0].mean_test_auc,
                a_pct ? std::to_string(*a_pct).c_str() : "unreached",
                r_pct ? std::to_string(*r_pct).c_str() : "unreached");
  detail = buffer;
  return mean_ratio >= 1.5 && dominates && crossing_visible && reaches;
}

// ------------------------------------------------------------- criterion 6

ExperimentConfig determinism_config() {
  ExperimentConfig cfg;
  cfg.strategy = StrategyKind::aeig;
  cfg.seed_fraction = 0.2;
  cfg.batch = 15;
  cfg.rounds = 3;
  cfg.repetitions = 2;
  cfg.base_seed = 23;
  cfg.arch = HeadArchitecture{16, 0.2};
  cfg.train_config.learning_rate = 0.2;
  cfg.train_config.epochs = 10;
  cfg.train_config.batch_size = 16;
  cfg.ig_step_size = 0.05;
  cfg.save_heads = true;
  cfg.dump_scores = true;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool byte_identical_reruns(std::string& detail) {
  const Dataset ds = tiny_blobs(3, 8, {60, 40, 20}, {20, 12, 8}, {10, 8, 6}, 2.5, 19);
  ExperimentConfig cfg = determinism_config();
  cfg.synthetic = [] {
    SyntheticSpec s;
    s.num_classes = 3;
    s.dim = 8;
    s.train_counts = {60, 40, 20};
    s.valid_counts = {20, 12, 8};
    s.test_counts = {10, 8, 6};
    s.cluster_separation = 2.5;
    s.rng_seed = 19;
    return s;
  }();

  const fs::path root =
      fs::temp_directory_path() / ("alpool_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  cfg.jobs = 4;
  write_results(run_experiment(cfg, ds), cfg, (root / "a").string());
  write_results(run_experiment(cfg, ds), cfg, (root / "b").string());
  cfg.jobs = 1;
  write_results(run_experiment(cfg, ds), cfg, (root / "c").string());

  bool ok = true;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    for (const char* other : {"b", "c"}) {
      if (slurp(entry.path()) != slurp(root / other / rel)) {
        detail = rel.string() + " differs between runs";
        ok = false;
      }
    }
  }
  fs::remove_all(root);
  if (!ok) return false;

  // --jobs 1 vs 8: identical score lists and selections for every strategy
  const FeaturePool pool = initialize_pool(ds, 0.3, 5);
  TrainConfig tc = determinism_config().train_config;
  tc.rng_seed = 77;
  const ClassifierHead head = train(pool, HeadArchitecture{16, 0.2}, tc);
  for (const StrategyKind kind : all_strategies()) {
    StrategyParams p;
    p.batch = 10;
    p.mc_samples = 8;
    p.ig_step_size = 0.05;
    p.rng_seed = 31;
    p.jobs = 1;
    const SelectionResult one = run_strategy(kind, head, pool, p);
    p.jobs = 8;
    const SelectionResult eight = run_strategy(kind, head, pool, p);
    if (one.scores != eight.scores || one.selected != eight.selected) {
      detail = std::string("jobs-dependent result for ") + strategy_name(kind);
      return false;
    }
  }
  return true;
}

// ------------------------------------------------------------- criterion 7

bool counter_contract(std::string& detail) {
  const Dataset ds = tiny_blobs(3, 8, {60, 40, 20}, {20, 12, 8}, {10, 8, 6}, 2.5, 19);
  const FeaturePool pool = initialize_pool(ds, 0.3, 5);
  TrainConfig tc;
  tc.learning_rate = 0.2;
  tc.epochs = 10;
  tc.batch_size = 16;
  tc.rng_seed = 3;
  const ClassifierHead head = train(pool, HeadArchitecture{16, 0.2}, tc);

  const std::size_t N = pool.unlabeled().size();
  const std::size_t K = pool.eval().size();
  const std::size_t C = pool.num_classes();
  const std::size_t T = 12;

  StrategyParams p;
  p.batch = 10;
  p.mc_samples = T;
  p.ig_step_size = 0.05;
  p.rng_seed = 31;

  const auto model_evals = [](const WorkCounters& c) {
    return c.candidate_forwards + c.head_eval_forwards + c.gradient_steps + c.mc_forwards;
  };

  const WorkCounters random =
      run_strategy(StrategyKind::random_sampling, head, pool, p).counters;
  const WorkCounters entropy = run_strategy(StrategyKind::entropy, head, pool, p).counters;
  const WorkCounters mcd = run_strategy(StrategyKind::mcd_entropy, head, pool, p).counters;
  const WorkCounters coreset = run_strategy(StrategyKind::coreset, head, pool, p).counters;
  const WorkCounters aeig = run_strategy(StrategyKind::aeig, head, pool, p).counters;

  if (model_evals(random) != 0) {
    detail = "random did model work";
    return false;
  }
  if (entropy.candidate_forwards != N || model_evals(entropy) != N) {
    detail = "entropy != 1 forward per candidate";
    return false;
  }
  if (mcd.mc_forwards != N * T) {
    detail = "mcd != T forwards per candidate";
    return false;
  }
  if (coreset.distance_evals == 0) {
    detail = "coreset did no distance work";
    return false;
  }
  // the published ordering: random < entropy < mcd < coreset-comparable < ig
  if (!(model_evals(random) < model_evals(entropy) && model_evals(entropy) < model_evals(mcd))) {
    detail = "model-eval ordering broken";
    return false;
  }
  // AEIG: C gradient steps and C*K cached-head eval forwards per candidate
  if (aeig.gradient_steps != N * C || aeig.head_eval_forwards != N * C * K) {
    detail = "AEIG counters off: " + std::to_string(aeig.gradient_steps) + ", " +
             std::to_string(aeig.head_eval_forwards);
    return false;
  }
  if (model_evals(mcd) >= model_evals(aeig)) {
    detail = "IG should cost the most model evals here";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  std::string detail;
  double t0 = now_seconds();

  const bool c1 = softmax_normalization() && entropy_bounds() &&
                  finite_difference_gradients() && bald_nonnegative() &&
                  zero_step_identities(detail);
  report(1, "math invariants (softmax, entropy, gradients, BALD, zero-step IG)", c1,
         detail);
  std::fprintf(stderr, "  [t] criterion 1 took %.1fs\n", now_seconds() - t0);

  detail.clear();
  t0 = now_seconds();
  bool c2 = auc_matches_pair_counting(detail);
  std::string d2;
  c2 = coreset_oracles(d2) && c2;
  report(2, "oracle equivalences (pair-counted AUC, CoreSet reference, 2x radius)", c2,
         detail + d2);
  std::fprintf(stderr, "  [t] criterion 2 took %.1fs\n", now_seconds() - t0);

  detail.clear();
  t0 = now_seconds();
  const bool c3 = ig_vs_retraining(detail);
  report(3, "single-step IG ranks like exact retraining IG", c3, detail);
  std::fprintf(stderr, "  [t] criterion 3 took %.1fs\n", now_seconds() - t0);

  detail.clear();
  t0 = now_seconds();
  const bool c4 = schedule_matches(detail);
  report(4, "labeled-fraction schedules", c4, detail);
  std::fprintf(stderr, "  [t] criterion 4 took %.1fs\n", now_seconds() - t0);

  detail.clear();
  t0 = now_seconds();
  const bool c5 = qualitative_reproduction(detail);
  report(5, "class-frequency-adapted IG beats random on the imbalanced preset", c5, detail);
  std::fprintf(stderr, "  [t] criterion 5 took %.1fs\n", now_seconds() - t0);

  detail.clear();
  t0 = now_seconds();
  const bool c6 = byte_identical_reruns(detail);
  report(6, "byte-identical reruns; jobs-invariant scores and selections", c6, detail);
  std::fprintf(stderr, "  [t] criterion 6 took %.1fs\n", now_seconds() - t0);

  detail.clear();
  t0 = now_seconds();
  const bool c7 = counter_contract(detail);
  report(7, "work-counter ordering and AEIG counter identity", c7, detail);
  std::fprintf(stderr, "  [t] criterion 7 took %.1fs\n", now_seconds() - t0);

  return g_failures == 0 ? 0 : 1;
}
