#include "alpool/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "alpool/kernels.hpp"
#include "alpool/util.hpp"

namespace alpool {

double shannon_entropy(std::span<const double> p) {
  if (p.empty()) fail_arg("shannon_entropy: empty distribution");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      fail_arg(strfmt("shannon_entropy: invalid probability %g", v));
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-6)
    fail_arg(strfmt("shannon_entropy: probabilities sum to %.9f, not 1", sum));
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h < 0.0 ? 0.0 : h;  // guard the p slightly > 1 rounding case
}

Matrix penultimate_matrix(const ClassifierHead& head, const FeaturePool& pool,
                          const std::vector<std::size_t>& indices) {
  Matrix out(indices.size(), head.feature_width());
  for (std::size_t k = 0; k < indices.size(); ++k)
    penultimate_features(head, pool.features(indices[k]), out.row(k));
  return out;
}

EntropySummary eval_set_entropy(const ClassifierHead& head, const FeaturePool& pool,
                                const Matrix* cached_penultimate) {
  const auto& eval = pool.eval();
  if (eval.empty()) fail("eval_set_entropy: evaluation set is empty");

  Matrix local;
  const Matrix* acts = cached_penultimate;
  if (acts == nullptr) {
    local = penultimate_matrix(head, pool, eval);
    acts = &local;
  }
  if (acts->rows != eval.size() || acts->cols != head.feature_width())
    fail(strfmt("eval_set_entropy: cache is %zux%zu, expected %zux%zu", acts->rows,
                acts->cols, eval.size(), head.feature_width()));

  EntropySummary out;
  out.per_sample_entropy.resize(eval.size());
  const double sum = kernels::active().head_entropy_sum(
      head.output_weights.data.data(), head.output_bias.data(), head.num_classes,
      head.feature_width(), acts->data.data(), eval.size(),
      out.per_sample_entropy.data());
  out.mean_entropy = sum / static_cast<double>(eval.size());
  return out;
}

namespace {

// Mann-Whitney AUC for one class: rank all K scores with mid-rank ties, then
// AUC = (rank sum of positives - npos(npos+1)/2) / (npos * nneg).
double binary_auc_by_ranks(const std::vector<double>& scores,
                           const std::vector<char>& is_pos) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t npos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (is_pos[order[k]]) {
        pos_rank_sum += midrank;
        ++npos;
      }
    }
    i = j;
  }
  const std::size_t nneg = n - npos;
  return (pos_rank_sum - 0.5 * static_cast<double>(npos) * static_cast<double>(npos + 1)) /
         (static_cast<double>(npos) * static_cast<double>(nneg));
}

}  // namespace

AucResult macro_ovr_auc(const Matrix& scores, const std::vector<int>& labels) {
  if (scores.rows != labels.size())
    fail_arg(strfmt("macro_ovr_auc: %zu score rows vs %zu labels", scores.rows, labels.size()));
  if (scores.rows == 0) fail_arg("macro_ovr_auc: no samples");
  const std::size_t C = scores.cols;
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= C)
      fail_arg(strfmt("macro_ovr_auc: label %d outside [0,%zu)", y, C));
  for (double v : scores.data)
    if (!std::isfinite(v)) fail_arg("macro_ovr_auc: non-finite score");

  AucResult out;
  out.per_class_auc.assign(C, std::numeric_limits<double>::quiet_NaN());
  double total = 0.0;
  std::size_t defined = 0;
  std::vector<double> column(scores.rows);
  std::vector<char> is_pos(scores.rows);
  for (std::size_t c = 0; c < C; ++c) {
    std::size_t npos = 0;
    for (std::size_t i = 0; i < scores.rows; ++i) {
      column[i] = scores.at(i, c);
      is_pos[i] = labels[i] == static_cast<int>(c);
      npos += is_pos[i];
    }
    if (npos == 0 || npos == scores.rows) {
      out.warnings.push_back(
          strfmt("class %zu has no %s in the label set; its AUC is undefined and skipped",
                 c, npos == 0 ? "positives" : "negatives"));
      continue;
    }
    out.per_class_auc[c] = binary_auc_by_ranks(column, is_pos);
    total += out.per_class_auc[c];
    ++defined;
  }
  if (defined == 0) fail("macro_ovr_auc: every class lacks positives or negatives");
  out.macro_auc = total / static_cast<double>(defined);
  return out;
}

AcquisitionTables acquisition_histogram(const std::vector<AcquisitionRecord>& records) {
  AcquisitionTables tables;
  std::vector<std::size_t> running;
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].round != static_cast<int>(r) + 1)
      fail_arg(strfmt("acquisition_histogram: expected round %zu, found %d", r + 1,
                  records[r].round));
    if (running.empty()) running.assign(records[r].per_class_counts.size(), 0);
    if (records[r].per_class_counts.size() != running.size())
      fail_arg("acquisition_histogram: inconsistent class count across rounds");
    for (std::size_t c = 0; c < running.size(); ++c)
      running[c] += records[r].per_class_counts[c];
    tables.per_round.push_back(records[r].per_class_counts);
    tables.cumulative.push_back(running);
  }
  return tables;
}

}  // namespace alpool
