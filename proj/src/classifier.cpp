#include "alpool/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "alpool/kernels.hpp"
#include "alpool/util.hpp"

namespace alpool {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    fail_arg("train config: learning_rate must be positive and finite");
  if (epochs == 0) fail_arg("train config: epochs must be positive");
  if (batch_size == 0) fail_arg("train config: batch_size must be positive");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay))
    fail_arg("train config: weight_decay must be non-negative and finite");
  if (!(lr_decay_per_epoch > 0.0 && lr_decay_per_epoch <= 1.0))
    fail_arg("train config: lr_decay_per_epoch must be in (0,1]");
}

void softmax_inplace(double* logits, std::size_t n) {
  double m = logits[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    logits[i] = std::exp(logits[i] - m);
    sum += logits[i];
  }
  for (std::size_t i = 0; i < n; ++i) logits[i] /= sum;
}

ClassifierHead make_head(std::size_t input_dim, std::size_t num_classes,
                         const HeadArchitecture& arch, std::uint64_t rng_seed) {
  if (input_dim == 0) fail_arg("make_head: input_dim must be positive");
  if (num_classes < 2) fail_arg("make_head: need at least 2 classes");
  if (!(arch.dropout_rate >= 0.0 && arch.dropout_rate < 1.0))
    fail_arg("make_head: dropout_rate must be in [0,1)");

  ClassifierHead head;
  head.input_dim = input_dim;
  head.hidden_width = arch.hidden_width;
  head.num_classes = num_classes;
  head.dropout_rate = arch.dropout_rate;
  if (arch.hidden_width > 0) {
    head.hidden_weights = Matrix(arch.hidden_width, input_dim);
    head.hidden_bias.assign(arch.hidden_width, 0.0);
    const double bound =
        std::sqrt(6.0 / static_cast<double>(input_dim + arch.hidden_width));
    Rng rng(rng_seed);
    for (double& w : head.hidden_weights.data) w = rng.uniform(-bound, bound);
  }
  head.output_weights = Matrix(num_classes, head.feature_width());
  head.output_bias.assign(num_classes, 0.0);
  return head;
}

void penultimate_features(const ClassifierHead& head, std::span<const double> x,
                          double* out) {
  if (x.size() != head.input_dim)
    fail(strfmt("classifier: input has %zu features, head expects %zu", x.size(),
                head.input_dim));
  if (head.hidden_width == 0) {
    std::copy(x.begin(), x.end(), out);
    return;
  }
  const kernels::Ops& ops = kernels::active();
  ops.matvec(head.hidden_weights.data.data(), head.hidden_width, head.input_dim,
             x.data(), head.hidden_bias.data(), out);
  for (std::size_t j = 0; j < head.hidden_width; ++j)
    if (out[j] < 0.0) out[j] = 0.0;
}

std::vector<double> penultimate_features(const ClassifierHead& head,
                                         std::span<const double> x) {
  std::vector<double> out(head.feature_width());
  penultimate_features(head, x, out.data());
  return out;
}

std::vector<double> predict_proba(const ClassifierHead& head, std::span<const double> x,
                                  bool dropout_active, Rng* rng) {
  const std::size_t hw = head.feature_width();
  std::vector<double> act(hw);
  penultimate_features(head, x, act.data());
  if (dropout_active) {
    if (rng == nullptr) fail_arg("predict_proba: dropout_active requires an rng stream");
    const double p = head.dropout_rate;
    if (p > 0.0) {
      const double keep_scale = 1.0 / (1.0 - p);
      for (std::size_t j = 0; j < hw; ++j)
        act[j] = rng->uniform() < p ? 0.0 : act[j] * keep_scale;
    }
  }
  std::vector<double> out(head.num_classes);
  kernels::active().matvec(head.output_weights.data.data(), head.num_classes, hw,
                           act.data(), head.output_bias.data(), out.data());
  softmax_inplace(out.data(), head.num_classes);
  return out;
}

void step_output_layer(double* weights, double* bias, const double* activation,
                       std::size_t dim, std::size_t num_classes, int label,
                       double step_size, double* logits_scratch, double* probs_scratch) {
  const kernels::Ops& ops = kernels::active();
  ops.matvec(weights, num_classes, dim, activation, bias, logits_scratch);
  for (std::size_t c = 0; c < num_classes; ++c)
    if (!std::isfinite(logits_scratch[c]))
      fail("gradient step: non-finite logits, cannot form a gradient");
  std::copy(logits_scratch, logits_scratch + num_classes, probs_scratch);
  softmax_inplace(probs_scratch, num_classes);
  probs_scratch[label] -= 1.0;  // now the cross-entropy gradient wrt logits
  for (std::size_t c = 0; c < num_classes; ++c) {
    ops.axpy(-step_size * probs_scratch[c], activation, weights + c * dim, dim);
    bias[c] -= step_size * probs_scratch[c];
  }
}

ClassifierHead gradient_step_on_head(const ClassifierHead& head,
                                     std::span<const double> x, int assumed_label,
                                     double step_size) {
  if (assumed_label < 0 || static_cast<std::size_t>(assumed_label) >= head.num_classes)
    fail_arg(strfmt("gradient step: label %d outside [0,%zu)", assumed_label,
                    head.num_classes));
  if (!(step_size >= 0.0) || !std::isfinite(step_size))
    fail_arg("gradient step: step_size must be non-negative and finite");
  ClassifierHead out = head;
  const std::size_t hw = head.feature_width(), C = head.num_classes;
  std::vector<double> act(hw), logits(C), probs(C);
  penultimate_features(head, x, act.data());
  step_output_layer(out.output_weights.data.data(), out.output_bias.data(), act.data(),
                    hw, C, assumed_label, step_size, logits.data(), probs.data());
  return out;
}

ClassifierHead train(const FeaturePool& pool, const HeadArchitecture& arch,
                     const TrainConfig& config) {
  config.validate();
  const auto& labeled = pool.labeled();
  if (labeled.empty()) fail("train: labeled set is empty");
  const std::size_t d = pool.dim(), C = pool.num_classes();

  ClassifierHead head = make_head(d, C, arch, derive_seed(config.rng_seed, "init"));
  const std::size_t hw = head.feature_width();
  const bool hidden = head.hidden_width > 0;
  const double p = head.dropout_rate;
  const double keep_scale = p > 0.0 ? 1.0 / (1.0 - p) : 1.0;
  const kernels::Ops& ops = kernels::active();

  Rng order_rng(derive_seed(config.rng_seed, "order"));
  Rng drop_rng(derive_seed(config.rng_seed, "dropout"));
  std::vector<std::size_t> order(labeled.begin(), labeled.end());

  std::vector<double> z(hw), act(hw), dropped(hw), keep(hw, 1.0);
  std::vector<double> logits(C), dlogits(C), dact(hw), dz(hw);
  std::vector<double> g_ow(C * hw), g_ob(C);
  std::vector<double> g_hw(hidden ? hw * d : 0), g_hb(hidden ? hw : 0);

  double lr = config.learning_rate;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(order);
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size, ++batch_index) {
      const std::size_t bsz = std::min(config.batch_size, order.size() - start);
      std::fill(g_ow.begin(), g_ow.end(), 0.0);
      std::fill(g_ob.begin(), g_ob.end(), 0.0);
      std::fill(g_hw.begin(), g_hw.end(), 0.0);
      std::fill(g_hb.begin(), g_hb.end(), 0.0);
      double batch_loss = 0.0;

      for (std::size_t i = 0; i < bsz; ++i) {
        const std::size_t idx = order[start + i];
        const std::span<const double> x = pool.features(idx);
        const int y = pool.label(idx);

        const double* a;
        if (hidden) {
          ops.matvec(head.hidden_weights.data.data(), hw, d, x.data(),
                     head.hidden_bias.data(), z.data());
          for (std::size_t j = 0; j < hw; ++j) act[j] = z[j] > 0.0 ? z[j] : 0.0;
          a = act.data();
        } else {
          a = x.data();
        }
        if (p > 0.0) {
          for (std::size_t j = 0; j < hw; ++j) {
            keep[j] = drop_rng.uniform() < p ? 0.0 : keep_scale;
            dropped[j] = a[j] * keep[j];
          }
        } else {
          std::copy(a, a + hw, dropped.begin());
        }
        ops.matvec(head.output_weights.data.data(), C, hw, dropped.data(),
                   head.output_bias.data(), logits.data());

        double m = logits[0];
        for (std::size_t c = 1; c < C; ++c) m = std::max(m, logits[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
          dlogits[c] = std::exp(logits[c] - m);
          sum += dlogits[c];
        }
        batch_loss += m + std::log(sum) - logits[static_cast<std::size_t>(y)];
        for (std::size_t c = 0; c < C; ++c) dlogits[c] /= sum;
        dlogits[static_cast<std::size_t>(y)] -= 1.0;

        for (std::size_t c = 0; c < C; ++c) {
          ops.axpy(dlogits[c], dropped.data(), g_ow.data() + c * hw, hw);
          g_ob[c] += dlogits[c];
        }
        if (hidden) {
          std::fill(dact.begin(), dact.end(), 0.0);
          for (std::size_t c = 0; c < C; ++c)
            ops.axpy(dlogits[c], head.output_weights.data.data() + c * hw, dact.data(),
                     hw);
          for (std::size_t j = 0; j < hw; ++j)
            dz[j] = z[j] > 0.0 ? dact[j] * keep[j] : 0.0;
          for (std::size_t j = 0; j < hw; ++j) {
            if (dz[j] != 0.0) ops.axpy(dz[j], x.data(), g_hw.data() + j * d, d);
            g_hb[j] += dz[j];
          }
        }
      }

      if (!std::isfinite(batch_loss))
        fail(strfmt("train: non-finite loss in epoch %zu, batch %zu (samples %zu..%zu)",
                    epoch, batch_index, start, start + bsz - 1));

      if (config.weight_decay > 0.0) {
        const double shrink = 1.0 - lr * config.weight_decay;
        ops.scale(shrink, head.output_weights.data.data(), C * hw);
        if (hidden) ops.scale(shrink, head.hidden_weights.data.data(), hw * d);
      }
      const double step = -lr / static_cast<double>(bsz);
      ops.axpy(step, g_ow.data(), head.output_weights.data.data(), C * hw);
      for (std::size_t c = 0; c < C; ++c) head.output_bias[c] += step * g_ob[c];
      if (hidden) {
        ops.axpy(step, g_hw.data(), head.hidden_weights.data.data(), hw * d);
        for (std::size_t j = 0; j < hw; ++j) head.hidden_bias[j] += step * g_hb[j];
      }
    }
    lr *= config.lr_decay_per_epoch;
  }
  return head;
}

namespace {

void write_row(std::ofstream& out, const char* tag, const double* v, std::size_t n) {
  out << tag;
  for (std::size_t i = 0; i < n; ++i) out << ' ' << fmt_g17(v[i]);
  out << '\n';
}

std::vector<double> read_row(std::istream& in, const std::string& path, const char* tag,
                             std::size_t n) {
  std::string line;
  if (!std::getline(in, line)) fail(strfmt("%s: truncated, expected '%s' row", path.c_str(), tag));
  std::istringstream ss(line);
  std::string got;
  ss >> got;
  if (got != tag) fail(strfmt("%s: expected row tag '%s', found '%s'", path.c_str(), tag, got.c_str()));
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(ss >> v[i])) fail(strfmt("%s: row '%s' needs %zu values", path.c_str(), tag, n));
  return v;
}

}  // namespace

void save_head(const ClassifierHead& head, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(strfmt("cannot write checkpoint '%s'", path.c_str()));
  out << "alpool-head 1\n";
  out << "dim " << head.input_dim << '\n';
  out << "hidden " << head.hidden_width << '\n';
  out << "classes " << head.num_classes << '\n';
  out << "dropout " << fmt_g17(head.dropout_rate) << '\n';
  if (head.hidden_width > 0) {
    for (std::size_t j = 0; j < head.hidden_width; ++j)
      write_row(out, "hw", head.hidden_weights.row(j), head.input_dim);
    write_row(out, "hb", head.hidden_bias.data(), head.hidden_width);
  }
  for (std::size_t c = 0; c < head.num_classes; ++c)
    write_row(out, "ow", head.output_weights.row(c), head.feature_width());
  write_row(out, "ob", head.output_bias.data(), head.num_classes);
  if (!out) fail(strfmt("write failure on '%s'", path.c_str()));
}

ClassifierHead load_head(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(strfmt("cannot open checkpoint '%s'", path.c_str()));
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "alpool-head" || version != 1)
    fail(strfmt("%s: not an alpool head checkpoint", path.c_str()));

  auto read_field = [&](const char* name) -> double {
    std::string key;
    double value = 0.0;
    if (!(in >> key >> value) || key != name)
      fail(strfmt("%s: malformed header, expected '%s'", path.c_str(), name));
    return value;
  };
  ClassifierHead head;
  head.input_dim = static_cast<std::size_t>(read_field("dim"));
  head.hidden_width = static_cast<std::size_t>(read_field("hidden"));
  head.num_classes = static_cast<std::size_t>(read_field("classes"));
  head.dropout_rate = read_field("dropout");
  if (head.input_dim == 0 || head.num_classes < 2 ||
      !(head.dropout_rate >= 0.0 && head.dropout_rate < 1.0))
    fail(strfmt("%s: invalid header values", path.c_str()));
  std::string rest;
  std::getline(in, rest);  // consume end of header line

  if (head.hidden_width > 0) {
    head.hidden_weights = Matrix(head.hidden_width, head.input_dim);
    for (std::size_t j = 0; j < head.hidden_width; ++j) {
      auto row = read_row(in, path, "hw", head.input_dim);
      std::copy(row.begin(), row.end(), head.hidden_weights.row(j));
    }
    head.hidden_bias = read_row(in, path, "hb", head.hidden_width);
  }
  head.output_weights = Matrix(head.num_classes, head.feature_width());
  for (std::size_t c = 0; c < head.num_classes; ++c) {
    auto row = read_row(in, path, "ow", head.feature_width());
    std::copy(row.begin(), row.end(), head.output_weights.row(c));
  }
  head.output_bias = read_row(in, path, "ob", head.num_classes);
  return head;
}

}  // namespace alpool
