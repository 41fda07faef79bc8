#include "alpool/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "alpool/rng.hpp"
#include "alpool/util.hpp"

namespace alpool {

void SyntheticSpec::validate() const {
  if (num_classes < 2) fail_arg("synthetic spec: num_classes must be >= 2");
  if (dim == 0) fail_arg("synthetic spec: dim must be positive");
  if (!(cluster_separation > 0.0))
    fail_arg("synthetic spec: cluster_separation must be > 0");
  const struct { const char* name; const std::vector<std::size_t>* counts; } splits[] = {
      {"train_counts", &train_counts},
      {"valid_counts", &valid_counts},
      {"test_counts", &test_counts},
  };
  for (const auto& s : splits) {
    if (s.counts->size() != num_classes)
      fail_arg(strfmt("synthetic spec: %s has %zu entries, expected %zu", s.name,
                      s.counts->size(), num_classes));
    if (std::accumulate(s.counts->begin(), s.counts->end(), std::size_t{0}) == 0)
      fail_arg(strfmt("synthetic spec: %s is all zero", s.name));
  }
}

std::vector<std::size_t> scale_counts(const std::vector<double>& weights,
                                      std::size_t total) {
  if (weights.empty()) fail_arg("scale_counts: empty weight vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      fail_arg("scale_counts: weights must be finite and non-negative");
    sum += w;
  }
  if (sum <= 0.0) fail_arg("scale_counts: weights sum to zero");

  std::vector<std::size_t> counts(weights.size());
  std::vector<double> remainders(weights.size());
  std::size_t allocated = 0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    const double share = static_cast<double>(total) * weights[c] / sum;
    counts[c] = static_cast<std::size_t>(std::floor(share));
    remainders[c] = share - std::floor(share);
    allocated += counts[c];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];  // ties keep ascending class index
  });
  for (std::size_t k = 0; allocated < total; ++k, ++allocated)
    ++counts[order[k % order.size()]];
  return counts;
}

namespace {

SyntheticSpec preset_from(std::vector<double> proportions, std::size_t train_total,
                          std::size_t valid_total, std::size_t test_total) {
  SyntheticSpec spec;
  spec.num_classes = proportions.size();
  spec.dim = 32;
  spec.cluster_separation = 3.0;
  spec.train_counts = scale_counts(proportions, train_total);
  spec.valid_counts = scale_counts(proportions, valid_total);
  spec.test_counts = scale_counts(proportions, test_total);
  return spec;
}

}  // namespace

SyntheticSpec dr_like_preset() {
  return preset_from({6150, 588, 1283, 221, 166}, 5000, 1000, 2000);
}

SyntheticSpec isic_like_preset() {
  return preset_from({1113, 6705, 514, 327, 1099, 115, 142}, 6000, 1500, 2515);
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t C = spec.num_classes, d = spec.dim;
  if (d < C)
    fail_arg(strfmt("generate_synthetic: dim %zu too small for %zu orthogonal class "
                    "directions, need dim >= %zu",
                    d, C, C));

  // Orthonormal class directions: Gram-Schmidt over seeded Gaussian draws.
  Rng basis_rng(derive_seed(spec.rng_seed, "synth_basis"));
  std::vector<std::vector<double>> q;
  q.reserve(C);
  while (q.size() < C) {
    std::vector<double> v(d);
    for (double& x : v) x = basis_rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : q) {
        double proj = 0.0;
        for (std::size_t i = 0; i < d; ++i) proj += v[i] * u[i];
        for (std::size_t i = 0; i < d; ++i) v[i] -= proj * u[i];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;  // degenerate draw: retry
    for (double& x : v) x /= norm;
    q.push_back(std::move(v));
  }
  // Means scale/sqrt(2) apart from the origin along orthogonal directions are
  // exactly `cluster_separation` apart from each other.
  const double scale = spec.cluster_separation / std::sqrt(2.0);

  const std::vector<std::size_t>* split_counts[] = {&spec.train_counts,
                                                    &spec.valid_counts,
                                                    &spec.test_counts};
  const Split split_tags[] = {Split::train, Split::valid, Split::test};

  std::size_t total = 0;
  for (const auto* counts : split_counts)
    total += std::accumulate(counts->begin(), counts->end(), std::size_t{0});

  Dataset ds;
  ds.dim = d;
  ds.num_classes = C;
  ds.features = Matrix(total, d);
  ds.labels.reserve(total);
  ds.splits.reserve(total);

  std::size_t row = 0;
  for (int s = 0; s < 3; ++s) {
    Rng noise_rng(derive_seed(spec.rng_seed, "synth_noise", static_cast<std::uint64_t>(s)));
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t n = 0; n < (*split_counts[s])[c]; ++n, ++row) {
        double* x = ds.features.row(row);
        for (std::size_t i = 0; i < d; ++i) x[i] = scale * q[c][i] + noise_rng.normal();
        ds.labels.push_back(static_cast<int>(c));
        ds.splits.push_back(split_tags[s]);
      }
    }
  }
  ds.validate();
  return ds;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_field(const std::string& s, const std::string& path, std::size_t line,
                          std::size_t col) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e || !std::isfinite(v))
    fail(strfmt("%s:%zu: column %zu: '%s' is not a finite number", path.c_str(), line,
                col + 1, s.c_str()));
  return v;
}

}  // namespace

Dataset load_dataset(const std::string& path, std::size_t expected_classes) {
  std::ifstream in(path);
  if (!in) fail(strfmt("cannot open dataset file '%s'", path.c_str()));

  std::string line;
  if (!std::getline(in, line)) fail(strfmt("%s: empty file, expected a header row", path.c_str()));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header.size() < 3 || header[header.size() - 2] != "label" ||
      header[header.size() - 1] != "split")
    fail(strfmt("%s:1: header must end with 'label,split' after the feature columns",
                path.c_str()));
  const std::size_t d = header.size() - 2;

  Dataset ds;
  ds.dim = d;
  std::vector<double> features;
  int max_label = -1;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size())
      fail(strfmt("%s:%zu: expected %zu columns, found %zu", path.c_str(), lineno,
                  header.size(), fields.size()));
    for (std::size_t c = 0; c < d; ++c)
      features.push_back(parse_double_field(fields[c], path, lineno, c));

    const std::string& label_str = fields[d];
    int label = 0;
    auto [p, ec] = std::from_chars(label_str.data(), label_str.data() + label_str.size(), label);
    if (ec != std::errc{} || p != label_str.data() + label_str.size() || label < 0)
      fail(strfmt("%s:%zu: '%s' is not a valid class label", path.c_str(), lineno,
                  label_str.c_str()));
    if (expected_classes > 0 && static_cast<std::size_t>(label) >= expected_classes)
      fail(strfmt("%s:%zu: label %d out of range for %zu classes", path.c_str(), lineno,
                  label, expected_classes));
    max_label = std::max(max_label, label);
    ds.labels.push_back(label);

    const auto split = parse_split(fields[d + 1]);
    if (!split)
      fail(strfmt("%s:%zu: unknown split '%s' (expected train, valid, or test)",
                  path.c_str(), lineno, fields[d + 1].c_str()));
    ds.splits.push_back(*split);
  }
  if (ds.labels.empty()) fail(strfmt("%s: no data rows", path.c_str()));

  ds.num_classes = expected_classes > 0 ? expected_classes
                                        : static_cast<std::size_t>(max_label + 1);
  ds.features = Matrix(ds.labels.size(), d);
  ds.features.data = std::move(features);
  ds.validate();
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) fail(strfmt("cannot write dataset file '%s'", path.c_str()));
  for (std::size_t c = 0; c < ds.dim; ++c) out << 'f' << c << ',';
  out << "label,split\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double* x = ds.features.row(i);
    for (std::size_t c = 0; c < ds.dim; ++c) out << fmt_g17(x[c]) << ',';
    out << ds.labels[i] << ',' << split_name(ds.splits[i]) << '\n';
  }
  if (!out) fail(strfmt("write failure on '%s'", path.c_str()));
}

}  // namespace alpool
