#include <cmath>
#include <vector>

#include "kernels_impl.hpp"

namespace alpool::kernels {

double softmax_entropy_from_logits(const double* logits, std::size_t n) {
  double m = logits[0];
  for (std::size_t c = 1; c < n; ++c) {
    if (logits[c] > m) m = logits[c];
  }
  double s = 0.0;  // sum of exp(t_c)
  double w = 0.0;  // sum of exp(t_c) * t_c
  for (std::size_t c = 0; c < n; ++c) {
    const double t = logits[c] - m;
    const double e = std::exp(t);
    s += e;
    w += e * t;
  }
  const double h = std::log(s) - w / s;
  return h < 0.0 ? 0.0 : h;  // guard against -0 and rounding
}

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{
      "scalar",
      dot_scalar,
      axpy_scalar,
      scale_scalar,
      sqdist_scalar,
      matvec_impl<dot_scalar>,
      head_entropy_sum_impl<dot_scalar>,
  };
  return ops;
}

}  // namespace alpool::kernels
