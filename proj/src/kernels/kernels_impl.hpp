#pragma once

#include <cstddef>

#include "alpool/kernels.hpp"

namespace alpool::kernels {

// Shared bodies for the kernels whose only lane-specific part is the dot
// product. Keeps matvec and the entropy sweep identical across lanes apart
// from the inner linear algebra.

template <double (*DotFn)(const double*, const double*, std::size_t)>
void matvec_impl(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 const double* bias, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = (bias ? bias[r] : 0.0) + DotFn(w + r * cols, x, cols);
  }
}

template <double (*DotFn)(const double*, const double*, std::size_t)>
double head_entropy_sum_impl(const double* w, const double* bias, std::size_t classes,
                             std::size_t dim, const double* acts, std::size_t count,
                             double* per_sample) {
  constexpr std::size_t kStack = 64;
  double stack_logits[kStack];
  std::vector<double> heap_logits;
  double* logits = stack_logits;
  if (classes > kStack) {
    heap_logits.resize(classes);
    logits = heap_logits.data();
  }
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double* a = acts + k * dim;
    for (std::size_t c = 0; c < classes; ++c) {
      logits[c] = bias[c] + DotFn(w + c * dim, a, dim);
    }
    const double h = softmax_entropy_from_logits(logits, classes);
    if (per_sample) per_sample[k] = h;
    total += h;
  }
  return total;
}

}  // namespace alpool::kernels
