#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace alpool::kernels {

// One lane of arithmetic kernels. `scalar` is the reference; SIMD lanes must
// agree with it up to floating-point reassociation and are equivalence-tested
// against it. All lanes share the same exp/log tail (softmax_entropy_from_logits),
// so they differ only in the linear algebra.
struct Ops {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // out = W x + bias, W row-major rows x cols, bias may be null
  void (*matvec)(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 const double* bias, double* out);
  // Sum of softmax entropies of (W a_k + bias) over `count` activation rows
  // a_k of length `dim`; W is classes x dim. per_sample may be null.
  double (*head_entropy_sum)(const double* w, const double* bias, std::size_t classes,
                             std::size_t dim, const double* acts, std::size_t count,
                             double* per_sample);
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // null when the CPU or build lacks AVX2+FMA
const Ops* neon_ops();  // null off aarch64

// Lane used by the library. Picked once: ALPOOL_KERNELS env var when set
// ("scalar", "avx2", "neon", "auto"), otherwise the best available.
const Ops& active();

// Force a lane by name; returns false (and changes nothing) if unavailable.
bool select(std::string_view name);

std::vector<const Ops*> available();

// Entropy in nats of softmax(logits), computed as log(S) - sum(p_c * t_c)
// with t_c = logits[c] - max and S = sum(exp(t_c)). Exact 0 for one-hot.
double softmax_entropy_from_logits(const double* logits, std::size_t n);

}  // namespace alpool::kernels
