// NEON variants (aarch64). NEON is baseline on aarch64, so no runtime probe
// beyond the architecture itself is needed.

#include "mafol/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace mafol::kernels {
namespace {

void axpy_neon(std::size_t n, double a, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_neon(std::size_t n, double a, double* x) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double dot_neon(std::size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void conv_acc_neon(const double* a, std::size_t na, const double* b,
                   std::size_t nb, double* out, std::size_t nout) {
  for (std::size_t i = 0; i < na && i < nout; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    const std::size_t jmax = nb < nout - i ? nb : nout - i;
    axpy_neon(jmax, ai, b, out + i);
  }
}

void pair_acc_neon(const std::uint32_t* row_ptr, std::size_t nrows,
                   const std::uint32_t* ia, const std::uint32_t* ib,
                   const double* a, const double* b, double* out) {
  // No doubleword gather on NEON; keep the contraction scalar per pair but
  // let the compiler pipeline the independent rows.
  for (std::size_t r = 0; r < nrows; ++r) {
    double s = 0.0;
    for (std::uint32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      s += a[ia[k]] * b[ib[k]];
    out[r] += s;
  }
}

}  // namespace

const Backend* neon_backend() {
  static const Backend b{"neon",        axpy_neon, scal_neon,
                         dot_neon,      conv_acc_neon,
                         pair_acc_neon};
  return &b;
}

}  // namespace mafol::kernels

#endif  // aarch64
