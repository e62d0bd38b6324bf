// AVX2+FMA variants of the dense kernels. This translation unit is compiled
// with -mavx2 -mfma on x86-64 only; callers must gate on avx2_backend() which
// checks CPU support at runtime before handing these out.

#include "mafol/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace mafol::kernels {
namespace {

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_avx2(std::size_t n, double a, double* x) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void conv_acc_avx2(const double* a, std::size_t na, const double* b,
                   std::size_t nb, double* out, std::size_t nout) {
  for (std::size_t i = 0; i < na && i < nout; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    const std::size_t jmax = nb < nout - i ? nb : nout - i;
    axpy_avx2(jmax, ai, b, out + i);
  }
}

void pair_acc_avx2(const std::uint32_t* row_ptr, std::size_t nrows,
                   const std::uint32_t* ia, const std::uint32_t* ib,
                   const double* a, const double* b, double* out) {
  for (std::size_t r = 0; r < nrows; ++r) {
    std::uint32_t k = row_ptr[r];
    const std::uint32_t kend = row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= kend; k += 4) {
      const __m128i via =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(ia + k));
      const __m128i vib =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(ib + k));
      const __m256d va = _mm256_i32gather_pd(a, via, 8);
      const __m256d vb = _mm256_i32gather_pd(b, vib, 8);
      acc = _mm256_fmadd_pd(va, vb, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; k < kend; ++k) s += a[ia[k]] * b[ib[k]];
    out[r] += s;
  }
}

}  // namespace

const Backend* avx2_backend() {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
    return nullptr;
  static const Backend b{"avx2",        axpy_avx2, scal_avx2,
                         dot_avx2,      conv_acc_avx2,
                         pair_acc_avx2};
  return &b;
}

}  // namespace mafol::kernels

#endif  // x86-64
