#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace mafol::kernels {

// Dense double-precision primitives behind jet and Taylor-series arithmetic.
// A scalar reference backend always exists; SIMD variants (AVX2 on x86-64,
// NEON on aarch64) are selected once at startup from CPU capabilities and can
// be overridden with the MAFOL_KERNELS environment variable or force_backend().
struct Backend {
  const char* name;

  // y[i] += a * x[i]
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // x[i] *= a
  void (*scal)(std::size_t n, double a, double* x);
  // sum_i x[i] * y[i]
  double (*dot)(std::size_t n, const double* x, const double* y);
  // Truncated Cauchy product: out[i+j] += a[i]*b[j] for i<na, j<nb, i+j<nout.
  void (*conv_acc)(const double* a, std::size_t na, const double* b,
                   std::size_t nb, double* out, std::size_t nout);
  // Indexed contraction, CSR layout grouped by output row:
  //   out[r] += sum over k in [row_ptr[r], row_ptr[r+1]) of a[ia[k]] * b[ib[k]]
  void (*pair_acc)(const std::uint32_t* row_ptr, std::size_t nrows,
                   const std::uint32_t* ia, const std::uint32_t* ib,
                   const double* a, const double* b, double* out);
};

const Backend& scalar_backend();

#if defined(__x86_64__) || defined(_M_X64)
// Non-null iff the CPU supports AVX2+FMA.
const Backend* avx2_backend();
#endif
#if defined(__aarch64__)
const Backend* neon_backend();
#endif

// Backend in use; resolved on first call.
const Backend& active();

// Override selection ("scalar", "avx2", "neon", "auto"). Throws on a name
// that is unknown or unsupported on this machine. Intended for tests.
void force_backend(std::string_view name);

}  // namespace mafol::kernels
