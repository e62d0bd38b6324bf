#include "mafol/kernels.hpp"

namespace mafol::kernels {
namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void conv_acc_scalar(const double* a, std::size_t na, const double* b,
                     std::size_t nb, double* out, std::size_t nout) {
  for (std::size_t i = 0; i < na && i < nout; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    const std::size_t jmax = nb < nout - i ? nb : nout - i;
    double* o = out + i;
    for (std::size_t j = 0; j < jmax; ++j) o[j] += ai * b[j];
  }
}

void pair_acc_scalar(const std::uint32_t* row_ptr, std::size_t nrows,
                     const std::uint32_t* ia, const std::uint32_t* ib,
                     const double* a, const double* b, double* out) {
  for (std::size_t r = 0; r < nrows; ++r) {
    double s = 0.0;
    for (std::uint32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      s += a[ia[k]] * b[ib[k]];
    out[r] += s;
  }
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b{"scalar",        axpy_scalar, scal_scalar,
                         dot_scalar,      conv_acc_scalar,
                         pair_acc_scalar};
  return b;
}

}  // namespace mafol::kernels
