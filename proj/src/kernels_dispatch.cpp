#include "mafol/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mafol::kernels {
namespace {

#if defined(__x86_64__) || defined(_M_X64)
// Gathers only pay off once the contraction rows are long enough; measured
// cross-over on AVX2 hardware sits near a dozen pairs per row. Short-row
// tables (low jet orders, the hot path) stay scalar.
void pair_acc_hybrid(const std::uint32_t* row_ptr, std::size_t nrows,
                     const std::uint32_t* ia, const std::uint32_t* ib,
                     const double* a, const double* b, double* out) {
  const std::size_t pairs = row_ptr[nrows];
  const Backend& wide = *avx2_backend();
  if (nrows == 0 || pairs < 12 * nrows) {
    scalar_backend().pair_acc(row_ptr, nrows, ia, ib, a, b, out);
  } else {
    wide.pair_acc(row_ptr, nrows, ia, ib, a, b, out);
  }
}

const Backend* hybrid_backend() {
  const Backend* wide = avx2_backend();
  if (!wide) return nullptr;
  static const Backend b{"hybrid-avx2", wide->axpy,     wide->scal,
                         wide->dot,     wide->conv_acc, pair_acc_hybrid};
  return &b;
}
#endif

const Backend* pick(std::string_view name) {
  if (name == "scalar") return &scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2") {
    const Backend* b = avx2_backend();
    if (!b) throw std::runtime_error("kernel backend 'avx2' not supported by this CPU");
    return b;
  }
  if (name == "hybrid-avx2") {
    const Backend* b = hybrid_backend();
    if (!b) throw std::runtime_error("kernel backend 'hybrid-avx2' not supported by this CPU");
    return b;
  }
#endif
#if defined(__aarch64__)
  if (name == "neon") return neon_backend();
#endif
  if (name == "auto") {
#if defined(__x86_64__) || defined(_M_X64)
    if (const Backend* b = hybrid_backend()) return b;
#endif
#if defined(__aarch64__)
    return neon_backend();
#endif
    return &scalar_backend();
  }
  throw std::runtime_error("unknown kernel backend '" + std::string(name) + "'");
}

std::atomic<const Backend*> g_active{nullptr};

}  // namespace

const Backend& active() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (!b) {
    const char* env = std::getenv("MAFOL_KERNELS");
    b = pick(env && *env ? std::string_view(env) : std::string_view("auto"));
    g_active.store(b, std::memory_order_release);
  }
  return *b;
}

void force_backend(std::string_view name) {
  g_active.store(pick(name), std::memory_order_release);
}

}  // namespace mafol::kernels
