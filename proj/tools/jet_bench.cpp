// Throughput check for the dense kernels behind jet and series arithmetic:
// times the multivariate truncated product and the orbit-style univariate
// convolution on each compiled-in backend.

#include <chrono>
#include <cstdio>
#include <random>

#include "mafol/jet.hpp"

using namespace mafol;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_loop(F&& f, int iters) {
  f();  // warm up
  const double t0 = now();
  for (int i = 0; i < iters; ++i) f();
  return (now() - t0) / iters;
}

void bench_backend(const char* name) {
  kernels::force_backend(name);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (const auto [m, K] : {std::pair{4, 3}, std::pair{6, 4}, std::pair{4, 8}}) {
    const JetSpace& sp = JetSpace::get(m, K);
    Jet<double> a(sp), b(sp);
    for (std::size_t s = 0; s < sp.size(); ++s) {
      a[s] = u(rng);
      b[s] = u(rng);
    }
    volatile double sink = 0.0;
    const double t = time_loop(
        [&] {
          Jet<double> c = a * b;
          sink = sink + c.value();
        },
        20000);
    std::printf("%-12s jet mul  m=%d K=%d (%4zu coeffs): %8.1f ns\n", name, m,
                K, sp.size(), t * 1e9);
  }

  {
    const int K = 20;
    TSeries<double> a(K, 0.0), b(K, 0.0);
    for (int k = 0; k <= K; ++k) {
      a[k] = u(rng);
      b[k] = u(rng);
    }
    volatile double sink = 0.0;
    const double t = time_loop(
        [&] {
          TSeries<double> c = a * b;
          sink = sink + c.value();
        },
        100000);
    std::printf("%-12s series mul K=%d:                %8.1f ns\n", name, K,
                t * 1e9);
  }
}

}  // namespace

int main() {
  bench_backend("scalar");
#if defined(__x86_64__) || defined(_M_X64)
  if (kernels::avx2_backend()) {
    bench_backend("avx2");
    bench_backend("hybrid-avx2");
  }
#endif
#if defined(__aarch64__)
  bench_backend("neon");
#endif
  return 0;
}
