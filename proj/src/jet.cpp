#include "mafol/jet.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace mafol {
namespace {

std::size_t binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::size_t JetSpace::table_size(int nvars, int order) {
  return binom(static_cast<std::size_t>(nvars + order), order);
}

JetSpace::JetSpace(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || nvars > kMaxVars)
    throw DomainError("jet space supports 1..6 variables");
  if (order < 0 || order > kMaxOrder)
    throw DomainError("jet order exceeds the configured maximum");

  // Enumerate multi-indices by total degree, lexicographic within a degree.
  const std::size_t n = table_size(nvars, order);
  exps_.reserve(n);
  deg_.reserve(n);
  for (int d = 0; d <= order; ++d) {
    Exponents e{};
    // First index of degree d in lex order: all of d on the first variable.
    e[0] = static_cast<std::uint8_t>(d);
    while (true) {
      exps_.push_back(e);
      deg_.push_back(static_cast<std::uint8_t>(d));
      // Next composition of d into nvars parts, lex descending on e[0..].
      int i = nvars - 2;
      while (i >= 0 && e[i] == 0) --i;
      if (i < 0) break;
      const int rest = e[nvars - 1] + 1;
      e[i] -= 1;
      for (int j = i + 1; j < nvars; ++j) e[j] = 0;
      e[i + 1] = static_cast<std::uint8_t>(rest);
    }
  }

  // Rank lookup by mixed-radix encoding (base order+1 per variable).
  const int base = order + 1;
  std::size_t radix_size = 1;
  for (int v = 0; v < nvars; ++v) radix_size *= static_cast<std::size_t>(base);
  rank_.assign(radix_size, UINT32_MAX);
  for (std::size_t s = 0; s < exps_.size(); ++s) {
    std::size_t code = 0;
    for (int v = nvars - 1; v >= 0; --v)
      code = code * base + exps_[s][v];
    rank_[code] = static_cast<std::uint32_t>(s);
  }
  for (int v = 0; v < nvars; ++v) {
    Exponents e{};
    e[v] = 1;
    var_slot_[v] = order >= 1 ? index_of(e) : 0;
  }

  // Truncated product table grouped by output slot.
  std::vector<std::uint32_t> counts(exps_.size(), 0);
  for (std::size_t i = 0; i < exps_.size(); ++i)
    for (std::size_t j = 0; j < exps_.size(); ++j) {
      if (deg_[i] + deg_[j] > order) continue;
      Exponents e{};
      for (int v = 0; v < nvars; ++v)
        e[v] = static_cast<std::uint8_t>(exps_[i][v] + exps_[j][v]);
      ++counts[index_of(e)];
    }
  mul_row_ptr_.assign(exps_.size() + 1, 0);
  for (std::size_t r = 0; r < exps_.size(); ++r)
    mul_row_ptr_[r + 1] = mul_row_ptr_[r] + counts[r];
  mul_ia_.assign(mul_row_ptr_.back(), 0);
  mul_ib_.assign(mul_row_ptr_.back(), 0);
  std::vector<std::uint32_t> fill(mul_row_ptr_.begin(),
                                  mul_row_ptr_.end() - 1);
  for (std::size_t i = 0; i < exps_.size(); ++i)
    for (std::size_t j = 0; j < exps_.size(); ++j) {
      if (deg_[i] + deg_[j] > order) continue;
      Exponents e{};
      for (int v = 0; v < nvars; ++v)
        e[v] = static_cast<std::uint8_t>(exps_[i][v] + exps_[j][v]);
      const std::size_t r = index_of(e);
      mul_ia_[fill[r]] = static_cast<std::uint32_t>(i);
      mul_ib_[fill[r]] = static_cast<std::uint32_t>(j);
      ++fill[r];
    }

  // Derivative tables into the space one order down.
  if (order >= 1) {
    const std::size_t lo_size = table_size(nvars, order - 1);
    for (int v = 0; v < nvars; ++v) {
      deriv_src_[v].resize(lo_size);
      deriv_fac_[v].resize(lo_size);
      for (std::size_t j = 0; j < lo_size; ++j) {
        Exponents e = exps_[j];  // prefix property: slot j has degree <= K-1
        e[v] += 1;
        deriv_src_[v][j] = static_cast<std::uint32_t>(index_of(e));
        deriv_fac_[v][j] = static_cast<double>(e[v]);
      }
    }
  }
}

std::size_t JetSpace::index_of(const Exponents& e) const {
  const int base = order_ + 1;
  std::size_t code = 0;
  for (int v = nvars_ - 1; v >= 0; --v)
    code = code * base + e[v];
  const std::uint32_t r = rank_[code];
  if (r == UINT32_MAX) throw DomainError("multi-index outside jet space");
  return r;
}

const JetSpace& JetSpace::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache
             .emplace(key, std::unique_ptr<JetSpace>(new JetSpace(nvars,
                                                                  order)))
             .first;
  }
  return *it->second;
}

namespace {

template <class T>
DetLog det_log_impl(int n, std::vector<T>& a) {
  double log_abs = 0.0;
  std::complex<double> phase(1.0, 0.0);
  for (int k = 0; k < n; ++k) {
    int pr = k, pc = k;
    double best = -1.0;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        const double m = std::abs(a[i * n + j]);
        if (m > best) {
          best = m;
          pr = i;
          pc = j;
        }
      }
    if (best == 0.0)
      return {-std::numeric_limits<double>::infinity(), {0.0, 0.0}};
    if (pr != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[pr * n + j]);
      phase = -phase;
    }
    if (pc != k) {
      for (int i = 0; i < n; ++i) std::swap(a[i * n + k], a[i * n + pc]);
      phase = -phase;
    }
    const T p = a[k * n + k];
    log_abs += std::log(std::abs(p));
    phase *= std::complex<double>(p) / std::abs(p);
    for (int i = k + 1; i < n; ++i) {
      const T f = a[i * n + k] / p;
      for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return {log_abs, phase};
}

}  // namespace

DetLog det_log(int n, std::vector<std::complex<double>> a) {
  return det_log_impl(n, a);
}

DetLog det_log_real(int n, std::vector<double> a) {
  return det_log_impl(n, a);
}

}  // namespace mafol
