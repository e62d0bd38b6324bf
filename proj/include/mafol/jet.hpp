#pragma once

// Truncated Taylor arithmetic: dense multivariate jets over R^m (m <= 6),
// univariate series over an arbitrary coefficient ring, and dense linear
// solves over such rings. Every derivative used anywhere in the project is an
// exact Taylor coefficient produced here; there are no finite differences on
// the primary paths.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "mafol/errors.hpp"
#include "mafol/kernels.hpp"

namespace mafol {

// ---------------------------------------------------------------------------
// Scalar helpers shared by the ring types.

inline double leading_abs(double x) { return std::abs(x); }
inline double leading_abs(const std::complex<double>& x) { return std::abs(x); }

inline double zero_like(double) { return 0.0; }
inline std::complex<double> zero_like(const std::complex<double>&) {
  return {0.0, 0.0};
}
inline double constant_like(double, double v) { return v; }
inline std::complex<double> constant_like(const std::complex<double>&,
                                          double v) {
  return {v, 0.0};
}

// ---------------------------------------------------------------------------
// Multi-index bookkeeping for a dense jet space (nvars, order), graded-lex
// slot layout. Tables are immutable and shared; coefficients of degree <= k
// always occupy the first size(nvars, k) slots, so truncation is a prefix.

class JetSpace {
 public:
  static constexpr int kMaxVars = 6;
  static constexpr int kMaxOrder = 12;

  using Exponents = std::array<std::uint8_t, kMaxVars>;

  static const JetSpace& get(int nvars, int order);
  static std::size_t table_size(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return exps_.size(); }

  const Exponents& exponents(std::size_t slot) const { return exps_[slot]; }
  int degree(std::size_t slot) const { return deg_[slot]; }
  std::size_t index_of(const Exponents& e) const;
  std::size_t var_slot(int v) const { return var_slot_[v]; }

  // Product table, CSR grouped by output slot.
  const std::vector<std::uint32_t>& mul_rows() const { return mul_row_ptr_; }
  const std::vector<std::uint32_t>& mul_ia() const { return mul_ia_; }
  const std::vector<std::uint32_t>& mul_ib() const { return mul_ib_; }

  // Derivative maps into the space one order down: for slot j there,
  // d/dx_v picks coefficient deriv_src(v, j) here times deriv_factor(v, j).
  std::uint32_t deriv_src(int v, std::size_t j) const {
    return deriv_src_[v][j];
  }
  double deriv_factor(int v, std::size_t j) const { return deriv_fac_[v][j]; }

 private:
  JetSpace(int nvars, int order);

  int nvars_, order_;
  std::vector<Exponents> exps_;
  std::vector<std::uint8_t> deg_;
  std::vector<std::uint32_t> rank_;  // mixed-radix exponent encoding -> slot
  std::array<std::size_t, kMaxVars> var_slot_{};
  std::vector<std::uint32_t> mul_row_ptr_, mul_ia_, mul_ib_;
  std::array<std::vector<std::uint32_t>, kMaxVars> deriv_src_;
  std::array<std::vector<double>, kMaxVars> deriv_fac_;
};

// ---------------------------------------------------------------------------
// Dense multivariate jet (all mixed partials up to the space's order).
// Coefficients are Taylor coefficients: derivative / multi-factorial.

template <class S>
class Jet {
 public:
  Jet() : sp_(nullptr) {}
  explicit Jet(const JetSpace& sp, const S& value = S{})
      : sp_(&sp), c_(sp.size(), zero_like(value)) {
    c_[0] = value;
  }

  static Jet constant(const JetSpace& sp, const S& v) { return Jet(sp, v); }
  static Jet variable(const JetSpace& sp, int v, const S& value) {
    Jet j(sp, value);
    if (sp.order() >= 1)
      j.c_[sp.var_slot(v)] = constant_like(value, 1.0);
    return j;
  }

  const JetSpace& space() const { return *sp_; }
  bool empty() const { return sp_ == nullptr; }
  int order() const { return sp_->order(); }
  int nvars() const { return sp_->nvars(); }
  std::size_t size() const { return c_.size(); }

  const S& value() const { return c_[0]; }
  const S& operator[](std::size_t slot) const { return c_[slot]; }
  S& operator[](std::size_t slot) { return c_[slot]; }
  const S& coeff(const JetSpace::Exponents& e) const {
    return c_[sp_->index_of(e)];
  }
  // First-order coefficient of variable v (the partial derivative).
  const S& partial(int v) const {
    if (sp_->order() < 1) throw DomainError("partial needs jet order >= 1");
    return c_[sp_->var_slot(v)];
  }

  std::span<const S> coeffs() const { return c_; }
  std::span<S> coeffs() { return c_; }

  Jet truncated(int new_order) const {
    const JetSpace& sp = JetSpace::get(sp_->nvars(), new_order);
    Jet out(sp, zero_like(c_[0]));
    const std::size_t n = std::min(out.c_.size(), c_.size());
    for (std::size_t i = 0; i < n; ++i) out.c_[i] = c_[i];
    return out;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator+=(const S& s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(const S& s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(const S& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend Jet operator+(Jet a, const S& s) { return a += s; }
  friend Jet operator+(const S& s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, const S& s) { return a -= s; }
  friend Jet operator-(const S& s, Jet a) {
    a = -std::move(a);
    return a += s;
  }
  friend Jet operator*(Jet a, const S& s) { return a *= s; }
  friend Jet operator*(const S& s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out(*a.sp_, zero_like(a.c_[0]));
    const auto& rows = a.sp_->mul_rows();
    const auto& ia = a.sp_->mul_ia();
    const auto& ib = a.sp_->mul_ib();
    if constexpr (std::is_same_v<S, double>) {
      kernels::active().pair_acc(rows.data(), out.c_.size(), ia.data(),
                                 ib.data(), a.c_.data(), b.c_.data(),
                                 out.c_.data());
    } else {
      for (std::size_t r = 0; r < out.c_.size(); ++r) {
        S s = zero_like(a.c_[0]);
        for (std::uint32_t k = rows[r]; k < rows[r + 1]; ++k)
          s += a.c_[ia[k]] * b.c_[ib[k]];
        out.c_[r] = s;
      }
    }
    return out;
  }

  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
  friend Jet operator/(Jet a, const S& s) {
    const S inv = constant_like(s, 1.0) / s;
    return a *= inv;
  }
  friend Jet operator/(const S& s, const Jet& b) { return inverse(b) * s; }

  Jet derivative(int v) const {
    if (sp_->order() < 1) throw DomainError("derivative needs jet order >= 1");
    const JetSpace& lo = JetSpace::get(sp_->nvars(), sp_->order() - 1);
    Jet out(lo, zero_like(c_[0]));
    for (std::size_t j = 0; j < out.c_.size(); ++j)
      out.c_[j] = c_[sp_->deriv_src(v, j)] * sp_->deriv_factor(v, j);
    return out;
  }

  // Polynomial evaluation at jet arguments; args[v] must have zero constant
  // term and live in a common target space. Used for composing expansions.
  Jet compose(std::span<const Jet> args) const;

  friend Jet inverse(const Jet& g) {
    const S g0 = g.value();
    if (leading_abs(g0) == 0.0)
      throw DomainError("division by a jet with zero constant term");
    std::vector<S> f(g.order() + 1);
    S p = constant_like(g0, 1.0) / g0;
    for (int k = 0; k <= g.order(); ++k) {
      f[k] = p;
      p *= -(constant_like(g0, 1.0) / g0);
    }
    return g.horner(f);
  }

  friend Jet exp(const Jet& g) {
    std::vector<S> f(g.order() + 1);
    const S e0 = exp_scalar(g.value());
    double fact = 1.0;
    for (int k = 0; k <= g.order(); ++k) {
      f[k] = e0 * constant_like(g.value(), 1.0 / fact);
      fact *= (k + 1);
    }
    return g.horner(f);
  }

  friend Jet log(const Jet& g) {
    const S g0 = g.value();
    check_positive(g0, "log of a nonpositive value");
    std::vector<S> f(g.order() + 1);
    f[0] = log_scalar(g0);
    S invp = constant_like(g0, 1.0) / g0;
    S gpow = invp;
    double sign = 1.0;
    for (int k = 1; k <= g.order(); ++k) {
      f[k] = gpow * constant_like(g0, sign / k);
      gpow *= invp;
      sign = -sign;
    }
    return g.horner(f);
  }

  friend Jet sqrt(const Jet& g) {
    const S g0 = g.value();
    check_positive(g0, "sqrt of a nonpositive value");
    std::vector<S> f(g.order() + 1);
    f[0] = sqrt_scalar(g0);
    const S invg = constant_like(g0, 1.0) / g0;
    for (int k = 1; k <= g.order(); ++k)
      f[k] = f[k - 1] * invg * constant_like(g0, (1.5 - k) / k);
    return g.horner(f);
  }

  friend Jet sin(const Jet& g) { return g.sincos(true); }
  friend Jet cos(const Jet& g) { return g.sincos(false); }

  friend Jet pow(const Jet& g, int p) {
    if (p < 0) return inverse(pow(g, -p));
    Jet acc = Jet::constant(g.space(), constant_like(g.value(), 1.0));
    Jet base = g;
    unsigned e = static_cast<unsigned>(p);
    while (e) {
      if (e & 1u) acc = acc * base;
      base = base * base;
      e >>= 1u;
    }
    return acc;
  }

 private:
  static S exp_scalar(const S& x) {
    using std::exp;
    return exp(x);
  }
  static S log_scalar(const S& x) {
    using std::log;
    return log(x);
  }
  static S sqrt_scalar(const S& x) {
    using std::sqrt;
    return sqrt(x);
  }
  static void check_positive(const S& x, const char* what) {
    if constexpr (std::is_same_v<S, double>) {
      if (!(x > 0.0)) throw DomainError(what);
    } else {
      if (leading_abs(x) == 0.0) throw DomainError(what);
    }
  }

  // sum_k f[k] * (g - g0)^k by Horner; exact to the truncation order.
  Jet horner(const std::vector<S>& f) const {
    Jet h = *this;
    h.c_[0] = zero_like(c_[0]);
    Jet acc = Jet::constant(*sp_, f.back());
    for (int k = static_cast<int>(f.size()) - 2; k >= 0; --k) {
      acc = acc * h;
      acc.c_[0] += f[k];
    }
    return acc;
  }

  Jet sincos(bool want_sin) const {
    using std::cos;
    using std::sin;
    const S s0 = sin(c_[0]);
    const S c0 = cos(c_[0]);
    std::vector<S> f(order() + 1);
    double fact = 1.0;
    for (int k = 0; k <= order(); ++k) {
      const S base = (k % 2 == 0) ? (want_sin ? s0 : c0)
                                  : (want_sin ? c0 : s0);
      double sgn = 1.0;
      if (want_sin && (k % 4 == 2 || k % 4 == 3)) sgn = -1.0;
      if (!want_sin && (k % 4 == 1 || k % 4 == 2)) sgn = -1.0;
      f[k] = base * constant_like(c_[0], sgn / fact);
      fact *= (k + 1);
    }
    return horner(f);
  }

  const JetSpace* sp_;
  std::vector<S> c_;
};

template <class S>
double leading_abs(const Jet<S>& j) {
  return leading_abs(j.value());
}
template <class S>
Jet<S> zero_like(const Jet<S>& j) {
  return Jet<S>(j.space(), zero_like(j.value()));
}
template <class S>
Jet<S> constant_like(const Jet<S>& j, double v) {
  return Jet<S>(j.space(), constant_like(j.value(), v));
}

template <class S>
Jet<S> Jet<S>::compose(std::span<const Jet<S>> args) const {
  const JetSpace& target = args[0].space();
  // Power cache per variable, up to the maximal exponent that occurs.
  std::array<int, JetSpace::kMaxVars> maxe{};
  for (std::size_t s = 0; s < size(); ++s) {
    const auto& e = sp_->exponents(s);
    for (int v = 0; v < nvars(); ++v)
      maxe[v] = std::max(maxe[v], static_cast<int>(e[v]));
  }
  std::array<std::vector<Jet<S>>, JetSpace::kMaxVars> pw;
  for (int v = 0; v < nvars(); ++v) {
    pw[v].reserve(maxe[v] + 1);
    pw[v].push_back(Jet<S>(target, constant_like(args[0].value(), 1.0)));
    for (int e = 1; e <= maxe[v]; ++e) pw[v].push_back(pw[v][e - 1] * args[v]);
  }
  Jet<S> acc(target, zero_like(args[0].value()));
  constexpr bool kPlainScalar =
      std::is_same_v<S, double> || std::is_same_v<S, std::complex<double>>;
  for (std::size_t s = 0; s < size(); ++s) {
    if constexpr (kPlainScalar) {
      if (leading_abs(c_[s]) == 0.0) continue;
    }
    const auto& e = sp_->exponents(s);
    Jet<S> term(target, constant_like(args[0].value(), 1.0));
    bool first = true;
    for (int v = 0; v < nvars(); ++v) {
      if (e[v] == 0) continue;
      term = first ? pw[v][e[v]] : term * pw[v][e[v]];
      first = false;
    }
    if (first) {
      acc.coeffs()[0] += c_[s];  // constant monomial
    } else {
      acc += term * c_[s];
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Univariate truncated power series over an arbitrary coefficient ring S
// (S = double, complex<double>, Jet<double>, ...). Carrier of flow orbits.

template <class S>
class TSeries {
 public:
  TSeries() = default;
  TSeries(int order, const S& proto)
      : c_(static_cast<std::size_t>(order) + 1, zero_like(proto)) {}
  static TSeries constant(int order, const S& v) {
    TSeries t(order, v);
    t.c_[0] = v;
    return t;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const S& value() const { return c_[0]; }
  const S& operator[](std::size_t k) const { return c_[k]; }
  S& operator[](std::size_t k) { return c_[k]; }
  std::span<const S> coeffs() const { return c_; }

  TSeries& operator+=(const TSeries& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  TSeries& operator-=(const TSeries& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  TSeries& operator+=(const S& s) {
    c_[0] += s;
    return *this;
  }
  TSeries& operator-=(const S& s) {
    c_[0] -= s;
    return *this;
  }
  TSeries& operator*=(const S& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend TSeries operator+(TSeries a, const TSeries& b) { return a += b; }
  friend TSeries operator-(TSeries a, const TSeries& b) { return a -= b; }
  friend TSeries operator-(TSeries a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend TSeries operator+(TSeries a, const S& s) { return a += s; }
  friend TSeries operator+(const S& s, TSeries a) { return a += s; }
  friend TSeries operator-(TSeries a, const S& s) { return a -= s; }
  friend TSeries operator-(const S& s, TSeries a) {
    a = -std::move(a);
    return a += s;
  }
  friend TSeries operator*(TSeries a, const S& s) { return a *= s; }
  friend TSeries operator*(const S& s, TSeries a) { return a *= s; }

  friend TSeries operator*(const TSeries& a, const TSeries& b) {
    TSeries out(a.order(), zero_like(a.c_[0]));
    if constexpr (std::is_same_v<S, double>) {
      kernels::active().conv_acc(a.c_.data(), a.c_.size(), b.c_.data(),
                                 b.c_.size(), out.c_.data(), out.c_.size());
    } else {
      for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; i + j < out.c_.size(); ++j)
          out.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return out;
  }
  TSeries& operator*=(const TSeries& o) { return *this = *this * o; }

  friend TSeries operator/(const TSeries& a, const TSeries& b) {
    return a * inverse(b);
  }
  friend TSeries operator/(TSeries a, const S& s) {
    const S inv = constant_like(s, 1.0) / s;
    return a *= inv;
  }
  friend TSeries operator/(const S& s, const TSeries& b) {
    return inverse(b) * s;
  }

  friend TSeries inverse(const TSeries& g) {
    if (leading_abs(g.c_[0]) == 0.0)
      throw DomainError("division by a series with zero constant term");
    const int K = g.order();
    TSeries out(K, zero_like(g.c_[0]));
    const S inv0 = constant_like(g.c_[0], 1.0) / g.c_[0];
    out.c_[0] = inv0;
    for (int k = 1; k <= K; ++k) {
      S s = zero_like(g.c_[0]);
      for (int m = 1; m <= k; ++m) s += g.c_[m] * out.c_[k - m];
      out.c_[k] = -(s * inv0);
    }
    return out;
  }

  friend TSeries exp(const TSeries& g) {
    using std::exp;
    const int K = g.order();
    TSeries out(K, zero_like(g.c_[0]));
    out.c_[0] = exp(g.c_[0]);
    for (int k = 1; k <= K; ++k) {
      S s = zero_like(g.c_[0]);
      for (int m = 1; m <= k; ++m)
        s += g.c_[m] * (out.c_[k - m] * constant_like(g.c_[0], double(m)));
      out.c_[k] = s * constant_like(g.c_[0], 1.0 / k);
    }
    return out;
  }

  friend TSeries log(const TSeries& g) {
    using std::log;
    check_positive(g.c_[0], "log of a nonpositive value");
    const int K = g.order();
    TSeries out(K, zero_like(g.c_[0]));
    out.c_[0] = log(g.c_[0]);
    const S inv0 = constant_like(g.c_[0], 1.0) / g.c_[0];
    for (int k = 1; k <= K; ++k) {
      S s = zero_like(g.c_[0]);
      for (int m = 1; m < k; ++m)
        s += g.c_[m] * (out.c_[k - m] * constant_like(g.c_[0],
                                                      double(k - m) / k));
      out.c_[k] = (g.c_[k] - s) * inv0;
    }
    return out;
  }

  friend TSeries sqrt(const TSeries& g) {
    using std::sqrt;
    check_positive(g.c_[0], "sqrt of a nonpositive value");
    const int K = g.order();
    TSeries out(K, zero_like(g.c_[0]));
    out.c_[0] = sqrt(g.c_[0]);
    const S half_inv =
        constant_like(g.c_[0], 0.5) * (constant_like(g.c_[0], 1.0) / out.c_[0]);
    for (int k = 1; k <= K; ++k) {
      S s = zero_like(g.c_[0]);
      for (int m = 1; m < k; ++m) s += out.c_[m] * out.c_[k - m];
      out.c_[k] = (g.c_[k] - s) * half_inv;
    }
    return out;
  }

  friend TSeries sin(const TSeries& g) { return sincos(g).first; }
  friend TSeries cos(const TSeries& g) { return sincos(g).second; }

  friend std::pair<TSeries, TSeries> sincos(const TSeries& g) {
    using std::cos;
    using std::sin;
    const int K = g.order();
    TSeries s(K, zero_like(g.c_[0])), c(K, zero_like(g.c_[0]));
    s.c_[0] = sin(g.c_[0]);
    c.c_[0] = cos(g.c_[0]);
    for (int k = 1; k <= K; ++k) {
      S as = zero_like(g.c_[0]), ac = zero_like(g.c_[0]);
      for (int m = 1; m <= k; ++m) {
        const S gm = g.c_[m] * constant_like(g.c_[0], double(m));
        as += gm * c.c_[k - m];
        ac += gm * s.c_[k - m];
      }
      s.c_[k] = as * constant_like(g.c_[0], 1.0 / k);
      c.c_[k] = -(ac * constant_like(g.c_[0], 1.0 / k));
    }
    return {s, c};
  }

  friend TSeries pow(const TSeries& g, int p) {
    if (p < 0) return inverse(pow(g, -p));
    TSeries acc = TSeries::constant(g.order(), constant_like(g.c_[0], 1.0));
    TSeries base = g;
    unsigned e = static_cast<unsigned>(p);
    while (e) {
      if (e & 1u) acc = acc * base;
      base = base * base;
      e >>= 1u;
    }
    return acc;
  }

 private:
  static void check_positive(const S& x, const char* what) {
    if constexpr (std::is_same_v<S, double>) {
      if (!(x > 0.0)) throw DomainError(what);
    } else {
      if (leading_abs(x) == 0.0) throw DomainError(what);
    }
  }

  std::vector<S> c_;
};

template <class S>
double leading_abs(const TSeries<S>& t) {
  return leading_abs(t.value());
}
template <class S>
TSeries<S> zero_like(const TSeries<S>& t) {
  return TSeries<S>(t.order(), zero_like(t.value()));
}
template <class S>
TSeries<S> constant_like(const TSeries<S>& t, double v) {
  return TSeries<S>::constant(t.order(), constant_like(t.value(), v));
}

// ---------------------------------------------------------------------------
// Dense linear solve over a commutative ring with full pivoting by the
// magnitude of the leading (constant) coefficient. Works for plain scalars
// and for jet/series scalars alike; systems here are at most 8x8.

template <class S>
std::vector<S> ring_solve(int n, std::vector<S> A, std::vector<S> b,
                          double singular_tol = 1e-12) {
  std::vector<int> col(n);
  for (int j = 0; j < n; ++j) col[j] = j;
  double scale = 0.0;
  for (const auto& a : A) scale = std::max(scale, leading_abs(a));
  if (scale == 0.0) throw SingularSystemError("zero matrix in ring_solve");

  for (int k = 0; k < n; ++k) {
    int pr = k, pc = k;
    double best = -1.0;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        const double m = leading_abs(A[i * n + j]);
        if (m > best) {
          best = m;
          pr = i;
          pc = j;
        }
      }
    if (best <= singular_tol * scale)
      throw SingularSystemError("singular system in ring_solve");
    if (pr != k) {
      for (int j = 0; j < n; ++j) std::swap(A[k * n + j], A[pr * n + j]);
      std::swap(b[k], b[pr]);
    }
    if (pc != k) {
      for (int i = 0; i < n; ++i) std::swap(A[i * n + k], A[i * n + pc]);
      std::swap(col[k], col[pc]);
    }
    const S pivot_inv = constant_like(A[k * n + k], 1.0) / A[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      const S f = A[i * n + k] * pivot_inv;
      for (int j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<S> x(n, zero_like(b[0]));
  for (int k = n - 1; k >= 0; --k) {
    S s = b[k];
    for (int j = k + 1; j < n; ++j) s -= A[k * n + j] * x[col[j]];
    x[col[k]] = s * (constant_like(A[k * n + k], 1.0) / A[k * n + k]);
  }
  return x;
}

// Determinant as log-magnitude plus unit phase, full-pivot elimination;
// avoids under/overflow when (n+1)-th powers of Hessian scales are involved.
struct DetLog {
  double log_abs;                // -inf when the matrix is exactly singular
  std::complex<double> phase;    // determinant / |determinant|
};

DetLog det_log(int n, std::vector<std::complex<double>> a);
DetLog det_log_real(int n, std::vector<double> a);

}  // namespace mafol
