#pragma once

// Differential operators on jets over C^{n+1} ~ R^{2n+2} with the standard
// complex structure J: d, dc, ddc, contractions, Lie brackets and Lie
// derivatives, plus a small exterior algebra used for volume-form
// coefficients. Coordinates are ordered x1 = Re z1, x2 = Im z1, ...
//
// Convention, fixed once and audited by test: w^c(X) = -w(JX) with
// J d/dx_a = d/dy_a, so dc f = sum_a (-f_{y_a} dx_a + f_{x_a} dy_a).
// All other constants are derived from this rule.

#include <span>
#include <vector>

#include "mafol/jet.hpp"

namespace mafol {

using RVec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels::active().dot(a.size(), a.data(), b.data());
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

// J on tangent vectors: (Jv)_{x_a} = -v_{y_a}, (Jv)_{y_a} = v_{x_a}.
template <class T>
std::vector<T> apply_J(const std::vector<T>& v) {
  std::vector<T> out(v.size(), v[0]);
  for (std::size_t a = 0; a + 1 < v.size(); a += 2) {
    out[a] = -v[a + 1];
    out[a + 1] = v[a];
  }
  return out;
}

// One-form value at a point.
struct Covector {
  RVec c;

  double operator()(std::span<const double> v) const { return dot(c, v); }
  double norm() const { return norm2(c); }
  std::size_t dim() const { return c.size(); }
};

// Antisymmetric two-form value at a point; m[i*dim+j] = w(e_i, e_j).
struct TwoForm {
  int dim = 0;
  std::vector<double> m;

  double operator()(std::span<const double> u,
                    std::span<const double> v) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double row = 0.0;
      for (int j = 0; j < dim; ++j) row += m[i * dim + j] * v[j];
      s += u[i] * row;
    }
    return s;
  }
  double max_asymmetry() const {
    double worst = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        worst = std::max(worst, std::abs(m[i * dim + j] + m[j * dim + i]));
    return worst;
  }
};

// i_v w as a covector: (i_v w)_k = w(v, e_k).
Covector contract(const TwoForm& w, std::span<const double> v);

// ---------------------------------------------------------------------------
// Jet-level operators. A "field" or "one-form field" near a point is a vector
// of component jets in the ambient coordinates; taking d or a bracket drops
// the jet order by one.

using JetVec = std::vector<Jet<double>>;  // vector field / one-form components

// Component jets of df (order drops by 1).
JetVec d_jets(const Jet<double>& f);
// Component jets of dc f under the audited convention.
JetVec dc_jets(const Jet<double>& f);

Covector d_value(const Jet<double>& f);
Covector dc_value(const Jet<double>& f);

// d of a one-form given by component jets: (dw)_{ij} = di w_j - dj w_i.
TwoForm d_of_oneform(const JetVec& omega);

// ddc f from an order >= 2 jet.
TwoForm ddc_value(const Jet<double>& f);

inline RVec values_of(const JetVec& v) {
  RVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].value();
  return out;
}

// [X,Y] = (X.grad)Y - (Y.grad)X on jet fields; order drops by one.
template <class S>
std::vector<Jet<S>> lie_bracket_jets(const std::vector<Jet<S>>& X,
                                     const std::vector<Jet<S>>& Y) {
  const int m = static_cast<int>(X.size());
  std::vector<Jet<S>> out;
  out.reserve(m);
  const int lo = X[0].order() - 1;
  for (int i = 0; i < m; ++i) {
    Jet<S> acc = zero_like(X[0].derivative(0));
    for (int j = 0; j < m; ++j) {
      acc += X[j].truncated(lo) * Y[i].derivative(j);
      acc -= Y[j].truncated(lo) * X[i].derivative(j);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

RVec lie_bracket_value(const JetVec& X, const JetVec& Y);

// Lie derivative of a one-form along a field, direct formula:
// (L_xi w)_k = sum_j [ xi_j dj w_k + w_j dk xi_j ].
Covector lie_derivative_direct(const JetVec& xi, const JetVec& omega);

// Same value through Cartan's formula, xi . dw + d(w(xi)); kept as an
// independent code path for the identity checks.
Covector lie_derivative_cartan(const JetVec& xi, const JetVec& omega);

// ---------------------------------------------------------------------------
// Exterior algebra over R^dim (dim <= 6), coefficients on bitmask basis
// elements; wedge carries the shuffle sign. Used for the nondegeneracy form
// du ^ dc u ^ (ddc u)^n evaluated against the coordinate volume form.

class Form {
 public:
  Form(int dim, int degree);

  static Form scalar(int dim, double v);
  static Form from_covector(const Covector& c);
  static Form from_twoform(const TwoForm& w);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  double coeff(unsigned mask) const { return c_[mask]; }
  double& coeff(unsigned mask) { return c_[mask]; }
  // Coefficient against dx_1 ^ dx_2 ^ ... ^ dx_dim.
  double top() const { return c_[(1u << dim_) - 1u]; }

  friend Form wedge(const Form& a, const Form& b);
  Form powern(int k) const;  // k-fold wedge power

 private:
  int dim_, degree_;
  std::vector<double> c_;  // size 1 << dim, nonzero only on degree_ masks
};

}  // namespace mafol
