#include "mafol/geometry.hpp"

#include <bit>

namespace mafol {

Covector contract(const TwoForm& w, std::span<const double> v) {
  Covector out;
  out.c.assign(w.dim, 0.0);
  for (int k = 0; k < w.dim; ++k) {
    double s = 0.0;
    for (int i = 0; i < w.dim; ++i) s += v[i] * w.m[i * w.dim + k];
    out.c[k] = s;
  }
  return out;
}

JetVec d_jets(const Jet<double>& f) {
  JetVec out;
  const int m = f.nvars();
  out.reserve(m);
  for (int v = 0; v < m; ++v) out.push_back(f.derivative(v));
  return out;
}

JetVec dc_jets(const Jet<double>& f) {
  JetVec out;
  const int m = f.nvars();
  out.reserve(m);
  for (int a = 0; a < m; a += 2) {
    out.push_back(-f.derivative(a + 1));  // dx_a component: -f_y
    out.push_back(f.derivative(a));       // dy_a component: +f_x
  }
  return out;
}

Covector d_value(const Jet<double>& f) {
  Covector out;
  const int m = f.nvars();
  out.c.resize(m);
  for (int v = 0; v < m; ++v) out.c[v] = f.partial(v);
  return out;
}

Covector dc_value(const Jet<double>& f) {
  Covector out;
  const int m = f.nvars();
  out.c.resize(m);
  for (int a = 0; a < m; a += 2) {
    out.c[a] = -f.partial(a + 1);
    out.c[a + 1] = f.partial(a);
  }
  return out;
}

TwoForm d_of_oneform(const JetVec& omega) {
  TwoForm w;
  w.dim = static_cast<int>(omega.size());
  w.m.assign(static_cast<std::size_t>(w.dim) * w.dim, 0.0);
  for (int i = 0; i < w.dim; ++i)
    for (int j = i + 1; j < w.dim; ++j) {
      const double v = omega[j].partial(i) - omega[i].partial(j);
      w.m[i * w.dim + j] = v;
      w.m[j * w.dim + i] = -v;
    }
  return w;
}

TwoForm ddc_value(const Jet<double>& f) {
  if (f.order() < 2) throw DomainError("ddc needs a jet of order >= 2");
  return d_of_oneform(dc_jets(f));
}

RVec lie_bracket_value(const JetVec& X, const JetVec& Y) {
  const int m = static_cast<int>(X.size());
  RVec out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      acc += X[j].value() * Y[i].derivative(j).value();
      acc -= Y[j].value() * X[i].derivative(j).value();
    }
    out[i] = acc;
  }
  return out;
}

Covector lie_derivative_direct(const JetVec& xi, const JetVec& omega) {
  const int m = static_cast<int>(xi.size());
  Covector out;
  out.c.assign(m, 0.0);
  for (int k = 0; k < m; ++k) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      s += xi[j].value() * omega[k].partial(j);
      s += omega[j].value() * xi[j].partial(k);
    }
    out.c[k] = s;
  }
  return out;
}

Covector lie_derivative_cartan(const JetVec& xi, const JetVec& omega) {
  const int m = static_cast<int>(xi.size());
  const TwoForm dw = d_of_oneform(omega);
  RVec xiv = values_of(xi);
  Covector out = contract(dw, xiv);
  // d(w(xi)): differentiate the scalar jet sum_j w_j xi_j.
  const int lo = std::min(xi[0].order(), omega[0].order());
  Jet<double> pairing(JetSpace::get(m, lo), 0.0);
  for (int j = 0; j < m; ++j)
    pairing += omega[j].truncated(lo) * xi[j].truncated(lo);
  for (int k = 0; k < m; ++k) out.c[k] += pairing.partial(k);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Sign of reordering basis mask a before mask b into one ascending tuple.
double shuffle_sign(unsigned a, unsigned b) {
  int inv = 0;
  for (unsigned bit_b = b; bit_b; bit_b &= bit_b - 1) {
    const int j = std::countr_zero(bit_b);
    // count bits of a above j
    inv += std::popcount(a >> (j + 1));
  }
  return (inv % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

Form::Form(int dim, int degree)
    : dim_(dim), degree_(degree), c_(std::size_t{1} << dim, 0.0) {}

Form Form::scalar(int dim, double v) {
  Form f(dim, 0);
  f.c_[0] = v;
  return f;
}

Form Form::from_covector(const Covector& c) {
  Form f(static_cast<int>(c.dim()), 1);
  for (std::size_t i = 0; i < c.dim(); ++i) f.c_[1u << i] = c.c[i];
  return f;
}

Form Form::from_twoform(const TwoForm& w) {
  Form f(w.dim, 2);
  for (int i = 0; i < w.dim; ++i)
    for (int j = i + 1; j < w.dim; ++j)
      f.c_[(1u << i) | (1u << j)] = w.m[i * w.dim + j];
  return f;
}

Form wedge(const Form& a, const Form& b) {
  Form out(a.dim_, a.degree_ + b.degree_);
  const unsigned full = (1u << a.dim_) - 1u;
  for (unsigned s = 0; s <= full; ++s) {
    if (a.c_[s] == 0.0) continue;
    for (unsigned t = 0; t <= full; ++t) {
      if (b.c_[t] == 0.0 || (s & t)) continue;
      out.c_[s | t] += shuffle_sign(s, t) * a.c_[s] * b.c_[t];
    }
  }
  return out;
}

Form Form::powern(int k) const {
  Form acc = Form::scalar(dim_, 1.0);
  for (int i = 0; i < k; ++i) acc = wedge(acc, *this);
  return acc;
}

}  // namespace mafol
