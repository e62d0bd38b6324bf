#pragma once

// Real and complex-time integration of analytic vector fields by truncated
// Taylor series in time. Orbits are expanded at real points; evaluation at a
// complex time w recombines the real coefficient pairs into the complex
// coordinates z_a(w) = sum_k (c_k[2a] + i c_k[2a+1]) w^k, which is exactly
// the analytic continuation of the real-time curve inside C^{n+1}.

#include <complex>
#include <memory>

#include "mafol/expr.hpp"
#include "mafol/geometry.hpp"

namespace mafol {

enum class FlowMode { kHolomorphic, kTimeSeries };

struct FlowParams {
  int order = 20;
  double trust_fraction = 0.5;
  int substeps = 0;  // 0 = adaptive up to max_substeps
  int max_substeps = 64;
  FlowMode mode = FlowMode::kHolomorphic;
};

// A vector field evaluable on plain points, on jets, and on Taylor series
// whose coefficients are either numbers or jets. The series overloads drive
// the orbit recurrence; the jet overload feeds bracket computations.
class VecField {
 public:
  virtual ~VecField() = default;
  virtual int dim() const = 0;
  virtual RVec eval_value(const RVec& p) const = 0;
  virtual JetVec eval_jets(const RVec& p, int order) const = 0;
  // Evaluation at jet-valued coordinates (composition with a jet map).
  virtual JetVec eval_on_jets(const JetVec& x) const = 0;
  virtual std::vector<TSeries<double>> eval_series(
      const std::vector<TSeries<double>>& x) const = 0;
  virtual std::vector<TSeries<Jet<double>>> eval_series_jets(
      const std::vector<TSeries<Jet<double>>>& x) const = 0;
};

class ExpressionField final : public VecField {
 public:
  explicit ExpressionField(VectorExpression f) : f_(std::move(f)) {}
  int dim() const override { return f_.dim(); }
  RVec eval_value(const RVec& p) const override { return f_.eval_value(p); }
  JetVec eval_jets(const RVec& p, int order) const override {
    return f_.eval_jets(p, order);
  }
  JetVec eval_on_jets(const JetVec& x) const override {
    return f_.eval<Jet<double>>(x);
  }
  std::vector<TSeries<double>> eval_series(
      const std::vector<TSeries<double>>& x) const override {
    return f_.eval<TSeries<double>>(x);
  }
  std::vector<TSeries<Jet<double>>> eval_series_jets(
      const std::vector<TSeries<Jet<double>>>& x) const override {
    return f_.eval<TSeries<Jet<double>>>(x);
  }
  const VectorExpression& expression() const { return f_; }

 private:
  VectorExpression f_;
};

// A scalar conformal factor times an inner field.
class ScaledField final : public VecField {
 public:
  ScaledField(Expression factor, std::shared_ptr<const VecField> inner)
      : factor_(std::move(factor)), inner_(std::move(inner)) {}
  int dim() const override { return inner_->dim(); }
  RVec eval_value(const RVec& p) const override;
  JetVec eval_jets(const RVec& p, int order) const override;
  JetVec eval_on_jets(const JetVec& x) const override;
  std::vector<TSeries<double>> eval_series(
      const std::vector<TSeries<double>>& x) const override;
  std::vector<TSeries<Jet<double>>> eval_series_jets(
      const std::vector<TSeries<Jet<double>>>& x) const override;

 private:
  Expression factor_;
  std::shared_ptr<const VecField> inner_;
};

struct TaylorOrbit {
  RVec seed;
  int order = 0;
  std::vector<RVec> coeff;  // c_0..c_K
  double radius = 0.0;      // +inf encodes "unbounded"

  bool unbounded() const { return std::isinf(radius); }
};

// Coefficients by the Taylor-ODE recurrence (k+1) c_{k+1} = [xi along the
// truncated orbit]_k; radius from the Cauchy-Hadamard ratio heuristic
// (min over the last three valid ratios, floor 1e-6).
TaylorOrbit taylor_orbit(const VecField& xi, const RVec& p, int order);

// Complexified evaluation at time w inside |w| <= trust_fraction * radius.
RVec evaluate_orbit(const TaylorOrbit& o, std::complex<double> w,
                    double trust_fraction = 0.5);

// Chains evaluate_orbit along a path 0 -> w. In holomorphic-extension mode
// the path is a straight segment with re-expansion at every substep; in
// time-series mode re-expansion happens only at real times and the final
// vertical segment must fit a single trust region.
RVec continue_flow(const VecField& xi, const RVec& p, std::complex<double> w,
                   const FlowParams& fp);

// Generic orbit recurrence over a coefficient ring; exposed for the
// foliation module, which runs it with jet coefficients.
template <class R, class FieldEval>
std::vector<std::vector<R>> taylor_orbit_coeffs(FieldEval&& field,
                                                std::span<const R> seed,
                                                int order) {
  const int m = static_cast<int>(seed.size());
  std::vector<TSeries<R>> state;
  state.reserve(m);
  for (int v = 0; v < m; ++v) {
    TSeries<R> s(order, zero_like(seed[0]));
    s[0] = seed[v];
    state.push_back(std::move(s));
  }
  for (int k = 0; k < order; ++k) {
    std::vector<TSeries<R>> f = field(state);
    for (int v = 0; v < m; ++v)
      state[v][k + 1] = f[v][k] * constant_like(seed[0], 1.0 / (k + 1));
  }
  std::vector<std::vector<R>> out(order + 1,
                                  std::vector<R>(m, zero_like(seed[0])));
  for (int k = 0; k <= order; ++k)
    for (int v = 0; v < m; ++v) out[k][v] = state[v][k];
  return out;
}

// Radius heuristic shared by the scalar and jet orbit paths.
double radius_from_norms(std::span<const double> coeff_norms);

// Evaluate orbit coefficients (ring-valued) at purely imaginary time i*s:
// ReZ_a = sum_k [cx_k Re(i^k) - cy_k Im(i^k)] s^k and its partner. The s
// argument may be a jet variable, which yields the flow map's expansion in s.
template <class R>
std::vector<R> orbit_eval_vertical(const std::vector<std::vector<R>>& coeff,
                                   const R& s) {
  const int m = static_cast<int>(coeff[0].size());
  const int K = static_cast<int>(coeff.size()) - 1;
  std::vector<R> out(m, zero_like(s));
  R spow = constant_like(s, 1.0);
  for (int k = 0; k <= K; ++k) {
    const int ph = k % 4;  // i^k cycles (1, i, -1, -i)
    const double re = (ph == 0) ? 1.0 : (ph == 2) ? -1.0 : 0.0;
    const double im = (ph == 1) ? 1.0 : (ph == 3) ? -1.0 : 0.0;
    for (int a = 0; 2 * a + 1 < m; ++a) {
      const R& cx = coeff[k][2 * a];
      const R& cy = coeff[k][2 * a + 1];
      if (re != 0.0) {
        out[2 * a] += cx * spow * constant_like(s, re);
        out[2 * a + 1] += cy * spow * constant_like(s, re);
      } else {
        out[2 * a] -= cy * spow * constant_like(s, im);
        out[2 * a + 1] += cx * spow * constant_like(s, im);
      }
    }
    if (k < K) spow = spow * s;
  }
  return out;
}

}  // namespace mafol
