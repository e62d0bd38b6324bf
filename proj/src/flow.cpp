#include "mafol/flow.hpp"

#include <algorithm>

namespace mafol {

RVec ScaledField::eval_value(const RVec& p) const {
  RVec v = inner_->eval_value(p);
  const double f = factor_.eval_value(p);
  for (auto& x : v) x *= f;
  return v;
}

JetVec ScaledField::eval_jets(const RVec& p, int order) const {
  JetVec v = inner_->eval_jets(p, order);
  const Jet<double> f = factor_.eval_jet(p, order);
  for (auto& x : v) x = x * f;
  return v;
}

JetVec ScaledField::eval_on_jets(const JetVec& x) const {
  JetVec v = inner_->eval_on_jets(x);
  const Jet<double> f = factor_.eval<Jet<double>>(x);
  for (auto& c : v) c = c * f;
  return v;
}

std::vector<TSeries<double>> ScaledField::eval_series(
    const std::vector<TSeries<double>>& x) const {
  auto v = inner_->eval_series(x);
  const TSeries<double> f = factor_.eval<TSeries<double>>(x);
  for (auto& c : v) c = c * f;
  return v;
}

std::vector<TSeries<Jet<double>>> ScaledField::eval_series_jets(
    const std::vector<TSeries<Jet<double>>>& x) const {
  auto v = inner_->eval_series_jets(x);
  const TSeries<Jet<double>> f = factor_.eval<TSeries<Jet<double>>>(x);
  for (auto& c : v) c = c * f;
  return v;
}

double radius_from_norms(std::span<const double> coeff_norms) {
  const int K = static_cast<int>(coeff_norms.size()) - 1;
  double scale = 0.0;
  for (int k = 1; k <= K; ++k) scale = std::max(scale, coeff_norms[k]);
  const double tiny = 1e-14 * std::max(scale, 1e-300);
  double radius = std::numeric_limits<double>::infinity();
  int considered = 0;
  for (int k = K - 1; k >= 1 && considered < 3; --k, ++considered) {
    if (coeff_norms[k + 1] <= tiny) continue;  // treat ratio as unbounded
    const double ratio = std::max(coeff_norms[k], tiny) / coeff_norms[k + 1];
    radius = std::min(radius, ratio);
  }
  if (std::isinf(radius)) return radius;  // unbounded sentinel
  return std::max(radius, 1e-6);
}

TaylorOrbit taylor_orbit(const VecField& xi, const RVec& p, int order) {
  TaylorOrbit o;
  o.seed = p;
  o.order = order;
  auto coeffs = taylor_orbit_coeffs<double>(
      [&xi](const std::vector<TSeries<double>>& x) {
        return xi.eval_series(x);
      },
      std::span<const double>(p), order);
  o.coeff = std::move(coeffs);
  std::vector<double> norms(order + 1);
  for (int k = 0; k <= order; ++k) norms[k] = norm2(o.coeff[k]);
  o.radius = radius_from_norms(norms);
  return o;
}

RVec evaluate_orbit(const TaylorOrbit& o, std::complex<double> w,
                    double trust_fraction) {
  if (!o.unbounded() && std::abs(w) > trust_fraction * o.radius)
    throw TrustRegionError("evaluate_orbit: |w| outside the trust region", 0.0);
  const int m = static_cast<int>(o.seed.size());
  RVec out(m, 0.0);
  for (int a = 0; 2 * a + 1 < m; ++a) {
    std::complex<double> acc(0.0, 0.0);
    for (int k = o.order; k >= 0; --k) {
      acc = acc * w +
            std::complex<double>(o.coeff[k][2 * a], o.coeff[k][2 * a + 1]);
    }
    out[2 * a] = acc.real();
    out[2 * a + 1] = acc.imag();
  }
  return out;
}

namespace {

// One re-expansion + evaluation step; returns false on trust failure.
bool try_step(const VecField& xi, RVec& p, std::complex<double> dw,
              const FlowParams& fp) {
  TaylorOrbit o = taylor_orbit(xi, p, fp.order);
  if (!o.unbounded() && std::abs(dw) > fp.trust_fraction * o.radius)
    return false;
  p = evaluate_orbit(o, dw, fp.trust_fraction);
  return true;
}

// Chain a displacement (real or complex, holomorphic mode only for truly
// complex steps) with adaptive substepping. Updates `covered` with the
// fraction of `total` length achieved.
void chain(const VecField& xi, RVec& p, std::complex<double> w,
           const FlowParams& fp, double total, double* covered) {
  if (std::abs(w) == 0.0) return;
  int steps = fp.substeps > 0 ? fp.substeps : 1;
  for (;;) {
    RVec q = p;
    bool ok = true;
    int done = 0;
    const std::complex<double> dw = w / static_cast<double>(steps);
    for (int i = 0; i < steps; ++i) {
      if (!try_step(xi, q, dw, fp)) {
        ok = false;
        break;
      }
      ++done;
    }
    if (ok) {
      p = std::move(q);
      *covered += std::abs(w);
      return;
    }
    if (fp.substeps > 0 || steps >= fp.max_substeps) {
      const double reached =
          (*covered + std::abs(dw) * done) / std::max(total, 1e-300);
      throw TrustRegionError("continue_flow: trust region exhausted", reached);
    }
    steps = std::min(steps * 2, fp.max_substeps);
  }
}

}  // namespace

RVec continue_flow(const VecField& xi, const RVec& p, std::complex<double> w,
                   const FlowParams& fp) {
  RVec cur = p;
  double covered = 0.0;
  if (fp.mode == FlowMode::kHolomorphic) {
    chain(xi, cur, w, fp, std::abs(w), &covered);
    return cur;
  }
  // Time-series mode: real leg with re-expansion at real times, then one
  // vertical segment that must fit a single trust region.
  const double total = std::abs(w.real()) + std::abs(w.imag());
  chain(xi, cur, std::complex<double>(w.real(), 0.0), fp, total, &covered);
  if (w.imag() != 0.0) {
    TaylorOrbit o = taylor_orbit(xi, cur, fp.order);
    if (!o.unbounded() &&
        std::abs(w.imag()) > fp.trust_fraction * o.radius) {
      throw TrustRegionError(
          "continue_flow: vertical segment outside the trust region "
          "(time-series mode)",
          covered / std::max(total, 1e-300));
    }
    cur = evaluate_orbit(o, std::complex<double>(0.0, w.imag()),
                         fp.trust_fraction);
  }
  return cur;
}

}  // namespace mafol
