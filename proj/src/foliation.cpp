#include "mafol/foliation.hpp"

#include <Eigen/Dense>
#include <random>

namespace mafol {
namespace {

RVec assemble_ambient(int m, int dep, const RVec& vals, double dep_value) {
  RVec p(m);
  int j = 0;
  for (int v = 0; v < m; ++v) p[v] = (v == dep) ? dep_value : vals[j++];
  return p;
}

}  // namespace

double FoliationModel::solve_dep_scalar(int dep, double hint,
                                        const RVec& vals) const {
  const int m = h_.real_dim();
  double hv = hint;
  for (int it = 0; it < 60; ++it) {
    RVec p = assemble_ambient(m, dep, vals, hv);
    Jet<double> r = h_.rho_jet(p, 1);
    if (std::abs(r.value()) <= 1e-13) return hv;
    const double dr = r.partial(dep);
    if (std::abs(dr) < 1e-14)
      throw NewtonError("flow map: chart coordinate became degenerate");
    hv -= r.value() / dr;
  }
  throw NewtonError("flow map: no convergence solving the V-chart");
}

FoliationModel::FlowMapJets FoliationModel::eval_flow_map(
    int dep, double dep_hint, const RVec& vals, int order,
    bool want_xi) const {
  const int m = h_.real_dim();
  const JetSpace& sp = JetSpace::get(m, order);

  // Seed point on V as jets in (params, s): independent coordinates are
  // chart variables; the dependent one solves rho = 0 in the jet ring with a
  // constant-slope iteration (one order gained per pass).
  const double h0 = solve_dep_scalar(dep, dep_hint, vals);
  JetVec seed(m);
  for (int j = 0; j < m - 1; ++j) {
    const int v = chart_coord(dep, j);
    seed[v] = Jet<double>::variable(sp, j, vals[j]);
  }
  seed[dep] = Jet<double>(sp, h0);
  {
    RVec p0 = assemble_ambient(m, dep, vals, h0);
    const double slope = h_.rho_jet(p0, 1).partial(dep);
    if (std::abs(slope) < 1e-14)
      throw NewtonError("flow map: chart coordinate became degenerate");
    const double inv_slope = 1.0 / slope;
    for (int pass = 0; pass <= order + 1; ++pass) {
      Jet<double> r = h_.rho.eval<Jet<double>>(seed);
      seed[dep] -= r * inv_slope;
    }
    Jet<double> r = h_.rho.eval<Jet<double>>(seed);
    double worst = 0.0;
    for (double c : r.coeffs()) worst = std::max(worst, std::abs(c));
    if (worst > 1e-9)
      throw NewtonError("flow map: V-chart jet solve did not converge");
  }

  // Orbit with jet coefficients, then the vertical evaluation at i*s.
  auto coeff = taylor_orbit_coeffs<Jet<double>>(
      [this](const std::vector<TSeries<Jet<double>>>& x) {
        return xi0_->eval_series_jets(x);
      },
      std::span<const Jet<double>>(seed), prm_.flow.order);

  std::vector<double> norms(coeff.size());
  for (std::size_t k = 0; k < coeff.size(); ++k) {
    RVec v(m);
    for (int i = 0; i < m; ++i) v[i] = coeff[k][i].value();
    norms[k] = norm2(v);
  }
  const double radius = radius_from_norms(norms);
  const double s_value = vals[m - 1];
  if (!std::isinf(radius) &&
      std::abs(s_value) > prm_.flow.trust_fraction * radius)
    throw TrustRegionError("flow map: |s| outside the vertical trust region",
                           0.0);

  const Jet<double> s_jet = Jet<double>::variable(sp, m - 1, s_value);
  FlowMapJets out;
  out.jets = orbit_eval_vertical<Jet<double>>(coeff, s_jet);
  out.value = values_of(out.jets);
  out.dep_value = h0;
  out.seed = values_of(seed);

  if (want_xi) {
    // Xi = sum_j dF/dparam_j * (xi0 at the seed)_chart_j: the generator of
    // G_t(g_{is}(p)) = g_{is}(g_t(p)) expressed in (params, s) jets.
    JetVec xi0_at_seed = xi0_->eval_on_jets(seed);
    const int lo = order - 1;
    out.xi_dir.assign(m, Jet<double>());
    for (int i = 0; i < m; ++i) {
      Jet<double> acc(JetSpace::get(m, lo), 0.0);
      for (int j = 0; j < m - 1; ++j) {
        acc += out.jets[i].derivative(j) *
               xi0_at_seed[chart_coord(dep, j)].truncated(lo);
      }
      out.xi_dir[i] = std::move(acc);
    }
  }
  return out;
}

RVec FoliationModel::eval_flow_value(int dep, double* dep_hint,
                                     const RVec& vals) const {
  const int m = h_.real_dim();
  const double h0 = solve_dep_scalar(dep, *dep_hint, vals);
  *dep_hint = h0;
  RVec seed = assemble_ambient(m, dep, vals, h0);
  auto coeff = taylor_orbit_coeffs<double>(
      [this](const std::vector<TSeries<double>>& x) {
        return xi0_->eval_series(x);
      },
      std::span<const double>(seed), prm_.flow.order);
  std::vector<double> norms(coeff.size());
  for (std::size_t k = 0; k < coeff.size(); ++k) norms[k] = norm2(coeff[k]);
  const double radius = radius_from_norms(norms);
  const double s_value = vals[m - 1];
  if (!std::isinf(radius) &&
      std::abs(s_value) > prm_.flow.trust_fraction * radius)
    throw TrustRegionError("flow map: |s| outside the vertical trust region",
                           0.0);
  return orbit_eval_vertical<double>(coeff, s_value);
}

FoliationModel::NewtonResult FoliationModel::newton_invert(
    const RVec& q) const {
  const int m = h_.real_dim();

  // Initial guess: project q to V along J xi0, s from the signed shift.
  RVec v0 = xi0_->eval_value(q);
  RVec jv = apply_J(v0);
  const double jv_norm = norm2(jv);
  if (jv_norm < 1e-12)
    throw NewtonError("flow inversion: J xi0 vanishes at the query point");
  double tau;
  try {
    tau = project_along(h_, q, jv);
  } catch (const NewtonError&) {
    RVec p = project_to_V(h_, q);
    tau = 0.0;
    for (int i = 0; i < m; ++i) tau += (p[i] - q[i]) * jv[i];
    tau /= jv_norm * jv_norm;
  }
  RVec p0(m);
  for (int i = 0; i < m; ++i) p0[i] = q[i] + tau * jv[i];
  // q = p + s * J xi0(p) + O(s^2) while q + tau * J xi0 lands on V: s = -tau.
  const double s = -tau;

  Jet<double> rj = h_.rho_jet(p0, 1);
  int dep = 0;
  double best = -1.0;
  for (int i = 0; i < m; ++i) {
    if (std::abs(rj.partial(i)) > best) {
      best = std::abs(rj.partial(i));
      dep = i;
    }
  }

  RVec vals(m);
  {
    int j = 0;
    for (int i = 0; i < m; ++i)
      if (i != dep) vals[j++] = p0[i];
    vals[m - 1] = s;
  }
  double dep_hint = p0[dep];

  const double qscale = 1.0 + norm2(q);
  double resid_norm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < prm_.newton_max_iter; ++it) {
    FlowMapJets F = eval_flow_map(dep, dep_hint, vals, 1, false);
    dep_hint = F.dep_value;
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r(i) = q[i] - F.value[i];
    resid_norm = r.norm();
    if (resid_norm <= prm_.newton_tol * qscale) {
      return {vals, dep, dep_hint};
    }
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = F.jets[i].partial(j);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
      throw NewtonError("flow inversion: singular flow-map Jacobian");
    Eigen::VectorXd delta = lu.solve(r);

    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 10; ++bt) {
      RVec trial(m);
      for (int j = 0; j < m; ++j) trial[j] = vals[j] + lambda * delta(j);
      try {
        double hint = dep_hint;
        RVec Ft = eval_flow_value(dep, &hint, trial);
        double rn = 0.0;
        for (int i = 0; i < m; ++i) {
          const double d = q[i] - Ft[i];
          rn += d * d;
        }
        rn = std::sqrt(rn);
        if (rn < resid_norm * (1.0 - 1e-4 * lambda) ||
            rn <= prm_.newton_tol * qscale) {
          vals = std::move(trial);
          dep_hint = hint;
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // fall through to a smaller step
      }
      lambda *= 0.5;
    }
    if (!accepted)
      throw NewtonError("flow inversion: line search stalled at residual " +
                        std::to_string(resid_norm));
  }
  throw NewtonError("flow inversion: no convergence (last residual " +
                    std::to_string(resid_norm) + ")");
}

FoliationModel::PointData FoliationModel::analyze(const RVec& q,
                                                  int jet_order) const {
  const int m = h_.real_dim();
  NewtonResult nr = newton_invert(q);
  const double s_star = nr.vals[m - 1];
  if (std::abs(s_star) > report_.s_max_effective + 1e-9)
    throw CollarError("query point outside the collar (s = " +
                      std::to_string(s_star) + ")");

  FlowMapJets F = eval_flow_map(nr.dep, nr.dep_hint, nr.vals, jet_order, true);

  // Series inversion of F around q: constant-slope (value Jacobian) Newton in
  // the graded ring, one order gained per pass.
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = F.jets[i].partial(j);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw NewtonError("jet inversion: singular flow-map Jacobian");
  Eigen::MatrixXd Ainv = lu.inverse();

  const JetSpace& sp = JetSpace::get(m, jet_order);
  JetVec dq(m);
  for (int k = 0; k < m; ++k) dq[k] = Jet<double>::variable(sp, k, 0.0);
  JetVec delta(m);
  for (int j = 0; j < m; ++j) {
    Jet<double> acc(sp, 0.0);
    for (int k = 0; k < m; ++k) acc += dq[k] * Ainv(j, k);
    delta[j] = std::move(acc);
  }
  JetVec resid(m);
  for (int pass = 0; pass <= jet_order; ++pass) {
    for (int i = 0; i < m; ++i) {
      Jet<double> c = F.jets[i].compose(std::span<const Jet<double>>(delta));
      c -= F.value[i];
      c -= dq[i];
      resid[i] = std::move(c);
    }
    for (int j = 0; j < m; ++j) {
      Jet<double> corr(sp, 0.0);
      for (int k = 0; k < m; ++k) corr += resid[k] * Ainv(j, k);
      delta[j] -= corr;
    }
  }
  {
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      Jet<double> c = F.jets[i].compose(std::span<const Jet<double>>(delta));
      c -= F.value[i];
      c -= dq[i];
      for (double x : c.coeffs()) worst = std::max(worst, std::abs(x));
    }
    if (worst > 1e-8 * (1.0 + norm2(q)))
      throw NewtonError("jet inversion of the flow map did not converge");
  }

  PointData out;
  out.q = q;
  out.p_on_v = F.seed;
  out.dep = nr.dep;
  out.s = s_star;
  out.u = -s_star;
  out.u_jet = -delta[m - 1];
  out.u_jet[0] = -s_star;

  // Model field at q: compose Xi(params, s) with the inverse-map jets.
  const int lo = jet_order - 1;
  JetVec delta_lo(m);
  for (int j = 0; j < m; ++j) delta_lo[j] = delta[j].truncated(lo);
  out.xi_jet.resize(m);
  for (int i = 0; i < m; ++i)
    out.xi_jet[i] =
        F.xi_dir[i].compose(std::span<const Jet<double>>(delta_lo));
  return out;
}

std::pair<double, Jet<double>> FoliationModel::u_eval(const RVec& q) const {
  PointData pd = analyze(q, 2);
  return {pd.u, pd.u_jet};
}

FoliationModel::CalibrationReport FoliationModel::calibration_residuals(
    std::span<const RVec> samples) const {
  CalibrationReport rep;
  for (const RVec& q : samples) {
    PointData pd = analyze(q, 2);
    const RVec xiv = values_of(pd.xi_jet);
    const Covector du = d_value(pd.u_jet);
    const Covector dcu = dc_value(pd.u_jet);
    rep.max_du_xi = std::max(rep.max_du_xi, std::abs(du(xiv)));
    rep.max_dcu_xi_m1 = std::max(rep.max_dcu_xi_m1, std::abs(dcu(xiv) - 1.0));
    JetVec jxi = apply_J(pd.xi_jet);
    rep.max_bracket =
        std::max(rep.max_bracket, norm2(lie_bracket_value(pd.xi_jet, jxi)));
  }
  return rep;
}

FoliationModel::LeafChart FoliationModel::leaf_chart(const RVec& p_near_v,
                                                     double t_half,
                                                     double s_half) const {
  LeafChart c;
  c.seed = project_to_V(h_, p_near_v);
  c.t_half = t_half;
  c.s_half = s_half;
  if (s_half > report_.s_max_effective + 1e-12)
    throw CollarError("leaf chart rectangle exceeds the collar");
  return c;
}

RVec FoliationModel::chart_point(const LeafChart& c, double t,
                                 double s) const {
  FlowParams fp = prm_.flow;
  fp.mode = FlowMode::kTimeSeries;
  return continue_flow(*xi0_, c.seed, std::complex<double>(t, s), fp);
}

std::vector<RVec> FoliationModel::chart_grid(const LeafChart& c, int nt,
                                             int ns) const {
  std::vector<RVec> out;
  out.reserve(static_cast<std::size_t>(nt) * ns);
  FlowParams fp = prm_.flow;
  fp.mode = FlowMode::kTimeSeries;
  RVec cur = c.seed;
  double t_prev = -c.t_half;
  cur = continue_flow(*xi0_, cur, std::complex<double>(t_prev, 0.0), fp);
  for (int it = 0; it < nt; ++it) {
    const double t =
        nt == 1 ? -c.t_half : -c.t_half + 2.0 * c.t_half * it / (nt - 1);
    cur = continue_flow(*xi0_, cur, std::complex<double>(t - t_prev, 0.0), fp);
    t_prev = t;
    TaylorOrbit o = taylor_orbit(*xi0_, cur, fp.order);
    for (int is = 0; is < ns; ++is) {
      const double s =
          ns == 1 ? -c.s_half : -c.s_half + 2.0 * c.s_half * is / (ns - 1);
      out.push_back(
          evaluate_orbit(o, std::complex<double>(0.0, s), fp.trust_fraction));
    }
  }
  return out;
}

std::vector<RVec> FoliationModel::v_samples(int count, unsigned seed) const {
  return sample_hypersurface(h_, box_, count, seed);
}

std::vector<RVec> FoliationModel::collar_samples(int count, unsigned seed,
                                                 double s_fill) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  const double s_cap = s_fill * report_.s_max_effective;
  std::vector<RVec> pts = v_samples(count, rng());
  std::vector<RVec> out;
  out.reserve(count);
  for (RVec& p : pts) {
    const double s = s_cap * u01(rng);
    TaylorOrbit o = taylor_orbit(*xi0_, p, prm_.flow.order);
    out.push_back(evaluate_orbit(o, std::complex<double>(0.0, s),
                                 prm_.flow.trust_fraction));
  }
  return out;
}

FoliationModel::FoliationModel(Hypersurface h,
                               std::shared_ptr<const VecField> xi0,
                               FoliationParams prm, SamplingBox box)
    : h_(std::move(h)), xi0_(std::move(xi0)), prm_(prm), box_(std::move(box)) {
  report_.s_max_requested = prm_.s_max;
  report_.s_max_effective = prm_.s_max;
  report_.samples = prm_.build_samples;
  report_.min_transversality = std::numeric_limits<double>::infinity();
  report_.min_flow_jacobian = std::numeric_limits<double>::infinity();
  report_.min_vertical_reach = std::numeric_limits<double>::infinity();

  std::vector<RVec> samples = v_samples(prm_.build_samples, prm_.rng_seed);
  const int m = h_.real_dim();
  for (const RVec& p : samples) {
    const Covector drho = d_value(h_.rho_jet(p, 1));
    RVec xv = xi0_->eval_value(p);
    RVec jxv = apply_J(xv);
    const double scale = std::max(1e-300, drho.norm() * norm2(xv));
    const double trans = std::abs(drho(jxv)) / scale;
    report_.min_transversality = std::min(report_.min_transversality, trans);
  }
  if (report_.min_transversality < prm_.transversality_floor)
    throw DomainError(
        "build_foliation: J xi0 is not transversal to V (min relative "
        "pairing " +
        std::to_string(report_.min_transversality) + ")");

  for (const RVec& p : samples) {
    TaylorOrbit o = taylor_orbit(*xi0_, p, prm_.flow.order);
    const double reach = o.unbounded()
                             ? std::numeric_limits<double>::infinity()
                             : prm_.flow.trust_fraction * o.radius;
    report_.min_vertical_reach = std::min(report_.min_vertical_reach, reach);
  }
  if (report_.min_vertical_reach < report_.s_max_effective) {
    report_.s_max_effective = 0.95 * report_.min_vertical_reach;
    report_.collar_shrunk = true;
  }

  for (const RVec& p : samples) {
    PointData pd = analyze(p, 1);
    report_.max_u_on_v = std::max(report_.max_u_on_v, std::abs(pd.u));
  }
  for (const RVec& p : samples) {
    NewtonResult nr = newton_invert(p);
    FlowMapJets F = eval_flow_map(nr.dep, nr.dep_hint, nr.vals, 1, false);
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = F.jets[i].partial(j);
    report_.min_flow_jacobian =
        std::min(report_.min_flow_jacobian, std::abs(A.determinant()));
  }
  if (report_.min_flow_jacobian < 1e-10)
    throw DomainError("build_foliation: flow map is not a diffeomorphism");
}

FoliationModel build_foliation(Hypersurface h,
                               std::shared_ptr<const VecField> xi0,
                               FoliationParams prm, SamplingBox box) {
  return FoliationModel(std::move(h), std::move(xi0), prm, std::move(box));
}

double uniqueness_check(const FoliationModel& a, const FoliationModel& b,
                        std::span<const RVec> samples) {
  double worst = 0.0;
  for (const RVec& q : samples) {
    double ua, ub;
    try {
      ua = a.analyze(q, 1).u;
      ub = b.analyze(q, 1).u;
    } catch (const CollarError&) {
      throw CollarError("uniqueness_check: sample outside a shared collar");
    }
    worst = std::max(worst, std::abs(ua - ub));
  }
  return worst;
}

}  // namespace mafol
