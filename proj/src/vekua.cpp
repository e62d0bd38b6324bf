#include "mafol/vekua.hpp"

#include <Eigen/Dense>

#include "mafol/parallel.hpp"

namespace mafol {

ContactFunctions contact_functions(const Jet<double>& u_jet, const JetVec& xi,
                                   const FrameJets& frame) {
  const JetVec dcu = dc_jets(u_jet);
  const int lo = std::min(xi[0].order(), dcu[0].order());
  JetVec xi_lo(xi.size()), dcu_lo(dcu.size());
  for (std::size_t i = 0; i < xi.size(); ++i) xi_lo[i] = xi[i].truncated(lo);
  for (std::size_t i = 0; i < dcu.size(); ++i)
    dcu_lo[i] = dcu[i].truncated(lo);
  const Covector omega = lie_derivative_direct(xi_lo, dcu_lo);

  ContactFunctions out;
  const int n = static_cast<int>(frame.X.size());
  out.u.resize(n);
  out.v.resize(n);
  for (int i = 0; i < n; ++i) {
    out.u[i] = omega(values_of(frame.X[i]));
    // v_i = omega(J X_i) = dc u([J X_i, xi]); this is the sign the
    // commutator system is derived with.
    out.v[i] = omega(values_of(frame.JX[i]));
  }
  return out;
}

ContactCoefficients bracket_coefficients(const Jet<double>& u_jet,
                                         const JetVec& xi,
                                         const FrameJets& frame,
                                         double tangent_tol) {
  const int m = u_jet.nvars();
  const int n = static_cast<int>(frame.X.size());
  ContactCoefficients cc;
  cc.n = n;
  ContactFunctions cf = contact_functions(u_jet, xi, frame);
  cc.u = cf.u;
  cc.v = cf.v;

  const JetVec jxi = apply_J(xi);
  const Covector du = d_value(u_jet);

  // Basis matrix with columns (xi, J xi, X_1..X_n, JX_1..JX_n).
  Eigen::MatrixXd Bm(m, m);
  for (int i = 0; i < m; ++i) {
    Bm(i, 0) = xi[i].value();
    Bm(i, 1) = jxi[i].value();
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) {
      Bm(i, 2 + j) = frame.X[j][i].value();
      Bm(i, 2 + n + j) = frame.JX[j][i].value();
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Bm);
  if (!lu.isInvertible())
    throw SingularSystemError("bracket_coefficients: ill-conditioned frame");
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Bm);
    const auto& sv = svd.singularValues();
    cc.frame_cond = sv(0) / sv(sv.size() - 1);
  }

  cc.a.assign(n * n, 0.0);
  cc.b.assign(n * n, 0.0);
  cc.c.assign(n * n, 0.0);
  cc.d.assign(n * n, 0.0);
  cc.e.assign(n * n, 0.0);
  cc.f.assign(n * n, 0.0);
  cc.g.assign(n * n, 0.0);
  cc.h.assign(n * n, 0.0);

  const double du_norm = std::max(du.norm(), 1e-300);
  auto decompose = [&](const RVec& bracket, int i, double expected_xi_coeff,
                       std::vector<double>* cx, std::vector<double>* cjx) {
    const double bscale = std::max(norm2(bracket), 1e-300);
    const double tangent = std::abs(du(bracket)) / (du_norm * bscale);
    cc.tangent_residual = std::max(cc.tangent_residual, tangent);
    if (tangent > tangent_tol)
      throw DomainError(
          "bracket_coefficients: bracket leaves Ker du (field is not part "
          "of a calibrated pair here)");
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) rhs(r) = bracket[r];
    Eigen::VectorXd coef = lu.solve(rhs);
    cc.decomp_residual = std::max(cc.decomp_residual, std::abs(coef(1)));
    cc.xi_coeff_mismatch = std::max(cc.xi_coeff_mismatch,
                                    std::abs(coef(0) - expected_xi_coeff));
    for (int j = 0; j < n; ++j) {
      (*cx)[i * n + j] = coef(2 + j);
      (*cjx)[i * n + j] = coef(2 + n + j);
    }
  };

  for (int i = 0; i < n; ++i) {
    decompose(lie_bracket_value(frame.X[i], xi), i, cc.u[i], &cc.a, &cc.b);
    decompose(lie_bracket_value(frame.JX[i], xi), i, cc.v[i], &cc.c, &cc.d);
    decompose(lie_bracket_value(frame.X[i], jxi), i, -cc.v[i], &cc.e, &cc.f);
    decompose(lie_bracket_value(frame.JX[i], jxi), i, cc.u[i], &cc.g, &cc.h);
  }
  return cc;
}

void pack_system_point(const ContactCoefficients& cc, std::vector<CD>* w,
                       std::vector<CD>* A, std::vector<CD>* B) {
  const int n = cc.n;
  w->resize(n);
  A->resize(n * n);
  B->resize(n * n);
  for (int i = 0; i < n; ++i) (*w)[i] = CD(cc.u[i], cc.v[i]);
  for (int i = 0; i < n * n; ++i) {
    const double gd = cc.g[i] - cc.d[i];
    const double af = cc.a[i] + cc.f[i];
    const double be = cc.b[i] - cc.e[i];
    const double hc = cc.h[i] + cc.c[i];
    (*A)[i] = 0.25 * CD(gd - af, be - hc);
    (*B)[i] = 0.25 * CD(gd + af, be + hc);
  }
}

VekuaSystem assemble_system(const std::vector<ContactCoefficients>& grid,
                            int nt, int ns, double dt, double ds) {
  VekuaSystem sys;
  sys.n = grid.empty() ? 0 : grid[0].n;
  sys.nt = nt;
  sys.ns = ns;
  sys.dt = dt;
  sys.ds = ds;
  sys.w.resize(grid.size());
  sys.A.resize(grid.size());
  sys.B.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    pack_system_point(grid[k], &sys.w[k], &sys.A[k], &sys.B[k]);
  return sys;
}

std::vector<double> system_residual_grid(const VekuaSystem& sys) {
  if (sys.nt < 3 || sys.ns < 3)
    throw DomainError("system_residual: grid too small for the stencil");
  std::vector<double> out(static_cast<std::size_t>(sys.nt) * sys.ns, 0.0);
  for (int it = 1; it + 1 < sys.nt; ++it)
    for (int is = 1; is + 1 < sys.ns; ++is) {
      const int idx = it * sys.ns + is;
      double worst = 0.0;
      for (int i = 0; i < sys.n; ++i) {
        const CD dwt = (sys.w[(it + 1) * sys.ns + is][i] -
                        sys.w[(it - 1) * sys.ns + is][i]) /
                       (2.0 * sys.dt);
        const CD dws =
            (sys.w[it * sys.ns + is + 1][i] - sys.w[it * sys.ns + is - 1][i]) /
            (2.0 * sys.ds);
        const CD dzbar = 0.5 * (dwt + CD(0.0, 1.0) * dws);
        CD rhs(0.0, 0.0);
        for (int j = 0; j < sys.n; ++j) {
          rhs += sys.A[idx][i * sys.n + j] * sys.w[idx][j];
          rhs += sys.B[idx][i * sys.n + j] * std::conj(sys.w[idx][j]);
        }
        worst = std::max(worst, std::abs(dzbar - rhs));
      }
      out[idx] = worst;
    }
  return out;
}

double system_residual(const VekuaSystem& sys) {
  double worst = 0.0;
  for (double v : system_residual_grid(sys)) worst = std::max(worst, v);
  return worst;
}

ZeroSetResult classify_zero_set(const std::vector<std::vector<CD>>& w, int nt,
                                int ns, double tol) {
  std::vector<double> mag(w.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    double m = 0.0;
    for (const CD& c : w[k]) m = std::max(m, std::abs(c));
    mag[k] = m;
  }
  return classify_grid(mag, nt, ns, tol, 2);
}

LeafVekuaReport vekua_on_leaf(const FoliationModel& m,
                              const FoliationModel::LeafChart& leaf, int nt,
                              int ns, double zero_tol, int jobs) {
  LeafVekuaReport rep;
  std::vector<RVec> pts = m.chart_grid(leaf, nt, ns);
  std::vector<ContactCoefficients> grid(pts.size());
  parallel_for(pts.size(), jobs, [&](std::size_t i) {
    auto pd = m.analyze(pts[i], 2);
    FrameJets frame = ht_frame_jets(pd.u_jet.truncated(2));
    grid[i] = bracket_coefficients(pd.u_jet, pd.xi_jet, frame);
  });
  for (const auto& cc : grid)
    rep.max_decomp_residual =
        std::max(rep.max_decomp_residual, cc.decomp_residual);
  const double dt = nt > 1 ? 2.0 * leaf.t_half / (nt - 1) : 0.0;
  const double ds = ns > 1 ? 2.0 * leaf.s_half / (ns - 1) : 0.0;
  rep.system = assemble_system(grid, nt, ns, dt, ds);
  rep.residual = system_residual(rep.system);
  rep.zero_set = classify_zero_set(rep.system.w, nt, ns, zero_tol);
  for (const auto& wk : rep.system.w)
    for (const CD& c : wk) rep.max_w = std::max(rep.max_w, std::abs(c));
  return rep;
}

}  // namespace mafol
