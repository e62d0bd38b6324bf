#include "mafol/monge_ampere.hpp"

#include <Eigen/Dense>

#include "mafol/parallel.hpp"

namespace mafol {
namespace {

double second_partial(const Jet<double>& u2, int v, int w) {
  JetSpace::Exponents e{};
  e[v] += 1;
  e[w] += 1;
  const double c = u2.coeff(e);
  return v == w ? 2.0 * c : c;  // Taylor coefficient -> derivative
}

}  // namespace

std::vector<std::complex<double>> complex_hessian(const Jet<double>& u2) {
  const int m = u2.nvars();
  const int nc = m / 2;
  std::vector<std::complex<double>> H(static_cast<std::size_t>(nc) * nc);
  for (int a = 0; a < nc; ++a)
    for (int b = 0; b < nc; ++b) {
      const double xx = second_partial(u2, 2 * a, 2 * b);
      const double yy = second_partial(u2, 2 * a + 1, 2 * b + 1);
      const double xy = second_partial(u2, 2 * a, 2 * b + 1);
      const double yx = second_partial(u2, 2 * a + 1, 2 * b);
      H[a * nc + b] = 0.25 * std::complex<double>(xx + yy, xy - yx);
    }
  return H;
}

double ma_residual(const Jet<double>& u2, bool* degenerate_scale) {
  const int nc = u2.nvars() / 2;
  auto H = complex_hessian(u2);
  double fro2 = 0.0;
  for (const auto& h : H) fro2 += std::norm(h);
  if (degenerate_scale) *degenerate_scale = false;
  if (fro2 == 0.0) {
    if (degenerate_scale) *degenerate_scale = true;
    return 0.0;
  }
  const double scale = std::sqrt(fro2 / nc);
  DetLog dl = det_log(nc, H);
  if (std::isinf(dl.log_abs)) return 0.0;
  return std::exp(dl.log_abs - nc * std::log(scale));
}

double nondegeneracy(const Jet<double>& u2) {
  const int m = u2.nvars();
  const int n = m / 2 - 1;
  const Form du = Form::from_covector(d_value(u2));
  const Form dcu = Form::from_covector(dc_value(u2));
  const Form ddcu = Form::from_twoform(ddc_value(u2));
  Form w = wedge(du, dcu);
  if (n > 0) w = wedge(w, ddcu.powern(n));
  return w.top();
}

RVec xi_u(const Jet<double>& u2, double* residual_out) {
  const int m = u2.nvars();
  const Covector du = d_value(u2);
  const Covector dcu = dc_value(u2);
  const TwoForm M = ddc_value(u2);

  int dmax = 0;
  double best = -1.0;
  for (int v = 0; v < m; ++v)
    if (std::abs(du.c[v]) > best) {
      best = std::abs(du.c[v]);
      dmax = v;
    }
  if (best < 1e-14) throw DomainError("xi_u: du vanishes at the point");

  // Ker du basis Y_k = e_k - (du_k / du_d) e_d, k != d.
  std::vector<RVec> Y;
  for (int k = 0; k < m; ++k) {
    if (k == dmax) continue;
    RVec y(m, 0.0);
    y[k] = 1.0;
    y[dmax] = -du.c[k] / du.c[dmax];
    Y.push_back(std::move(y));
  }

  Eigen::MatrixXd A(m + 1, m);
  Eigen::VectorXd b(m + 1);
  for (int j = 0; j < m; ++j) A(0, j) = du.c[j];
  b(0) = 0.0;
  for (int j = 0; j < m; ++j) A(1, j) = dcu.c[j];
  b(1) = 1.0;
  for (int r = 0; r < m - 1; ++r) {
    // ddc u(xi, Y_r) = 0: row_i = sum_k M_ik Y_r[k]
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += M.m[i * m + k] * Y[r][k];
      A(2 + r, i) = s;
    }
    b(2 + r) = 0.0;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < m)
    throw SingularSystemError("xi_u: degenerate point (rank-deficient system)");
  Eigen::VectorXd x = qr.solve(b);
  if (residual_out) *residual_out = (A * x - b).norm();
  RVec out(m);
  for (int i = 0; i < m; ++i) out[i] = x(i);
  return out;
}

JetVec xi_u_jets(const Jet<double>& u_jet) { return reeb_jets(u_jet); }

ContactCheck contact_residual(const Jet<double>& u2, const JetVec& xi) {
  const TwoForm M = ddc_value(u2);
  const RVec xiv = values_of(xi);
  const Covector side_a = contract(M, xiv);

  const JetVec dcu = dc_jets(u2);
  const int lo = std::min(xi[0].order(), dcu[0].order());
  JetVec xi_lo(xi.size()), dcu_lo(dcu.size());
  for (std::size_t i = 0; i < xi.size(); ++i) xi_lo[i] = xi[i].truncated(lo);
  for (std::size_t i = 0; i < dcu.size(); ++i)
    dcu_lo[i] = dcu[i].truncated(lo);
  const Covector side_b = lie_derivative_direct(xi_lo, dcu_lo);

  ContactCheck out;
  out.residual = side_a.norm();
  double gap2 = 0.0;
  for (std::size_t k = 0; k < side_a.c.size(); ++k) {
    const double d = side_a.c[k] - side_b.c[k];
    gap2 += d * d;
  }
  out.lemma41_gap = std::sqrt(gap2);
  return out;
}

FactorizationCheck factorization_check(const Jet<double>& u2,
                                       const RVec& xi_value) {
  const int m = u2.nvars();
  const int n = m / 2 - 1;
  const TwoForm M = ddc_value(u2);
  ContactFrame f = ht_frame_from_jet(u2, RVec(m, 0.0));
  const RVec jxi = apply_J(xi_value);

  Eigen::MatrixXd P(n + 1, n + 1);
  P(0, 0) = M(xi_value, jxi);
  for (int j = 0; j < n; ++j) P(0, j + 1) = M(xi_value, f.JX[j]);
  for (int i = 0; i < n; ++i) P(i + 1, 0) = M(f.X[i], jxi);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i + 1, j + 1) = M(f.X[i], f.JX[j]);

  FactorizationCheck out;
  out.lhs = P.determinant();
  out.rhs = P(0, 0) * P.bottomRightCorner(n, n).determinant();
  double off = 0.0;
  for (int j = 0; j < n; ++j) off = std::max(off, std::abs(P(0, j + 1)));
  for (int i = 0; i < n; ++i) off = std::max(off, std::abs(P(i + 1, 0)));
  out.offdiag_max = off;
  // Frames are unit-normalized, so (|ddc u|_F / sqrt(m))^{n+1} is the natural
  // size of the determinants involved.
  double fro2 = 0.0;
  for (double v : M.m) fro2 += v * v;
  const double scale = std::pow(std::sqrt(fro2) / m, n + 1);
  out.gap_rel = std::abs(out.lhs - out.rhs) / std::max(scale, 1e-300);
  return out;
}

SaturationScan saturation_scan(const FoliationModel& m,
                               const FoliationModel::LeafChart& leaf, int nt,
                               int ns, double tol, int jobs) {
  SaturationScan scan;
  scan.nt = nt;
  scan.ns = ns;
  std::vector<RVec> pts = m.chart_grid(leaf, nt, ns);
  scan.residuals.assign(pts.size(), 0.0);
  scan.u.assign(pts.size(), 0.0);
  parallel_for(pts.size(), jobs, [&](std::size_t i) {
    auto pd = m.analyze(pts[i], 2);
    scan.residuals[i] = contact_residual(pd.u_jet, pd.xi_jet).residual;
    scan.u[i] = pd.u;
  });
  scan.result = classify_grid(scan.residuals, nt, ns, tol, 1);
  return scan;
}

const char* zero_set_class_name(ZeroSetClass c) {
  switch (c) {
    case ZeroSetClass::kIdenticallyZero:
      return "identically_zero";
    case ZeroSetClass::kIsolated:
      return "isolated";
    case ZeroSetClass::kUnresolved:
      return "unresolved";
  }
  return "unresolved";
}

const char* saturation_class_name(ZeroSetClass c) {
  switch (c) {
    case ZeroSetClass::kIdenticallyZero:
      return "contained_in_Z";
    case ZeroSetClass::kIsolated:
      return "discrete_intersection";
    case ZeroSetClass::kUnresolved:
      return "unresolved";
  }
  return "unresolved";
}

}  // namespace mafol
