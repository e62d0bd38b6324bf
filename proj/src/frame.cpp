#include "mafol/frame.hpp"

#include <Eigen/Dense>

namespace mafol {
namespace {

using CJet = Jet<std::complex<double>>;
using CD = std::complex<double>;

CJet to_cjet(const Jet<double>& re, const Jet<double>& im) {
  CJet out(re.space(), CD(0.0, 0.0));
  for (std::size_t i = 0; i < re.size(); ++i)
    out[i] = CD(re[i], im[i]);
  return out;
}

CJet to_cjet(const Jet<double>& re) {
  CJet out(re.space(), CD(0.0, 0.0));
  for (std::size_t i = 0; i < re.size(); ++i) out[i] = CD(re[i], 0.0);
  return out;
}

Jet<double> re_part(const CJet& c) {
  Jet<double> out(c.space(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

Jet<double> im_part(const CJet& c) {
  Jet<double> out(c.space(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].imag();
  return out;
}

CJet cjet_conj(const CJet& c) {
  CJet out = c;
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = std::conj(c[i]);
  return out;
}

void frame_quality(const std::vector<RVec>& X, const std::vector<RVec>& JX,
                   double* min_sv, double* cond) {
  const int m = static_cast<int>(X[0].size());
  const int n = static_cast<int>(X.size());
  Eigen::MatrixXd A(m, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < m; ++r) {
      A(r, 2 * i) = X[i][r];
      A(r, 2 * i + 1) = JX[i][r];
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  *min_sv = sv(sv.size() - 1);
  *cond = *min_sv > 0.0 ? sv(0) / *min_sv
                        : std::numeric_limits<double>::infinity();
}

}  // namespace

FrameJets ht_frame_jets(const Jet<double>& rho_jet) {
  const int m = rho_jet.nvars();
  const int ncplx = m / 2;
  const int n = ncplx - 1;
  if (rho_jet.order() < 1)
    throw DomainError("ht_frame_jets needs a defining jet of order >= 1");

  // Complex gradient G_a = (rho_x - i rho_y)/2 per complex coordinate; the
  // holomorphic tangent space is its complex-bilinear kernel.
  JetVec d = d_jets(rho_jet);
  std::vector<CJet> G;
  G.reserve(ncplx);
  for (int a = 0; a < ncplx; ++a)
    G.push_back(to_cjet(d[2 * a] * 0.5, d[2 * a + 1] * (-0.5)));

  CJet G2 = G[0] * cjet_conj(G[0]);
  for (int a = 1; a < ncplx; ++a) G2 += G[a] * cjet_conj(G[a]);
  if (leading_abs(G2) < 1e-24)
    throw DomainError("ht_frame: d rho vanishes at the base point");

  // Drop the candidate most parallel to the gradient; deterministic pivots
  // keep the frame a smooth local field.
  int drop = 0;
  double best = -1.0;
  for (int a = 0; a < ncplx; ++a) {
    const double g = leading_abs(G[a]);
    if (g > best) {
      best = g;
      drop = a;
    }
  }

  std::vector<CJet> W;
  for (int a = 0; a < ncplx; ++a) {
    if (a == drop) continue;
    // e_a - (G_a / |G|^2) conj(G)
    CJet factor = G[a] / G2;
    std::vector<CJet> v;
    v.reserve(ncplx);
    for (int b = 0; b < ncplx; ++b) {
      CJet comp = -(factor * cjet_conj(G[b]));
      if (b == a) comp += CD(1.0, 0.0);
      v.push_back(std::move(comp));
    }
    W.insert(W.end(), v.begin(), v.end());
  }
  // W is n stacked complex vectors of length ncplx.

  // Modified Gram-Schmidt with the Hermitian product, then normalize.
  std::vector<std::vector<CJet>> V;
  for (int i = 0; i < n; ++i) {
    std::vector<CJet> vi(W.begin() + i * ncplx, W.begin() + (i + 1) * ncplx);
    for (int j = 0; j < static_cast<int>(V.size()); ++j) {
      CJet num = vi[0] * cjet_conj(V[j][0]);
      CJet den = V[j][0] * cjet_conj(V[j][0]);
      for (int b = 1; b < ncplx; ++b) {
        num += vi[b] * cjet_conj(V[j][b]);
        den += V[j][b] * cjet_conj(V[j][b]);
      }
      CJet coef = num / den;
      for (int b = 0; b < ncplx; ++b) vi[b] -= coef * V[j][b];
    }
    CJet nrm2 = vi[0] * cjet_conj(vi[0]);
    for (int b = 1; b < ncplx; ++b) nrm2 += vi[b] * cjet_conj(vi[b]);
    if (leading_abs(nrm2) < 1e-24)
      throw SingularSystemError("ht_frame: degenerate frame candidate");
    CJet inv_nrm = inverse(sqrt(nrm2));
    for (int b = 0; b < ncplx; ++b) vi[b] = vi[b] * inv_nrm;
    V.push_back(std::move(vi));
  }

  FrameJets out;
  out.X.resize(n);
  out.JX.resize(n);
  for (int i = 0; i < n; ++i) {
    JetVec x(m), jx(m);
    for (int b = 0; b < ncplx; ++b) {
      const CJet& c = V[i][b];
      const CJet ic = c * CD(0.0, 1.0);
      x[2 * b] = re_part(c);
      x[2 * b + 1] = im_part(c);
      jx[2 * b] = re_part(ic);
      jx[2 * b + 1] = im_part(ic);
    }
    out.X[i] = std::move(x);
    out.JX[i] = std::move(jx);
  }
  std::vector<RVec> xv, jxv;
  for (int i = 0; i < n; ++i) {
    xv.push_back(values_of(out.X[i]));
    jxv.push_back(values_of(out.JX[i]));
  }
  frame_quality(xv, jxv, &out.min_sv, &out.cond);
  return out;
}

ContactFrame ht_frame_from_jet(const Jet<double>& rho_jet2, RVec p) {
  if (rho_jet2.order() < 2)
    throw DomainError("ht_frame needs a defining jet of order >= 2");
  FrameJets fj = ht_frame_jets(rho_jet2.truncated(1));
  ContactFrame f;
  f.p = std::move(p);
  for (const auto& x : fj.X) f.X.push_back(values_of(x));
  for (const auto& jx : fj.JX) f.JX.push_back(values_of(jx));
  f.theta = dc_value(rho_jet2);
  f.dtheta = ddc_value(rho_jet2);
  f.min_sv = fj.min_sv;
  f.cond = fj.cond;
  return f;
}

ContactFrame ht_frame(const Hypersurface& h, const RVec& p) {
  return ht_frame_from_jet(h.rho_jet(p, 2), p);
}

LeviResult levi_nondegenerate(const ContactFrame& f, double floor_rel) {
  const int n = static_cast<int>(f.X.size());
  const int d = 2 * n;
  Eigen::MatrixXd L(d, d);
  std::vector<const RVec*> frame;
  for (int i = 0; i < n; ++i) {
    frame.push_back(&f.X[i]);
    frame.push_back(&f.JX[i]);
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) L(a, b) = f.dtheta(*frame[a], *frame[b]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  const double smax = sv(0);
  LeviResult r;
  r.det = L.determinant();
  r.cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  // Scale-relative floor: dtheta entries are quadratic in the frame scale.
  const double scale = std::max(smax, 1e-300);
  r.nondegenerate = smin > floor_rel * scale && std::abs(r.det) > 0.0;
  return r;
}

JetVec reeb_jets(const Jet<double>& rho_jet) {
  const int m = rho_jet.nvars();
  const int n = m / 2 - 1;
  if (rho_jet.order() < 2)
    throw DomainError("reeb needs a defining jet of order >= 2");
  const int r = rho_jet.order() - 2;
  const JetSpace& sp = JetSpace::get(m, r);

  FrameJets frame = ht_frame_jets(rho_jet.truncated(r + 1));
  JetVec drho = d_jets(rho_jet.truncated(r + 1));
  JetVec dcrho = dc_jets(rho_jet.truncated(r + 1));
  // ddc rho entries as jets of order r.
  JetVec dc_hi = dc_jets(rho_jet);
  std::vector<JetVec> M(m, JetVec(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) {
        M[i][j] = Jet<double>(sp, 0.0);
      } else {
        M[i][j] = dc_hi[j].derivative(i) - dc_hi[i].derivative(j);
      }
    }

  std::vector<Jet<double>> A(static_cast<std::size_t>(m) * m,
                             Jet<double>(sp, 0.0));
  std::vector<Jet<double>> b(m, Jet<double>(sp, 0.0));
  for (int k = 0; k < m; ++k) {
    A[0 * m + k] = drho[k].truncated(r);
    A[1 * m + k] = dcrho[k].truncated(r);
  }
  b[1] = Jet<double>(sp, 1.0);
  int row = 2;
  auto add_contraction_row = [&](const JetVec& E) {
    for (int i = 0; i < m; ++i) {
      Jet<double> acc(sp, 0.0);
      for (int k = 0; k < m; ++k)
        if (i != k) acc += M[i][k] * E[k].truncated(r);
      A[row * m + i] = std::move(acc);
    }
    ++row;
  };
  for (int i = 0; i < n; ++i) {
    add_contraction_row(frame.X[i]);
    add_contraction_row(frame.JX[i]);
  }
  return ring_solve<Jet<double>>(m, std::move(A), std::move(b));
}

RVec reeb_from_jet(const Jet<double>& rho_jet2, double* residual_out) {
  JetVec xi = reeb_jets(rho_jet2.truncated(2));
  RVec v = values_of(xi);
  if (residual_out) {
    const Covector drho = d_value(rho_jet2);
    const Covector theta = dc_value(rho_jet2);
    const TwoForm dtheta = ddc_value(rho_jet2);
    FrameJets frame = ht_frame_jets(rho_jet2.truncated(1));
    double res = std::abs(drho(v));
    res = std::max(res, std::abs(theta(v) - 1.0));
    for (std::size_t i = 0; i < frame.X.size(); ++i) {
      res = std::max(res, std::abs(dtheta(v, values_of(frame.X[i]))));
      res = std::max(res, std::abs(dtheta(v, values_of(frame.JX[i]))));
    }
    *residual_out = res;
  }
  return v;
}

RVec reeb(const Hypersurface& h, const RVec& p, double* residual_out) {
  return reeb_from_jet(h.rho_jet(p, 2), residual_out);
}

double symmetry_residual_jets(const Jet<double>& rho_jet3, const JetVec& xi,
                              double tangency_tol) {
  const Covector drho = d_value(rho_jet3);
  const RVec xiv = values_of(xi);
  const double scale =
      std::max(1e-300, drho.norm() * norm2(xiv));
  if (std::abs(drho(xiv)) > tangency_tol * scale)
    throw DomainError("symmetry_residual: field is not tangent to V");

  FrameJets frame = ht_frame_jets(rho_jet3.truncated(xi[0].order() + 1));
  const Covector theta = dc_value(rho_jet3);
  double worst = 0.0;
  for (std::size_t i = 0; i < frame.X.size(); ++i) {
    RVec b1 = lie_bracket_value(xi, frame.X[i]);
    RVec b2 = lie_bracket_value(xi, frame.JX[i]);
    worst = std::max(worst, std::abs(theta(b1)));
    worst = std::max(worst, std::abs(theta(b2)));
  }
  return worst;
}

double symmetry_residual(const Hypersurface& h, const VectorExpression& xi,
                         const RVec& p, double tangency_tol) {
  return symmetry_residual_jets(h.rho_jet(p, 3), xi.eval_jets(p, 2),
                                tangency_tol);
}

}  // namespace mafol
