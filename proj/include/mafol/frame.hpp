#pragma once

// Contact data of a hypersurface point: holomorphic tangent frames, the
// contact form theta = dc(rho)|TV, Levi nondegeneracy, the Reeb field and the
// infinitesimal-symmetry residual. The frame construction is complex
// Gram-Schmidt against the complex gradient, run over the jet ring, so the
// same code yields pointwise frames (order 0) and differentiable local frame
// fields (order >= 1) for bracket computations. It applies verbatim to level
// sets of a numerically constructed u: every entry point below takes a
// defining-function jet rather than an Expression.

#include <functional>

#include "mafol/geometry.hpp"
#include "mafol/hypersurface.hpp"

namespace mafol {

// Jet-valued local frame of HT at the base point of rho_jet:
// fields X_1, JX_1, ..., X_n, JX_n to order rho_jet.order() - 1.
struct FrameJets {
  std::vector<JetVec> X, JX;  // n entries each, ambient components
  double min_sv = 0.0;        // least singular value of the value-level frame
  double cond = 0.0;          // condition number of the value-level frame
};

FrameJets ht_frame_jets(const Jet<double>& rho_jet);

struct ContactFrame {
  RVec p;
  std::vector<RVec> X, JX;  // frame vectors spanning HT_p
  Covector theta;           // dc rho at p (restricted to tangent arguments)
  TwoForm dtheta;           // ddc rho at p
  double min_sv = 0.0;
  double cond = 0.0;
};

// From a defining-function jet of order >= 2 at p.
ContactFrame ht_frame_from_jet(const Jet<double>& rho_jet2, RVec p);
ContactFrame ht_frame(const Hypersurface& h, const RVec& p);

struct LeviResult {
  bool nondegenerate;
  double det;   // det of the 2n x 2n matrix [dtheta(E_a, E_b)] over the frame
  double cond;  // its condition number (inf when singular)
};

LeviResult levi_nondegenerate(const ContactFrame& f, double floor_rel = 1e-8);

// Reeb field at the frame's base point: the unique solution of
// d rho(xi) = 0, theta(xi) = 1, dtheta(xi, E) = 0 for frame vectors E.
// residual_out (if given) receives the max equation residual.
RVec reeb(const Hypersurface& h, const RVec& p, double* residual_out = nullptr);
RVec reeb_from_jet(const Jet<double>& rho_jet2, double* residual_out = nullptr);

// Jet-valued Reeb field from a defining jet of order >= 2: component jets of
// order rho_jet.order() - 2. Used for level sets of constructed solutions.
JetVec reeb_jets(const Jet<double>& rho_jet);

// max over the frame of |theta([xi, X_i])|, |theta([xi, JX_i])| at p; zero
// iff [xi, HT] stays in HT at p. xi must be tangent to V at p.
double symmetry_residual(const Hypersurface& h, const VectorExpression& xi,
                         const RVec& p, double tangency_tol = 1e-8);

// Same with the field given as component jets of order >= 1 at p.
double symmetry_residual_jets(const Jet<double>& rho_jet3, const JetVec& xi,
                              double tangency_tol = 1e-8);

}  // namespace mafol
