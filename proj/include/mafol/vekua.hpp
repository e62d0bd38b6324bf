#pragma once

// The frame/commutator computation on leaf charts: contact-locus functions
// u_i, v_i, the eight bracket-coefficient families a..h, their packing into
// the generalized-analytic system dw/dzbar = A w + B wbar, the grid residual
// of that system, and the zero-set classification.

#include <complex>

#include "mafol/classify.hpp"
#include "mafol/foliation.hpp"
#include "mafol/frame.hpp"

namespace mafol {

using CD = std::complex<double>;

struct ContactFunctions {
  std::vector<double> u, v;  // n entries each
};

// u_i = omega(X_i), v_i = omega^c(X_i) = -omega(J X_i) with
// omega = L_xi dc u. Needs u to order >= 2 and xi to order >= 1.
ContactFunctions contact_functions(const Jet<double>& u_jet, const JetVec& xi,
                                   const FrameJets& frame);

struct ContactCoefficients {
  int n = 0;
  std::vector<double> u, v;              // u_i, v_i
  std::vector<double> a, b, c, d, e, f, g, h;  // n x n each, row-major
  double decomp_residual = 0.0;   // max |J xi component| over the brackets
  double tangent_residual = 0.0;  // max |du(bracket)| (must be ~0)
  // max |xi-component - (u_i, v_i, -v_i, u_i)| over the four families
  double xi_coeff_mismatch = 0.0;
  double frame_cond = 0.0;
};

// Expand the four bracket families in the frame (xi, J xi, X_j, J X_j);
// raises DomainError when a bracket leaves Ker du (non-calibrated field).
ContactCoefficients bracket_coefficients(const Jet<double>& u_jet,
                                         const JetVec& xi,
                                         const FrameJets& frame,
                                         double tangent_tol = 1e-6);

struct VekuaSystem {
  int n = 0;        // number of unknown functions w_i
  int nt = 0, ns = 0;
  double dt = 0.0, ds = 0.0;
  // row-major grids of size nt*ns
  std::vector<std::vector<CD>> w;          // per point: n entries
  std::vector<std::vector<CD>> A, B;       // per point: n*n entries
};

// Complexification of the two real first-order systems; the packing is
// A = [(g-d)-(a+f)]/4 + i[(b-e)-(h+c)]/4, B = [(g-d)+(a+f)]/4 + i[(b-e)+(h+c)]/4.
void pack_system_point(const ContactCoefficients& cc, std::vector<CD>* w,
                       std::vector<CD>* A, std::vector<CD>* B);

// Assemble the system over a chart grid of coefficient samples.
VekuaSystem assemble_system(const std::vector<ContactCoefficients>& grid,
                            int nt, int ns, double dt, double ds);

// Pointwise |dw/dzbar - A w - B wbar| with centered differences in the
// chart coordinate z = t + i s (zero on the stencil boundary), and its max
// over interior points.
std::vector<double> system_residual_grid(const VekuaSystem& sys);
double system_residual(const VekuaSystem& sys);

ZeroSetResult classify_zero_set(const std::vector<std::vector<CD>>& w, int nt,
                                int ns, double tol);

// Full pipeline on one leaf chart of a model.
struct LeafVekuaReport {
  VekuaSystem system;
  double residual = 0.0;
  ZeroSetResult zero_set;
  double max_w = 0.0;
  double max_decomp_residual = 0.0;
};
LeafVekuaReport vekua_on_leaf(const FoliationModel& m,
                              const FoliationModel::LeafChart& leaf, int nt,
                              int ns, double zero_tol, int jobs = 1);

}  // namespace mafol
