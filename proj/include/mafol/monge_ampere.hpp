#pragma once

// Verification layer for the degenerate complex Monge-Ampere equation: the
// normalized complex-Hessian determinant residual, the nondegeneracy form
// du ^ dc u ^ (ddc u)^n, recovery of the distinguished field xi_u from u
// alone, the contact-locus residual with its contraction-vs-Lie-derivative
// identity, the determinant factorization over a contact frame, and the
// leaf saturation scan.

#include "mafol/classify.hpp"
#include "mafol/foliation.hpp"
#include "mafol/frame.hpp"

namespace mafol {

// Complex Hessian H_ab = d^2 u / dz_a dzbar_b, row-major (n+1)^2, from the
// real second-order coefficients of an order >= 2 jet.
std::vector<std::complex<double>> complex_hessian(const Jet<double>& u2);

// |det H| / (|H|_F / sqrt(n+1))^{n+1}; dimensionless, 1 for u = |z|^2.
// A zero Hessian scale returns 0 and sets *degenerate_scale.
double ma_residual(const Jet<double>& u2, bool* degenerate_scale = nullptr);

// Coefficient of du ^ dc u ^ (ddc u)^n against the coordinate volume form.
double nondegeneracy(const Jet<double>& u2);

// Unique solution of du(xi)=0, dc u(xi)=1, ddc u(xi, Y)=0 for Y spanning
// Ker du; assembled as a least-squares system on a Ker-du basis. residual_out
// receives the equation residual (nonzero away from MA solutions).
RVec xi_u(const Jet<double>& u2, double* residual_out = nullptr);

// xi_u as a field (component jets of order u_jet.order() - 2) through the
// level-set Reeb solve; the independent route for the bracket
// characterization checks.
JetVec xi_u_jets(const Jet<double>& u_jet);

struct ContactCheck {
  double residual;     // |xi . ddc u| (covector norm)
  double lemma41_gap;  // |xi . ddc u - L_xi dc u|, independent code paths
};
ContactCheck contact_residual(const Jet<double>& u2, const JetVec& xi);

struct FactorizationCheck {
  double lhs;          // det of the pairing matrix on (xi, X_i) vs (J xi, JX_i)
  double rhs;          // ddc u(xi, J xi) * det(Levi block)
  double gap_rel;      // |lhs - rhs| / scale
  double offdiag_max;  // max |ddc u(xi, JX_i)|, |ddc u(X_i, J xi)|
};
FactorizationCheck factorization_check(const Jet<double>& u2,
                                       const RVec& xi_value);

// Classification of a leaf against the contact locus Z: samples the contact
// residual over the chart rectangle.
struct SaturationScan {
  ZeroSetResult result;
  std::vector<double> residuals;  // row-major nt x ns
  std::vector<double> u;          // u along the chart grid
  int nt = 0, ns = 0;
};
SaturationScan saturation_scan(const FoliationModel& m,
                               const FoliationModel::LeafChart& leaf, int nt,
                               int ns, double tol, int jobs = 1);

const char* zero_set_class_name(ZeroSetClass c);
const char* saturation_class_name(ZeroSetClass c);

}  // namespace mafol
