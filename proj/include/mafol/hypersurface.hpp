#pragma once

// Hypersurfaces V = {rho = 0} in C^{n+1} given by analytic defining
// expressions, and the Newton projection used to seed flows exactly on V.

#include <optional>
#include <string>

#include "mafol/expr.hpp"
#include "mafol/geometry.hpp"

namespace mafol {

struct Hypersurface {
  Expression rho;
  int n = 0;  // ambient C^{n+1}
  std::string label;

  int real_dim() const { return 2 * n + 2; }

  double rho_value(std::span<const double> p) const {
    return rho.eval_value(p);
  }
  Jet<double> rho_jet(std::span<const double> p, int order) const {
    return rho.eval_jet(p, order);
  }
};

// Newton along the gradient direction until |rho| <= tol. Throws NewtonError
// when the iteration does not converge inside the collar.
RVec project_to_V(const Hypersurface& h, RVec q, double tol = 1e-12,
                  int max_iter = 50);

// Newton along a fixed direction dir from q: q + tau*dir on V; returns tau.
double project_along(const Hypersurface& h, std::span<const double> q,
                     std::span<const double> dir, double tol = 1e-12,
                     int max_iter = 50);

struct SamplingBox {
  RVec center;
  RVec half;
};

// Deterministic V samples: draw ambient points in the box and project.
std::vector<RVec> sample_hypersurface(const Hypersurface& h,
                                      const SamplingBox& box, int count,
                                      unsigned seed);

}  // namespace mafol
