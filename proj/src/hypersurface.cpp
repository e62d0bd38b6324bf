#include "mafol/hypersurface.hpp"

#include <random>

namespace mafol {

RVec project_to_V(const Hypersurface& h, RVec q, double tol, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    Jet<double> r = h.rho_jet(q, 1);
    if (std::abs(r.value()) <= tol) return q;
    RVec g(h.real_dim());
    for (int v = 0; v < h.real_dim(); ++v) g[v] = r.partial(v);
    const double g2 = dot(g, g);
    if (g2 <= 1e-28)
      throw NewtonError("project_to_V: vanishing gradient of rho");
    const double step = -r.value() / g2;
    for (int v = 0; v < h.real_dim(); ++v) q[v] += step * g[v];
  }
  if (std::abs(h.rho_value(q)) <= tol) return q;
  throw NewtonError("project_to_V: no convergence in " +
                    std::to_string(max_iter) + " iterations");
}

std::vector<RVec> sample_hypersurface(const Hypersurface& h,
                                      const SamplingBox& box, int count,
                                      unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  const int m = h.real_dim();
  std::vector<RVec> out;
  out.reserve(count);
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++guard > 50 * count + 100)
      throw NewtonError(
          "sample_hypersurface: sampling box rarely projects onto V");
    RVec x(m);
    for (int i = 0; i < m; ++i)
      x[i] = box.center[i] + box.half[i] * u01(rng);
    try {
      out.push_back(project_to_V(h, x));
    } catch (const NewtonError&) {
      continue;
    }
  }
  return out;
}

double project_along(const Hypersurface& h, std::span<const double> q,
                     std::span<const double> dir, double tol, int max_iter) {
  double tau = 0.0;
  RVec p(q.begin(), q.end());
  for (int it = 0; it < max_iter; ++it) {
    for (int v = 0; v < h.real_dim(); ++v) p[v] = q[v] + tau * dir[v];
    Jet<double> r = h.rho_jet(p, 1);
    if (std::abs(r.value()) <= tol) return tau;
    double drho_dir = 0.0;
    for (int v = 0; v < h.real_dim(); ++v) drho_dir += r.partial(v) * dir[v];
    if (std::abs(drho_dir) <= 1e-28)
      throw NewtonError("project_along: direction tangent to the level set");
    tau -= r.value() / drho_dir;
  }
  throw NewtonError("project_along: no convergence");
}

}  // namespace mafol
