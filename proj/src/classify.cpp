#include "mafol/classify.hpp"

#include <algorithm>

namespace mafol {

ZeroSetResult classify_grid(const std::vector<double>& magnitudes, int nt,
                            int ns, double tol, int max_cluster_diam_steps) {
  ZeroSetResult out;
  for (double v : magnitudes) out.max_value = std::max(out.max_value, v);
  if (nt * ns < 9) {
    out.cls = ZeroSetClass::kUnresolved;
    return out;
  }
  if (out.max_value <= tol) {
    out.cls = ZeroSetClass::kIdenticallyZero;
    return out;
  }

  std::vector<int> label(magnitudes.size(), -1);
  int nclusters = 0;
  bool all_small = true;
  std::vector<int> stack;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < ns; ++j) {
      const int idx = i * ns + j;
      if (magnitudes[idx] > tol || label[idx] >= 0) continue;
      // flood fill one 8-connected cluster, track its bounding box
      int imin = i, imax = i, jmin = j, jmax = j;
      stack.assign(1, idx);
      label[idx] = nclusters;
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int ci = cur / ns, cj = cur % ns;
        imin = std::min(imin, ci);
        imax = std::max(imax, ci);
        jmin = std::min(jmin, cj);
        jmax = std::max(jmax, cj);
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            const int ni = ci + di, nj = cj + dj;
            if (ni < 0 || ni >= nt || nj < 0 || nj >= ns) continue;
            const int nidx = ni * ns + nj;
            if (magnitudes[nidx] > tol || label[nidx] >= 0) continue;
            label[nidx] = nclusters;
            stack.push_back(nidx);
          }
      }
      ++nclusters;
      const int diam = std::max(imax - imin, jmax - jmin);
      if (diam > max_cluster_diam_steps) all_small = false;
    }

  out.cluster_count = nclusters;
  out.cls = all_small ? ZeroSetClass::kIsolated : ZeroSetClass::kUnresolved;
  return out;
}

}  // namespace mafol
