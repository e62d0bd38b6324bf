#pragma once

// Zero-set classification on rectangular grids: the numerical reading of the
// "identically zero or discrete" dichotomy. Sub-threshold points are grouped
// into 8-connected clusters; a grid is "isolated" only when every cluster
// stays within the allowed diameter, and anything else is reported as
// unresolved rather than coerced.

#include <vector>

namespace mafol {

enum class ZeroSetClass { kIdenticallyZero, kIsolated, kUnresolved };

struct ZeroSetResult {
  ZeroSetClass cls = ZeroSetClass::kUnresolved;
  int cluster_count = 0;  // for kIsolated: number of zero clusters (0 = none)
  double max_value = 0.0;
};

// magnitudes: row-major nt x ns grid of |w| (or residual) values.
// max_cluster_diam_steps: largest allowed cluster bounding-box side, in grid
// steps (1 for contact-locus scans, 2 for Vekua zero sets).
ZeroSetResult classify_grid(const std::vector<double>& magnitudes, int nt,
                            int ns, double tol, int max_cluster_diam_steps);

}  // namespace mafol
