#pragma once

// The Cauchy-problem construction: given V = {rho = 0} and a seed field xi0
// on V with Jxi0 transversal, complexify the seed flow in time and build the
// calibrated pair (xi, u) on a two-sided collar of V. u(q) = -s where
// g_{is}(p) = q with p in V; u's jets come from inverting the flow map's own
// Taylor expansion, never from finite differences. The model field xi is the
// pushforward of xi0 under the leaf flows.

#include <memory>

#include "mafol/flow.hpp"
#include "mafol/frame.hpp"
#include "mafol/hypersurface.hpp"

namespace mafol {

struct FoliationParams {
  FlowParams flow;
  double s_max = 0.15;
  double transversality_floor = 1e-3;  // relative |drho(J xi0)|
  int newton_max_iter = 40;
  double newton_tol = 1e-12;
  int jet_order = 3;
  int build_samples = 40;
  unsigned rng_seed = 0x5eed;
};

struct BuildReport {
  int samples = 0;
  double min_transversality = 0.0;
  double max_u_on_v = 0.0;
  double min_flow_jacobian = 0.0;
  double min_vertical_reach = 0.0;  // trust_fraction * radius over V samples
  double s_max_requested = 0.0;
  double s_max_effective = 0.0;
  bool collar_shrunk = false;
};

class FoliationModel {
 public:
  FoliationModel(Hypersurface h, std::shared_ptr<const VecField> xi0,
                 FoliationParams prm, SamplingBox box);

  struct PointData {
    RVec q;
    RVec p_on_v;        // seed of the vertical flow line through q
    int dep = -1;       // dependent ambient coordinate of the local V-chart
    double s = 0.0;
    double u = 0.0;     // -s
    Jet<double> u_jet;  // at q, requested order
    JetVec xi_jet;      // model field at q, requested order - 1
  };

  // Newton inversion of the flow map at q plus jets by series inversion.
  PointData analyze(const RVec& q, int jet_order) const;

  // (u, order-2 jet of u at q).
  std::pair<double, Jet<double>> u_eval(const RVec& q) const;

  struct CalibrationReport {
    double max_du_xi = 0.0;       // |du(xi)|
    double max_dcu_xi_m1 = 0.0;   // |dc u(xi) - 1|
    double max_bracket = 0.0;     // ||[xi, J xi]||
  };
  CalibrationReport calibration_residuals(std::span<const RVec> samples) const;

  struct LeafChart {
    RVec seed;       // p in V
    double t_half = 0.0, s_half = 0.0;
  };
  LeafChart leaf_chart(const RVec& p_near_v, double t_half,
                       double s_half) const;
  RVec chart_point(const LeafChart& c, double t, double s) const;
  // Row-major (it, is) grid over the chart rectangle, flows chained along t.
  std::vector<RVec> chart_grid(const LeafChart& c, int nt, int ns) const;

  // Deterministic samples: points of V drawn from the sampling box, and
  // collar points g_{is}(p) with |s| <= s_fill * s_max.
  std::vector<RVec> v_samples(int count, unsigned seed) const;
  std::vector<RVec> collar_samples(int count, unsigned seed,
                                   double s_fill = 0.9) const;

  const Hypersurface& hypersurface() const { return h_; }
  const VecField& seed_field() const { return *xi0_; }
  const FoliationParams& params() const { return prm_; }
  const BuildReport& build_report() const { return report_; }
  const SamplingBox& box() const { return box_; }
  double s_max() const { return report_.s_max_effective; }

 private:
  struct FlowMapJets {
    RVec value;          // F(vals)
    JetVec jets;         // F components as jets in (params, s)
    JetVec xi_dir;       // directional derivative field Xi (optional)
    double dep_value;    // solved dependent coordinate of the seed
    RVec seed;           // seed point on V
  };

  // Chart bookkeeping: ambient coordinate of chart variable j (j < m-1).
  int chart_coord(int dep, int j) const { return j < dep ? j : j + 1; }

  FlowMapJets eval_flow_map(int dep, double dep_hint, const RVec& vals,
                            int order, bool want_xi) const;
  RVec eval_flow_value(int dep, double* dep_hint, const RVec& vals) const;
  double solve_dep_scalar(int dep, double hint, const RVec& vals) const;

  struct NewtonResult {
    RVec vals;  // (chart params, s)
    int dep;
    double dep_hint;
  };
  NewtonResult newton_invert(const RVec& q) const;

  Hypersurface h_;
  std::shared_ptr<const VecField> xi0_;
  FoliationParams prm_;
  SamplingBox box_;
  BuildReport report_;
};

// Build with validation (transversality, u|V = 0, flow-map Jacobian,
// vertical trust reach; the collar shrinks with a report when the trust
// region cannot cover s_max).
FoliationModel build_foliation(Hypersurface h,
                               std::shared_ptr<const VecField> xi0,
                               FoliationParams prm, SamplingBox box);

// sup |u_1 - u_2| over the samples; throws CollarError unless both models
// cover the full sample set.
double uniqueness_check(const FoliationModel& a, const FoliationModel& b,
                        std::span<const RVec> samples);

}  // namespace mafol
