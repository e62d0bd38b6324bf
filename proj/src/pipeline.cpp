#include "mafol/pipeline.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>

#include "mafol/parallel.hpp"

namespace mafol {

using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int effective_jobs(const RunOptions& opt) {
  if (opt.jobs > 0) return opt.jobs;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

Scenario effective_scenario(const Scenario& s, const RunOptions& opt) {
  Scenario e = s;
  if (opt.taylor_order > 0) e.fol.flow.order = opt.taylor_order;
  if (opt.mode_override) e.fol.flow.mode = *opt.mode_override;
  return e;
}

const Catalog& catalog_of(const RunOptions& opt) {
  return opt.catalog ? *opt.catalog : Catalog::builtin();
}

std::vector<std::complex<double>> to_complex(const RVec& p) {
  std::vector<std::complex<double>> z(p.size() / 2);
  for (std::size_t a = 0; a < z.size(); ++a)
    z[a] = {p[2 * a], p[2 * a + 1]};
  return z;
}

// Deterministic shell grid |z| in [rmin, rmax].
std::vector<RVec> shell_samples(int m, int count, double rmin, double rmax,
                                unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(rmin, rmax);
  std::vector<RVec> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    RVec q(m);
    double n2 = 0.0;
    for (int i = 0; i < m; ++i) {
      q[i] = gauss(rng);
      n2 += q[i] * q[i];
    }
    const double r = uni(rng) / std::sqrt(std::max(n2, 1e-300));
    for (int i = 0; i < m; ++i) q[i] *= r;
    out.push_back(std::move(q));
  }
  return out;
}

struct StageError {
  std::string stage;
  std::string what;
};

struct Verdict {
  bool pass = true;
  std::vector<std::string> reasons;

  void require(bool ok, const std::string& reason) {
    if (!ok) {
      pass = false;
      reasons.push_back(reason);
    }
  }
  ordered_json to_json() const {
    ordered_json j;
    j["pass"] = pass;
    j["reasons"] = reasons;
    return j;
  }
};

std::string exceeded(const std::string& what, double value, double tol) {
  return what + " exceeded: " + fmt(value) + " > " + fmt(tol);
}

// --------------------------------------------------------------------------
// Stages

ordered_json reeb_stage(const Hypersurface& h, const SamplingBox& box,
                        const VecField* seed_field, const Scenario& s,
                        int jobs) {
  const auto samples =
      sample_hypersurface(h, box, s.grids.v_samples, s.rng_seed ^ 0x1u);
  struct Rec {
    double residual, seed_diff, cond;
  };
  std::vector<Rec> recs(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    double res = 0.0;
    RVec xi = reeb(h, samples[i], &res);
    ContactFrame f = ht_frame(h, samples[i]);
    double diff = 0.0;
    if (seed_field) {
      RVec sv = seed_field->eval_value(samples[i]);
      for (std::size_t k = 0; k < xi.size(); ++k)
        diff = std::max(diff, std::abs(sv[k] - xi[k]));
    }
    recs[i] = {res, diff, f.cond};
  });
  double max_res = 0.0, max_diff = 0.0, max_cond = 0.0;
  for (const auto& r : recs) {
    max_res = std::max(max_res, r.residual);
    max_diff = std::max(max_diff, r.seed_diff);
    max_cond = std::max(max_cond, r.cond);
  }
  ordered_json j;
  j["samples"] = samples.size();
  j["max_equation_residual"] = max_res;
  j["max_frame_condition"] = max_cond;
  if (seed_field) j["max_seed_vs_reeb"] = max_diff;
  return j;
}

ordered_json flow_stage(const Hypersurface& h, const VecField& xi0,
                        const FoliationModel& model, const Scenario& s,
                        int jobs) {
  const auto samples = model.v_samples(8, s.rng_seed ^ 0x2u);
  const double s_amp = 0.5 * model.s_max();
  const FlowParams& fp = s.fol.flow;

  struct Rec {
    double group_gap, cr_residual, radius;
  };
  std::vector<Rec> recs(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    const RVec& p = samples[i];
    const double t = 0.1;
    // g_{t+is}(p) against g_{is}(g_t(p)): the continuation identity.
    RVec a = continue_flow(xi0, p, {t, s_amp}, fp);
    RVec mid = continue_flow(xi0, p, {t, 0.0}, fp);
    RVec b = continue_flow(xi0, mid, {0.0, s_amp}, fp);
    double gap = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      gap = std::max(gap, std::abs(a[k] - b[k]));
    if (fp.mode == FlowMode::kHolomorphic) {
      const std::complex<double> w1(0.07, 0.3 * s_amp), w2(-0.04, 0.4 * s_amp);
      RVec c = continue_flow(xi0, continue_flow(xi0, p, w2, fp), w1, fp);
      RVec d = continue_flow(xi0, p, w1 + w2, fp);
      for (std::size_t k = 0; k < c.size(); ++k)
        gap = std::max(gap, std::abs(c[k] - d[k]));
    }

    // Centered Cauchy-Riemann test of w -> g_w(p) inside the trust region.
    const std::complex<double> w0(0.05, 0.5 * s_amp);
    const double hstep = 1e-5;
    auto zc = [&](std::complex<double> w) {
      return to_complex(continue_flow(xi0, p, w, fp));
    };
    auto zt_p = zc(w0 + hstep), zt_m = zc(w0 - hstep);
    auto zs_p = zc(w0 + std::complex<double>(0.0, hstep)),
         zs_m = zc(w0 - std::complex<double>(0.0, hstep));
    double cr = 0.0;
    for (std::size_t a2 = 0; a2 < zt_p.size(); ++a2) {
      const std::complex<double> dt = (zt_p[a2] - zt_m[a2]) / (2.0 * hstep);
      const std::complex<double> ds = (zs_p[a2] - zs_m[a2]) / (2.0 * hstep);
      cr = std::max(cr, std::abs(0.5 * (dt + std::complex<double>(0, 1) * ds)));
    }
    TaylorOrbit o = taylor_orbit(xi0, p, fp.order);
    recs[i] = {gap, cr, o.radius};
  });

  double max_gap = 0.0, max_cr = 0.0;
  double min_radius = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    max_gap = std::max(max_gap, r.group_gap);
    max_cr = std::max(max_cr, r.cr_residual);
    min_radius = std::min(min_radius, r.radius);
  }
  ordered_json j;
  j["samples"] = samples.size();
  j["max_group_property_gap"] = max_gap;
  j["max_cauchy_riemann_residual"] = max_cr;
  j["min_orbit_radius"] =
      std::isinf(min_radius) ? ordered_json("unbounded")
                             : ordered_json(min_radius);
  j["empirical_collar_reach"] = model.build_report().min_vertical_reach ==
                                        std::numeric_limits<double>::infinity()
                                    ? ordered_json("unbounded")
                                    : ordered_json(
                                          model.build_report()
                                              .min_vertical_reach);
  (void)h;
  return j;
}

ordered_json build_stage(const FoliationModel& model) {
  const BuildReport& r = model.build_report();
  ordered_json j;
  j["samples"] = r.samples;
  j["min_transversality"] = r.min_transversality;
  j["max_u_on_V"] = r.max_u_on_v;
  j["min_flow_jacobian"] = r.min_flow_jacobian;
  j["min_vertical_reach"] =
      std::isinf(r.min_vertical_reach) ? ordered_json("unbounded")
                                       : ordered_json(r.min_vertical_reach);
  j["s_max_requested"] = r.s_max_requested;
  j["s_max_effective"] = r.s_max_effective;
  j["collar_shrunk"] = r.collar_shrunk;
  return j;
}

struct CalibrationOut {
  ordered_json json;
  double max_du_xi = 0, max_dcu = 0, max_bracket = 0, max_lemma41 = 0;
};

CalibrationOut calibration_stage(const FoliationModel& model,
                                 const Scenario& s, int jobs) {
  const auto samples =
      model.collar_samples(s.grids.collar_samples, s.rng_seed ^ 0x3u);
  struct Rec {
    double du_xi, dcu_m1, bracket, lemma41;
  };
  std::vector<Rec> recs(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    auto pd = model.analyze(samples[i], 2);
    const RVec xiv = values_of(pd.xi_jet);
    const Covector du = d_value(pd.u_jet);
    const Covector dcu = dc_value(pd.u_jet);
    JetVec jxi = apply_J(pd.xi_jet);
    const double br = norm2(lie_bracket_value(pd.xi_jet, jxi));
    const ContactCheck cc = contact_residual(pd.u_jet, pd.xi_jet);
    recs[i] = {std::abs(du(xiv)), std::abs(dcu(xiv) - 1.0), br,
               cc.lemma41_gap};
  });
  CalibrationOut out;
  for (const auto& r : recs) {
    out.max_du_xi = std::max(out.max_du_xi, r.du_xi);
    out.max_dcu = std::max(out.max_dcu, r.dcu_m1);
    out.max_bracket = std::max(out.max_bracket, r.bracket);
    out.max_lemma41 = std::max(out.max_lemma41, r.lemma41);
  }
  out.json["samples"] = samples.size();
  out.json["max_du_xi"] = out.max_du_xi;
  out.json["max_dcu_xi_minus_1"] = out.max_dcu;
  out.json["max_bracket_xi_Jxi"] = out.max_bracket;
  out.json["max_lemma41_gap"] = out.max_lemma41;
  return out;
}

struct MAOut {
  ordered_json json;
  double max_ma = 0, min_nondeg = std::numeric_limits<double>::infinity();
  double max_contact = 0, max_u_err = 0;
  std::string grid_csv;
};

MAOut ma_stage(const FoliationModel& model, const Scenario& s,
               const Expression* oracle, int jobs) {
  const int m = model.hypersurface().real_dim();
  std::vector<RVec> grid;
  if (s.grids.kind == GridSpec::Kind::kShell) {
    grid = shell_samples(m, s.grids.points, s.grids.rmin, s.grids.rmax,
                         s.rng_seed ^ 0x4u);
  } else {
    grid = model.collar_samples(s.grids.points, s.rng_seed ^ 0x4u,
                                s.grids.s_fill);
  }
  struct Rec {
    double u, ma, nondeg, contact, u_err;
  };
  std::vector<Rec> recs(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    auto pd = model.analyze(grid[i], 2);
    const double ma = ma_residual(pd.u_jet);
    const double nd = nondegeneracy(pd.u_jet);
    const double ct = contact_residual(pd.u_jet, pd.xi_jet).residual;
    double uerr = 0.0;
    if (oracle) uerr = std::abs(pd.u - oracle->eval_value(grid[i]));
    recs[i] = {pd.u, ma, nd, ct, uerr};
  });
  MAOut out;
  double sum_ma = 0.0;
  for (const auto& r : recs) {
    out.max_ma = std::max(out.max_ma, r.ma);
    out.min_nondeg = std::min(out.min_nondeg, std::abs(r.nondeg));
    out.max_contact = std::max(out.max_contact, r.contact);
    out.max_u_err = std::max(out.max_u_err, r.u_err);
    sum_ma += r.ma;
  }
  out.json["grid_points"] = grid.size();
  out.json["grid_kind"] =
      s.grids.kind == GridSpec::Kind::kShell ? "shell" : "collar";
  out.json["max_ma_residual"] = out.max_ma;
  out.json["mean_ma_residual"] = grid.empty() ? 0.0 : sum_ma / grid.size();
  out.json["min_abs_nondegeneracy"] = out.min_nondeg;
  out.json["max_contact_residual"] = out.max_contact;
  if (oracle) out.json["max_u_oracle_error"] = out.max_u_err;

  std::string csv;
  for (int v = 0; v < m; ++v) csv += "x" + std::to_string(v + 1) + ",";
  csv += "u,ma_residual,nondegeneracy,contact_residual";
  if (oracle) csv += ",u_oracle_error";
  csv += "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int v = 0; v < m; ++v) csv += fmt(grid[i][v]) + ",";
    csv += fmt(recs[i].u) + "," + fmt(recs[i].ma) + "," +
           fmt(recs[i].nondeg) + "," + fmt(recs[i].contact);
    if (oracle) csv += "," + fmt(recs[i].u_err);
    csv += "\n";
  }
  out.grid_csv = std::move(csv);
  return out;
}

struct RecoveryOut {
  ordered_json json;
  double max_diff = 0, max_residual = 0;
};

RecoveryOut recovery_stage(const FoliationModel& model, const Scenario& s,
                           int jobs) {
  const Hypersurface& h = model.hypersurface();
  const auto samples = model.v_samples(s.grids.v_samples, s.rng_seed ^ 0x5u);
  struct Rec {
    double diff, residual;
  };
  std::vector<Rec> recs(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    auto pd = model.analyze(samples[i], 2);
    double res = 0.0;
    RVec xu = xi_u(pd.u_jet, &res);
    RVec xr = reeb(h, samples[i]);
    double diff = 0.0;
    for (std::size_t k = 0; k < xu.size(); ++k)
      diff = std::max(diff, std::abs(xu[k] - xr[k]));
    recs[i] = {diff, res};
  });
  RecoveryOut out;
  for (const auto& r : recs) {
    out.max_diff = std::max(out.max_diff, r.diff);
    out.max_residual = std::max(out.max_residual, r.residual);
  }
  out.json["samples"] = samples.size();
  out.json["max_xi_u_vs_reeb"] = out.max_diff;
  out.json["max_xi_u_equation_residual"] = out.max_residual;
  return out;
}

}  // namespace

std::shared_ptr<const VecField> resolve_seed(const Scenario& s,
                                             const SurfaceEntry& e) {
  switch (s.seed.kind) {
    case SeedSpec::Kind::kReeb:
      return make_reeb_field(e);
    case SeedSpec::Kind::kExpression:
      return std::make_shared<ExpressionField>(
          parse_vector_field(s.seed.field, e.n + 1));
    case SeedSpec::Kind::kScaledReeb:
      return std::make_shared<ScaledField>(
          parse_expression(s.seed.factor, e.n + 1), make_reeb_field(e));
  }
  throw ConfigError("unresolved seed kind");
}

RunOutcome run_build(const Scenario& s0, const RunOptions& opt) {
  const Scenario s = effective_scenario(s0, opt);
  const SurfaceEntry& entry = catalog_of(opt).find(s.surface);
  Hypersurface h = make_hypersurface(entry);
  auto xi0 = resolve_seed(s, entry);
  RunOutcome out;
  out.report["schema"] = 1;
  out.report["command"] = "build";
  out.report["scenario"] = scenario_echo(s);
  FoliationModel model = build_foliation(h, xi0, s.fol, s.box);
  out.report["stages"]["build"] = build_stage(model);
  out.pass = true;
  out.report["verdict"] = Verdict{}.to_json();
  return out;
}

RunOutcome run_verify(const Scenario& s0, const RunOptions& opt) {
  const Scenario s = effective_scenario(s0, opt);
  const int jobs = effective_jobs(opt);
  const double ts = opt.tol_scale;
  const SurfaceEntry& entry = catalog_of(opt).find(s.surface);
  Hypersurface h = make_hypersurface(entry);
  auto xi0 = resolve_seed(s, entry);
  std::optional<Expression> oracle;
  if (!s.oracle_u.empty())
    oracle = parse_expression(s.oracle_u, entry.n + 1);

  RunOutcome out;
  out.report["schema"] = 1;
  out.report["command"] = "verify";
  out.report["scenario"] = scenario_echo(s);
  ordered_json& stages = out.report["stages"];
  Verdict verdict;

  stages["reeb"] = reeb_stage(h, s.box, xi0.get(), s, jobs);
  verdict.require(
      stages["reeb"]["max_equation_residual"].get<double>() <=
          s.tol.reeb_residual * ts,
      exceeded("Reeb equation residual",
               stages["reeb"]["max_equation_residual"].get<double>(),
               s.tol.reeb_residual * ts));
  if (s.seed.kind == SeedSpec::Kind::kReeb)
    verdict.require(stages["reeb"]["max_seed_vs_reeb"].get<double>() <=
                        s.tol.reeb_match * ts,
                    exceeded("seed vs numeric Reeb mismatch",
                             stages["reeb"]["max_seed_vs_reeb"].get<double>(),
                             s.tol.reeb_match * ts));

  FoliationModel model = build_foliation(h, xi0, s.fol, s.box);
  stages["build"] = build_stage(model);
  verdict.require(stages["build"]["max_u_on_V"].get<double>() <= 1e-10,
                  exceeded("u on V", stages["build"]["max_u_on_V"].get<double>(),
                           1e-10));

  stages["flow"] = flow_stage(h, *xi0, model, s, jobs);
  verdict.require(
      stages["flow"]["max_group_property_gap"].get<double>() <=
          s.tol.group_property * ts,
      exceeded("flow group-property gap",
               stages["flow"]["max_group_property_gap"].get<double>(),
               s.tol.group_property * ts));
  verdict.require(
      stages["flow"]["max_cauchy_riemann_residual"].get<double>() <=
          s.tol.cauchy_riemann * ts,
      exceeded("flow Cauchy-Riemann residual",
               stages["flow"]["max_cauchy_riemann_residual"].get<double>(),
               s.tol.cauchy_riemann * ts));

  CalibrationOut cal = calibration_stage(model, s, jobs);
  stages["calibration"] = cal.json;
  verdict.require(cal.max_du_xi <= s.tol.calibration * ts,
                  exceeded("calibration |du(xi)|", cal.max_du_xi,
                           s.tol.calibration * ts));
  verdict.require(cal.max_dcu <= s.tol.calibration * ts,
                  exceeded("calibration |dc u(xi) - 1|", cal.max_dcu,
                           s.tol.calibration * ts));
  verdict.require(cal.max_bracket <= s.tol.calibration * ts,
                  exceeded("calibration |[xi, J xi]|", cal.max_bracket,
                           s.tol.calibration * ts));
  verdict.require(cal.max_lemma41 <= s.tol.lemma41 * ts,
                  exceeded("contraction vs Lie-derivative identity gap",
                           cal.max_lemma41, s.tol.lemma41 * ts));

  MAOut ma = ma_stage(model, s, oracle ? &*oracle : nullptr, jobs);
  stages["monge_ampere"] = ma.json;
  verdict.require(ma.max_ma <= s.tol.ma * ts,
                  exceeded("MA residual", ma.max_ma, s.tol.ma * ts));
  verdict.require(
      ma.min_nondeg >= s.tol.nondegeneracy_floor / ts,
      "nondegeneracy too small: " + fmt(ma.min_nondeg) + " < " +
          fmt(s.tol.nondegeneracy_floor / ts));
  verdict.require(ma.max_contact <= s.tol.contact * ts,
                  exceeded("contact residual", ma.max_contact,
                           s.tol.contact * ts));
  if (oracle)
    verdict.require(ma.max_u_err <= s.tol.u_oracle * ts,
                    exceeded("u oracle error", ma.max_u_err,
                             s.tol.u_oracle * ts));
  out.files.emplace_back("grids/ma_grid.csv", ma.grid_csv);

  if (s.seed.kind == SeedSpec::Kind::kReeb) {
    RecoveryOut rec = recovery_stage(model, s, jobs);
    stages["reeb_recovery"] = rec.json;
    verdict.require(rec.max_diff <= s.tol.reeb_match * ts,
                    exceeded("xi_u vs Reeb recovery", rec.max_diff,
                             s.tol.reeb_match * ts));
  }

  if (s.uniqueness_orders.size() == 2) {
    Scenario sa = s, sb = s;
    sa.fol.flow.order = s.uniqueness_orders[0];
    sb.fol.flow.order = s.uniqueness_orders[1];
    FoliationModel ma_model = build_foliation(h, xi0, sa.fol, s.box);
    FoliationModel mb_model = build_foliation(h, xi0, sb.fol, s.box);
    const auto samples = ma_model.collar_samples(s.grids.collar_samples,
                                                 s.rng_seed ^ 0x6u, 0.85);
    const double diff = uniqueness_check(ma_model, mb_model, samples);
    ordered_json ju;
    ju["orders"] = s.uniqueness_orders;
    ju["samples"] = samples.size();
    ju["max_u_difference"] = diff;
    stages["uniqueness"] = ju;
    verdict.require(diff <= s.tol.uniqueness * ts,
                    exceeded("uniqueness gap", diff, s.tol.uniqueness * ts));
  }

  out.report["verdict"] = verdict.to_json();
  out.pass = verdict.pass;
  return out;
}

RunOutcome run_locus(const Scenario& s0, const RunOptions& opt) {
  const Scenario s = effective_scenario(s0, opt);
  const SurfaceEntry& entry = catalog_of(opt).find(s.surface);
  Hypersurface h = make_hypersurface(entry);
  auto xi0 = resolve_seed(s, entry);
  FoliationModel model = build_foliation(h, xi0, s.fol, s.box);

  RunOutcome out;
  out.report["schema"] = 1;
  out.report["command"] = "locus";
  out.report["scenario"] = scenario_echo(s);
  Verdict verdict;

  const auto seeds = model.v_samples(3, s.rng_seed ^ 0x7u);
  const double s_half = std::min(s.grids.leaf_s_half, 0.9 * model.s_max());
  ordered_json leaves = ordered_json::array();
  const int m = h.real_dim();
  for (std::size_t li = 0; li < seeds.size(); ++li) {
    auto chart = model.leaf_chart(seeds[li], s.grids.leaf_t_half, s_half);
    SaturationScan scan =
        saturation_scan(model, chart, s.grids.leaf_nt, s.grids.leaf_ns,
                        s.tol.contact * opt.tol_scale, effective_jobs(opt));
    ordered_json jl;
    jl["seed"] = chart.seed;
    jl["classification"] = saturation_class_name(scan.result.cls);
    jl["clusters"] = scan.result.cluster_count;
    jl["max_contact_residual"] = scan.result.max_value;
    leaves.push_back(jl);
    if (!s.negative_control)
      verdict.require(scan.result.cls == ZeroSetClass::kIdenticallyZero,
                      "leaf " + std::to_string(li) +
                          " not contained in the contact locus (" +
                          saturation_class_name(scan.result.cls) + ")");

    // leaf trace CSV
    std::string csv = "t,s";
    for (int v = 0; v < m; ++v) csv += ",x" + std::to_string(v + 1);
    csv += ",u,contact_residual\n";
    const auto pts = model.chart_grid(chart, s.grids.leaf_nt, s.grids.leaf_ns);
    for (int it = 0; it < s.grids.leaf_nt; ++it)
      for (int is = 0; is < s.grids.leaf_ns; ++is) {
        const double t = -chart.t_half +
                         2.0 * chart.t_half * it /
                             std::max(1, s.grids.leaf_nt - 1);
        const double sv = -chart.s_half +
                          2.0 * chart.s_half * is /
                              std::max(1, s.grids.leaf_ns - 1);
        const std::size_t idx = it * s.grids.leaf_ns + is;
        csv += fmt(t) + "," + fmt(sv);
        for (int v = 0; v < m; ++v) csv += "," + fmt(pts[idx][v]);
        csv += "," + fmt(scan.u[idx]) + "," + fmt(scan.residuals[idx]) + "\n";
      }
    out.files.emplace_back("leaves/leaf_" + std::to_string(li) + ".csv", csv);
    out.files.emplace_back(
        "plots/leaf_" + std::to_string(li) + ".gp",
        "set datafile separator ','\nset xlabel 't'\nset ylabel 's'\n"
        "set title 'contact residual on leaf " +
            std::to_string(li) +
            "'\nset view map\nsplot 'leaves/leaf_" + std::to_string(li) +
            ".csv' using 1:2:" + std::to_string(m + 4) +
            " every ::1 with points palette pointtype 7 notitle\n");
  }
  out.report["stages"]["locus"]["leaves"] = leaves;
  out.report["verdict"] = verdict.to_json();
  out.pass = verdict.pass;
  return out;
}

RunOutcome run_vekua(const Scenario& s0, const RunOptions& opt) {
  const Scenario s = effective_scenario(s0, opt);
  const SurfaceEntry& entry = catalog_of(opt).find(s.surface);
  Hypersurface h = make_hypersurface(entry);
  auto xi0 = resolve_seed(s, entry);
  FoliationModel model = build_foliation(h, xi0, s.fol, s.box);

  RunOutcome out;
  out.report["schema"] = 1;
  out.report["command"] = "vekua";
  out.report["scenario"] = scenario_echo(s);
  Verdict verdict;

  const auto seeds = model.v_samples(2, s.rng_seed ^ 0x8u);
  const double s_half = std::min(s.grids.leaf_s_half, 0.9 * model.s_max());
  ordered_json leaves = ordered_json::array();
  for (std::size_t li = 0; li < seeds.size(); ++li) {
    auto chart = model.leaf_chart(seeds[li], s.grids.leaf_t_half, s_half);
    LeafVekuaReport rep =
        vekua_on_leaf(model, chart, s.grids.leaf_nt, s.grids.leaf_ns,
                      s.tol.contact * opt.tol_scale, effective_jobs(opt));
    ordered_json jl;
    jl["seed"] = chart.seed;
    jl["system_residual"] = rep.residual;
    jl["zero_set"] = zero_set_class_name(rep.zero_set.cls);
    jl["clusters"] = rep.zero_set.cluster_count;
    jl["max_w"] = rep.max_w;
    jl["max_decomposition_residual"] = rep.max_decomp_residual;
    leaves.push_back(jl);
    verdict.require(rep.residual <= s.tol.vekua_residual * opt.tol_scale,
                    exceeded("Vekua system residual on leaf " +
                                 std::to_string(li),
                             rep.residual, s.tol.vekua_residual *
                                               opt.tol_scale));
    if (!s.negative_control)
      verdict.require(
          rep.zero_set.cls == ZeroSetClass::kIdenticallyZero,
          "leaf " + std::to_string(li) + " zero set not identically zero (" +
              zero_set_class_name(rep.zero_set.cls) + ")");

    // CSV dump: z, w, A, B per grid point.
    const int n = rep.system.n;
    std::string csv = "t,s";
    for (int i = 0; i < n; ++i)
      csv += ",re_w" + std::to_string(i + 1) + ",im_w" + std::to_string(i + 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const std::string ij =
            std::to_string(i + 1) + std::to_string(j + 1);
        csv += ",re_A" + ij + ",im_A" + ij + ",re_B" + ij + ",im_B" + ij;
      }
    csv += ",residual\n";
    const std::vector<double> res_grid = system_residual_grid(rep.system);
    for (int it = 0; it < rep.system.nt; ++it)
      for (int is = 0; is < rep.system.ns; ++is) {
        const double t = -chart.t_half + it * rep.system.dt;
        const double sv = -chart.s_half + is * rep.system.ds;
        const std::size_t idx = it * rep.system.ns + is;
        csv += fmt(t) + "," + fmt(sv);
        for (int i = 0; i < n; ++i)
          csv += "," + fmt(rep.system.w[idx][i].real()) + "," +
                 fmt(rep.system.w[idx][i].imag());
        for (int i = 0; i < n * n; ++i)
          csv += "," + fmt(rep.system.A[idx][i].real()) + "," +
                 fmt(rep.system.A[idx][i].imag()) + "," +
                 fmt(rep.system.B[idx][i].real()) + "," +
                 fmt(rep.system.B[idx][i].imag());
        csv += "," + fmt(res_grid[idx]) + "\n";
      }
    out.files.emplace_back("vekua/leaf_" + std::to_string(li) + ".csv", csv);
  }
  out.report["stages"]["vekua"]["leaves"] = leaves;
  out.report["verdict"] = verdict.to_json();
  out.pass = verdict.pass;
  return out;
}

RunOutcome run_report(const Scenario& s, const RunOptions& opt) {
  RunOutcome v = run_verify(s, opt);
  RunOutcome l = run_locus(s, opt);
  RunOutcome k = run_vekua(s, opt);
  RunOutcome out;
  out.report = v.report;
  out.report["command"] = "report";
  out.report["stages"]["locus"] = l.report["stages"]["locus"];
  out.report["stages"]["vekua"] = k.report["stages"]["vekua"];
  ordered_json verdict;
  std::vector<std::string> reasons;
  for (const auto* r : {&v, &l, &k})
    for (const auto& reason : (*r).report["verdict"]["reasons"])
      reasons.push_back(reason.get<std::string>());
  verdict["pass"] = v.pass && l.pass && k.pass;
  verdict["reasons"] = reasons;
  out.report["verdict"] = verdict;
  out.pass = v.pass && l.pass && k.pass;
  out.files = v.files;
  for (auto& f : l.files) out.files.push_back(std::move(f));
  for (auto& f : k.files) out.files.push_back(std::move(f));
  return out;
}

std::string report_bytes(const RunOutcome& o) { return o.report.dump(2) + "\n"; }

void write_outcome(const RunOutcome& o, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / "report.json", std::ios::binary);
    f << report_bytes(o);
  }
  for (const auto& [rel, contents] : o.files) {
    const fs::path p = fs::path(out_dir) / rel;
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << contents;
  }
}

}  // namespace mafol
