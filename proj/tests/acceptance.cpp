// Acceptance suite: runs every gate criterion end to end at its stated
// tolerance and prints one pass/fail line per criterion. Exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <map>

#include "mafol/pipeline.hpp"
#include "support/oracles.hpp"

using namespace mafol;
using namespace mafol::testing;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double stage_num(const RunOutcome& o, const char* stage, const char* key) {
  return o.report["stages"][stage][key].get<double>();
}

struct Timed {
  RunOutcome outcome;
  double seconds;
};

Timed timed_verify(const std::string& label, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t{run_verify(find_scenario(label), opt), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  return t;
}

std::string fmtnum(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Criterion 7: the three frame-bracket identities over random data.
bool lemma_suite(std::string* detail) {
  auto rng = make_rng(7001);
  std::uniform_real_distribution<double> uc(0.5, 1.5);
  double worst_i = 0.0, worst_ii = 0.0, worst_iii = 0.0;

  for (int rep = 0; rep < 50; ++rep) {
    Expression f = random_poly_expr(rng, 4);
    RVec p = random_vec(rng, 4);
    TwoForm w = ddc_value(f.eval_jet(p, 2));
    RVec X = random_vec(rng, 4), Y = random_vec(rng, 4);
    worst_i = std::max(worst_i,
                       std::abs(w(apply_J(X), apply_J(Y)) - w(X, Y)));
  }

  auto pairing_field = [](const JetVec& omega, const RVec& A, double c) {
    const int m = static_cast<int>(omega.size());
    Jet<double> pairing = zero_like(omega[0]);
    for (int i = 0; i < m; ++i) pairing += omega[i] * A[i];
    Jet<double> factor = inverse(pairing) * c;
    JetVec X(m, factor);
    for (int i = 0; i < m; ++i) X[i] = factor * A[i];
    return X;
  };

  int done = 0;
  while (done < 50) {
    Expression f = random_poly_expr(rng, 4);
    RVec p = random_vec(rng, 4);
    Jet<double> fj = f.eval_jet(p, 4);
    JetVec theta = dc_jets(fj);
    RVec A = random_vec(rng, 4), B = random_vec(rng, 4);
    Covector th{values_of(theta)};
    if (std::abs(th(A)) < 0.3 || std::abs(th(B)) < 0.3) continue;
    JetVec X = pairing_field(theta, A, uc(rng));
    JetVec Y = pairing_field(theta, B, uc(rng));
    const double lhs = d_of_oneform(theta)(values_of(X), values_of(Y));
    const double rhs = -th(lie_bracket_value(X, Y));
    worst_ii = std::max(worst_ii, std::abs(lhs - rhs));
    ++done;
  }

  done = 0;
  while (done < 50) {
    Expression f = random_poly_expr(rng, 4);
    RVec p = random_vec(rng, 4);
    JetVec df = d_jets(f.eval_jet(p, 4));
    RVec A = random_vec(rng, 4), B = random_vec(rng, 4);
    Covector d0{values_of(df)};
    if (std::abs(d0(A)) < 0.3 || std::abs(d0(B)) < 0.3) continue;
    JetVec X = pairing_field(df, A, uc(rng));
    JetVec Y = pairing_field(df, B, uc(rng));
    worst_iii = std::max(worst_iii, std::abs(d0(lie_bracket_value(X, Y))));
    ++done;
  }

  *detail = "identity gaps (i) " + fmtnum(worst_i) + ", (ii) " +
            fmtnum(worst_ii) + ", (iii) " + fmtnum(worst_iii) +
            " over 50 random cases each, tolerance 1e-8";
  return worst_i <= 1e-8 && worst_ii <= 1e-8 && worst_iii <= 1e-8;
}

}  // namespace

int main() {
  RunOptions opt;
  opt.jobs = 0;  // hardware concurrency

  // One verify run per scenario (the sphere twice for determinism).
  std::map<std::string, Timed> runs;
  for (const char* label :
       {"sphere-reeb", "heisenberg-reeb", "ellipsoid-reeb", "sphere3-reeb",
        "sphere-perturbed"})
    runs.emplace(label, timed_verify(label, opt));

  const Timed& sph = runs.at("sphere-reeb");
  const Timed& heis = runs.at("heisenberg-reeb");
  const Timed& pert = runs.at("sphere-perturbed");

  // 1. Sphere oracle: max |u - log|z|^2| <= 1e-6 on the 10^3 shell grid.
  {
    const double err = stage_num(sph.outcome, "monge_ampere",
                                 "max_u_oracle_error");
    const bool ok = err <= 1e-6 && sph.outcome.pass && sph.seconds <= 60.0;
    report(1, ok,
           "sphere oracle error " + fmtnum(err) + " <= 1e-6 on 1000 shell "
           "points, runtime " + fmtnum(sph.seconds) + "s <= 60s");
  }

  // 2. Heisenberg oracle: <= 1e-9, runtime <= 10 s.
  {
    const double err = stage_num(heis.outcome, "monge_ampere",
                                 "max_u_oracle_error");
    const bool ok = err <= 1e-9 && heis.outcome.pass && heis.seconds <= 10.0;
    report(2, ok,
           "Heisenberg oracle error " + fmtnum(err) + " <= 1e-9 on 1000 "
           "collar points, runtime " + fmtnum(heis.seconds) + "s <= 10s");
  }

  // 3. MA verification on both oracle scenarios.
  {
    bool ok = true;
    std::string parts;
    for (const char* label : {"sphere-reeb", "heisenberg-reeb"}) {
      const double ma = stage_num(runs.at(label).outcome, "monge_ampere",
                                  "max_ma_residual");
      const double nd = stage_num(runs.at(label).outcome, "monge_ampere",
                                  "min_abs_nondegeneracy");
      ok = ok && ma <= 1e-6 && nd >= 1e-3;
      parts += std::string(label) + " ma " + fmtnum(ma) + " nondeg " +
               fmtnum(nd) + "  ";
    }
    report(3, ok, "MA residual <= 1e-6 and nondegeneracy >= 1e-3: " + parts);
  }

  // 4. Negative control: calibrated yet neither contact nor MA.
  {
    const double cal = std::max(
        {stage_num(pert.outcome, "calibration", "max_du_xi"),
         stage_num(pert.outcome, "calibration", "max_dcu_xi_minus_1"),
         stage_num(pert.outcome, "calibration", "max_bracket_xi_Jxi")});
    const double contact =
        stage_num(pert.outcome, "monge_ampere", "max_contact_residual");
    const double ma = stage_num(pert.outcome, "monge_ampere",
                                "max_ma_residual");
    const bool ok = cal <= 1e-7 && contact >= 1e-3 && ma >= 1e-2 &&
                    !pert.outcome.pass;
    report(4, ok,
           "perturbed seed: calibration " + fmtnum(cal) +
               " <= 1e-7, contact " + fmtnum(contact) + " >= 1e-3, MA " +
               fmtnum(ma) + " >= 1e-2, verify verdict fails");
  }

  // 5. Calibration suite at 200 collar points for every built scenario.
  {
    bool ok = true;
    double worst = 0.0;
    for (const auto& [label, t] : runs) {
      for (const char* key :
           {"max_du_xi", "max_dcu_xi_minus_1", "max_bracket_xi_Jxi"}) {
        const double v = stage_num(t.outcome, "calibration", key);
        worst = std::max(worst, v);
        ok = ok && v <= 1e-7;
      }
    }
    report(5, ok,
           "du(xi), dc u(xi)-1, [xi,Jxi] <= 1e-7 at 200 collar points per "
           "scenario (worst " + fmtnum(worst) + ")");
  }

  // 6. Contraction vs Lie-derivative identity, independent code paths.
  {
    bool ok = true;
    double worst = 0.0;
    for (const auto& [label, t] : runs) {
      const double v = stage_num(t.outcome, "calibration", "max_lemma41_gap");
      worst = std::max(worst, v);
      ok = ok && v <= 1e-8;
    }
    report(6, ok,
           "xi . ddc u vs L_xi dc u gap <= 1e-8 at 200 collar points per "
           "scenario (worst " + fmtnum(worst) + ")");
  }

  // 7. Frame-bracket identity property suite.
  {
    std::string detail;
    const bool ok = lemma_suite(&detail);
    report(7, ok, detail);
  }

  // 8. Flow laws for all catalog fields.
  {
    bool ok = true;
    double worst_gap = 0.0, worst_cr = 0.0;
    for (const char* label : {"sphere-reeb", "heisenberg-reeb",
                              "ellipsoid-reeb", "sphere3-reeb"}) {
      const double gap = stage_num(runs.at(label).outcome, "flow",
                                   "max_group_property_gap");
      const double cr = stage_num(runs.at(label).outcome, "flow",
                                  "max_cauchy_riemann_residual");
      worst_gap = std::max(worst_gap, gap);
      worst_cr = std::max(worst_cr, cr);
      ok = ok && gap <= 1e-9 && cr <= 1e-7;
    }
    report(8, ok,
           "group property gap " + fmtnum(worst_gap) +
               " <= 1e-9, Cauchy-Riemann residual " + fmtnum(worst_cr) +
               " <= 1e-7 across catalog fields");
  }

  // 9. Vekua pipeline: 41x41 residual on the control, identically-zero
  //    classification on contact scenarios.
  {
    RunOutcome vp = run_vekua(find_scenario("sphere-perturbed"), opt);
    double worst_res = 0.0;
    for (const auto& leaf : vp.report["stages"]["vekua"]["leaves"])
      worst_res = std::max(worst_res, leaf["system_residual"].get<double>());
    bool zeros_ok = true;
    for (const char* label : {"sphere-reeb", "heisenberg-reeb"}) {
      RunOutcome vc = run_vekua(find_scenario(label), opt);
      for (const auto& leaf : vc.report["stages"]["vekua"]["leaves"])
        zeros_ok = zeros_ok &&
                   leaf["zero_set"].get<std::string>() == "identically_zero";
    }
    const bool ok = worst_res <= 1e-4 && zeros_ok;
    report(9, ok,
           "perturbed-leaf system residual " + fmtnum(worst_res) +
               " <= 1e-4 on 41x41 grids; contact leaves identically zero");
  }

  // 10. Reeb recovery from the constructed solution.
  {
    bool ok = true;
    double worst = 0.0;
    for (const char* label : {"sphere-reeb", "heisenberg-reeb",
                              "ellipsoid-reeb", "sphere3-reeb"}) {
      const double v = stage_num(runs.at(label).outcome, "reeb_recovery",
                                 "max_xi_u_vs_reeb");
      worst = std::max(worst, v);
      ok = ok && v <= 1e-7;
    }
    report(10, ok,
           "xi_u from u matches the seed Reeb field on V to " +
               fmtnum(worst) + " (<= 1e-7) at 100 points per scenario");
  }

  // 11. Uniqueness across truncation orders.
  {
    const double v = stage_num(sph.outcome, "uniqueness", "max_u_difference");
    report(11, v <= 1e-9,
           "models at Taylor orders 12 and 24 agree to " + fmtnum(v) +
               " (<= 1e-9) over the shared collar");
  }

  // 12. Determinism: byte-identical reports.
  {
    Timed again = timed_verify("sphere-reeb", opt);
    const bool ok =
        report_bytes(sph.outcome) == report_bytes(again.outcome);
    report(12, ok, "repeated verify runs produce byte-identical reports");
  }

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
