#include <doctest.h>

#include "support/models.hpp"
#include "support/oracles.hpp"

using namespace mafol;
using namespace mafol::testing;

TEST_CASE("Heisenberg model reproduces u = Im w - |z|^2 exactly") {
  ModelBundle b = make_model("heisenberg-reeb");
  // q = (z = 0.3, w = 0.2 + 0.14i): u = 0.14 - 0.09 = 0.05
  RVec q{0.3, 0.0, 0.2, 0.14};
  auto [u, jet] = b.model->u_eval(q);
  CHECK(u == doctest::Approx(0.05).epsilon(1e-12));
  Expression oracle = parse_expression("im(z2) - abs2(z1)", 2);
  auto rng = make_rng(31);
  for (const RVec& p : b.model->collar_samples(30, 32)) {
    auto [uu, jj] = b.model->u_eval(p);
    CHECK(std::abs(uu - oracle.eval_value(p)) <= 1e-12);
  }
}

TEST_CASE("sphere model reproduces u = log|z|^2 on the collar") {
  ModelBundle b = make_model("sphere-reeb");
  RVec q{std::exp(-0.05), 0.0, 0.0, 0.0};
  auto [u, jet] = b.model->u_eval(q);
  CHECK(u == doctest::Approx(-0.1).epsilon(1e-9));

  Expression oracle = parse_expression("log(abs2(z1) + abs2(z2))", 2);
  for (const RVec& p : b.model->collar_samples(40, 33)) {
    auto [uu, jj] = b.model->u_eval(p);
    CHECK(std::abs(uu - oracle.eval_value(p)) <= 1e-9);
  }

  // on V: u = 0 and du is a positive multiple of d rho
  for (const RVec& p : b.model->v_samples(10, 34)) {
    auto pd = b.model->analyze(p, 2);
    CHECK(std::abs(pd.u) <= 1e-10);
    Covector du = d_value(pd.u_jet);
    Covector drho = d_value(b.h.rho_jet(p, 1));
    const double kappa = du.norm() / drho.norm();
    CHECK(kappa > 0.0);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(du.c[i] - kappa * drho.c[i]) <= 1e-8);
  }
}

TEST_CASE("non-transversal seed fields are rejected") {
  Scenario s = find_scenario("sphere-reeb");
  s.fol.build_samples = 8;
  const SurfaceEntry& e = Catalog::builtin().find("sphere");
  Hypersurface h = make_hypersurface(e);
  // an HT-valued field on the sphere: (-conj(z2), conj(z1))
  auto ht_field = std::make_shared<ExpressionField>(
      parse_vector_field("-conj(z2), conj(z1)", 2));
  CHECK_THROWS_AS(build_foliation(h, ht_field, s.fol, s.box), DomainError);
}

TEST_CASE("u and xi jets agree with finite differences of the model") {
  ModelBundle b = make_model("sphere-perturbed");
  auto samples = b.model->collar_samples(10, 35);
  const double h = 1e-5;
  for (const RVec& q : samples) {
    auto pd = b.model->analyze(q, 2);
    for (int k = 0; k < 4; ++k) {
      RVec qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      auto pp = b.model->analyze(qp, 2), pm = b.model->analyze(qm, 2);
      // first derivatives of u
      const double fd = (pp.u - pm.u) / (2 * h);
      CHECK(std::abs(pd.u_jet.partial(k) - fd) <=
            1e-6 * (1.0 + std::abs(fd)));
      // second derivatives: compare d(du) against the jet's quadratic part
      for (int i = 0; i < 4; ++i) {
        const double fd2 =
            (pp.u_jet.partial(i) - pm.u_jet.partial(i)) / (2 * h);
        JetSpace::Exponents e{};
        e[i] += 1;
        e[k] += 1;
        const double jet2 = pd.u_jet.coeff(e) * (i == k ? 2.0 : 1.0);
        CHECK(std::abs(jet2 - fd2) <= 1e-5 * (1.0 + std::abs(fd2)));
      }
    }
  }
}

TEST_CASE("calibration residuals on built models") {
  ModelBundle sph = make_model("sphere-reeb");
  auto rep = sph.model->calibration_residuals(sph.model->collar_samples(50, 36));
  CHECK(rep.max_du_xi <= 1e-8);
  CHECK(rep.max_dcu_xi_m1 <= 1e-8);
  CHECK(rep.max_bracket <= 1e-8);

  ModelBundle heis = make_model("heisenberg-reeb");
  auto reph =
      heis.model->calibration_residuals(heis.model->collar_samples(50, 37));
  CHECK(reph.max_du_xi <= 1e-10);
  CHECK(reph.max_dcu_xi_m1 <= 1e-10);
  CHECK(reph.max_bracket <= 1e-10);

  // restricted to V the pairing dc u(xi0) - 1 matches theta(xi0) = 1
  for (const RVec& p : sph.model->v_samples(10, 38)) {
    auto pd = sph.model->analyze(p, 2);
    CHECK(std::abs(dc_value(pd.u_jet)(values_of(pd.xi_jet)) - 1.0) <= 1e-8);
  }
}

TEST_CASE("leaf charts: closed form, u = -s, harmonic restriction") {
  ModelBundle b = make_model("sphere-reeb");
  RVec seed{1.0, 0.0, 0.0, 0.0};
  auto chart = b.model->leaf_chart(seed, 0.4, 0.15);
  // chart(t, s) = e^{(it - s)/2} (1, 0)
  for (double t : {-0.3, 0.0, 0.25})
    for (double s : {-0.1, 0.0, 0.12}) {
      RVec got = b.model->chart_point(chart, t, s);
      const std::complex<double> z =
          std::exp(std::complex<double>(-s, t) * 0.5);
      CHECK(std::abs(got[0] - z.real()) <= 1e-10);
      CHECK(std::abs(got[1] - z.imag()) <= 1e-10);
      CHECK(std::abs(got[2]) <= 1e-12);
      CHECK(std::abs(got[3]) <= 1e-12);
    }
  // chart(0,0) = seed
  CHECK(norm2(b.model->chart_point(chart, 0.0, 0.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // u along the chart is -s, validated through u_eval
  const int nt = 9, ns = 7;
  auto grid = b.model->chart_grid(chart, nt, ns);
  std::vector<double> ugrid(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    ugrid[i] = b.model->u_eval(grid[i]).first;
  for (int it = 0; it < nt; ++it)
    for (int is = 0; is < ns; ++is) {
      const double s = -chart.s_half + 2.0 * chart.s_half * is / (ns - 1);
      CHECK(std::abs(ugrid[it * ns + is] + s) <= 1e-8);
    }
  // discrete Laplacian of u on the leaf
  const double dt = 2.0 * chart.t_half / (nt - 1);
  const double ds = 2.0 * chart.s_half / (ns - 1);
  for (int it = 1; it + 1 < nt; ++it)
    for (int is = 1; is + 1 < ns; ++is) {
      const double lap =
          (ugrid[(it + 1) * ns + is] - 2 * ugrid[it * ns + is] +
           ugrid[(it - 1) * ns + is]) /
              (dt * dt) +
          (ugrid[it * ns + is + 1] - 2 * ugrid[it * ns + is] +
           ugrid[it * ns + is - 1]) /
              (ds * ds);
      CHECK(std::abs(lap) <= 1e-6);
    }

  // chart-map holomorphy: centered Cauchy-Riemann residual
  const double h = 1e-5;
  RVec tp = b.model->chart_point(chart, 0.1 + h, 0.05);
  RVec tm = b.model->chart_point(chart, 0.1 - h, 0.05);
  RVec sp = b.model->chart_point(chart, 0.1, 0.05 + h);
  RVec sm = b.model->chart_point(chart, 0.1, 0.05 - h);
  for (int a = 0; a < 2; ++a) {
    const std::complex<double> dtd((tp[2 * a] - tm[2 * a]) / (2 * h),
                                   (tp[2 * a + 1] - tm[2 * a + 1]) / (2 * h));
    const std::complex<double> dsd((sp[2 * a] - sm[2 * a]) / (2 * h),
                                   (sp[2 * a + 1] - sm[2 * a + 1]) / (2 * h));
    CHECK(std::abs(0.5 * (dtd + std::complex<double>(0, 1) * dsd)) <= 1e-7);
  }
}

TEST_CASE("u(g_is(p)) = -s and monotonicity along vertical lines") {
  ModelBundle b = make_model("sphere-perturbed");
  auto pts = b.model->v_samples(8, 40);
  for (const RVec& p : pts) {
    TaylorOrbit o = taylor_orbit(*b.xi0, p, b.scenario.fol.flow.order);
    double prev_u = std::numeric_limits<double>::infinity();
    for (double s : {-0.09, -0.03, 0.02, 0.08}) {
      RVec q = evaluate_orbit(o, {0.0, s});
      auto [u, jet] = b.model->u_eval(q);
      CHECK(std::abs(u + s) <= 1e-8);
      CHECK(u < prev_u);  // u = -s is strictly decreasing in s
      prev_u = u;
    }
  }
}

TEST_CASE("uniqueness: truncation orders, closed form, and self") {
  ModelBundle b12 = make_model("sphere-reeb");
  Scenario s24 = b12.scenario;
  b12.scenario.fol.flow.order = 12;
  s24.fol.flow.order = 24;
  FoliationModel m12 =
      build_foliation(b12.h, b12.xi0, b12.scenario.fol, b12.scenario.box);
  FoliationModel m24 = build_foliation(b12.h, b12.xi0, s24.fol, s24.box);
  auto samples = m12.collar_samples(50, 41);
  CHECK(uniqueness_check(m12, m24, samples) <= 1e-9);
  CHECK(uniqueness_check(m12, m12, samples) == 0.0);
  Expression oracle = parse_expression("log(abs2(z1) + abs2(z2))", 2);
  double worst = 0.0;
  for (const RVec& q : samples)
    worst = std::max(worst,
                     std::abs(m12.analyze(q, 1).u - oracle.eval_value(q)));
  CHECK(worst <= 1e-6);
}

TEST_CASE("queries far outside the collar fail loudly") {
  ModelBundle b = make_model("sphere-reeb");
  CHECK_THROWS_AS(b.model->u_eval(RVec{2.0, 0.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(b.model->leaf_chart(RVec{1.0, 0.0, 0.0, 0.0}, 0.4, 5.0),
                  CollarError);
}
