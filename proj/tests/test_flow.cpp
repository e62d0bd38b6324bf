#include <doctest.h>

#include "mafol/catalog.hpp"
#include "support/oracles.hpp"

using namespace mafol;
using namespace mafol::testing;

namespace {

std::shared_ptr<const VecField> field(const char* text, int ncplx) {
  return std::make_shared<ExpressionField>(parse_vector_field(text, ncplx));
}

}  // namespace

TEST_CASE("sphere orbit: coefficients (i/2)^k/k! and unbounded radius") {
  auto xi = field("i*z1/2, i*z2/2", 2);
  RVec p{1.0, 0.0, 0.0, 0.0};
  TaylorOrbit o = taylor_orbit(*xi, p, 20);
  std::complex<double> ck(1.0, 0.0);
  for (int k = 0; k <= 20; ++k) {
    CHECK(std::abs(o.coeff[k][0] - ck.real()) <= 1e-15);
    CHECK(std::abs(o.coeff[k][1] - ck.imag()) <= 1e-15);
    CHECK(std::abs(o.coeff[k][2]) <= 1e-15);
    ck *= std::complex<double>(0.0, 0.5) / double(k + 1);
  }
  CHECK(o.unbounded());
}

TEST_CASE("constant field orbit is a straight line") {
  auto xi = field("0, 0, -1, 0", 2);
  RVec p{0.2, 0.1, 0.3, 0.05};
  TaylorOrbit o = taylor_orbit(*xi, p, 12);
  CHECK(o.coeff[0] == p);
  CHECK(o.coeff[1] == RVec{0.0, 0.0, -1.0, 0.0});
  for (int k = 2; k <= 12; ++k) CHECK(norm2(o.coeff[k]) == 0.0);
  CHECK(o.unbounded());
}

TEST_CASE("z^2 orbit from 1: unit coefficients and radius near 1") {
  auto xi = field("z1^2", 1);
  RVec p{1.0, 0.0};
  TaylorOrbit o = taylor_orbit(*xi, p, 15);
  for (int k = 0; k <= 15; ++k) {
    CHECK(o.coeff[k][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(o.coeff[k][1]) <= 1e-14);
  }
  CHECK(o.radius == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("orbit coefficients are truncation-independent") {
  auto xi = field("(1 + 0.3*x1) * (-x2/2), (1 + 0.3*x1) * (x1/2), "
                  "(1 + 0.3*x1) * (-x4/2), (1 + 0.3*x1) * (x3/2)",
                  2);
  RVec p{0.6, 0.0, 0.0, 0.8};
  TaylorOrbit lo = taylor_orbit(*xi, p, 8);
  TaylorOrbit hi = taylor_orbit(*xi, p, 20);
  for (int k = 0; k <= 8; ++k)
    for (int i = 0; i < 4; ++i)
      CHECK(lo.coeff[k][i] == doctest::Approx(hi.coeff[k][i]).epsilon(1e-13));
}

TEST_CASE("complexified evaluation") {
  auto xi = field("i*z1/2, i*z2/2", 2);
  RVec p{0.8, 0.0, 0.0, 0.6};
  TaylorOrbit o = taylor_orbit(*xi, p, 24);
  // w = 0 is the identity
  CHECK(evaluate_orbit(o, {0.0, 0.0}) == p);
  // w = i pi shrinks radially by e^{-pi/2}
  RVec q = evaluate_orbit(o, {0.0, M_PI});
  const double r = std::exp(-M_PI / 2);
  CHECK(q[0] == doctest::Approx(r * 0.8).epsilon(1e-12));
  CHECK(q[3] == doctest::Approx(r * 0.6).epsilon(1e-12));
  // Heisenberg: w = is translates Im w by -s
  auto xih = field("0, 0, -1, 0", 2);
  RVec ph{0.2, 0.1, 0.3, 0.05};
  TaylorOrbit oh = taylor_orbit(*xih, ph, 12);
  RVec qh = evaluate_orbit(oh, {0.0, 0.45});
  CHECK(qh[0] == doctest::Approx(0.2));
  CHECK(qh[1] == doctest::Approx(0.1));
  CHECK(qh[2] == doctest::Approx(0.3));
  CHECK(qh[3] == doctest::Approx(0.05 - 0.45).epsilon(1e-14));
}

TEST_CASE("real-time evaluation matches a conventional integrator") {
  auto rng = make_rng(777);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int rep = 0; rep < 20; ++rep) {
    // random polynomial field of degree <= 3 in C^2
    std::string text;
    for (int c = 0; c < 4; ++c) {
      if (c) text += ", ";
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "%.6f + %.6f*x%d + %.6f*x%d*x%d + %.6f*x%d^3", u(rng),
                    u(rng), 1 + (c % 4), u(rng), 1 + ((c + 1) % 4),
                    1 + ((c + 2) % 4), u(rng), 1 + ((c + 3) % 4));
      text += buf;
    }
    auto xi = field(text.c_str(), 2);
    RVec p = random_vec(rng, 4, 0.5);
    const double t = u(rng) * 0.2;  // |t| <= 0.1
    TaylorOrbit o = taylor_orbit(*xi, p, 20);
    RVec a = evaluate_orbit(o, {t, 0.0});
    RVec b = rk4_integrate(*xi, p, t, 2000);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
  }
}

TEST_CASE("continue_flow matches the closed sphere flow at complex times") {
  auto xi = field("i*z1/2, i*z2/2", 2);
  RVec p{1.0, 0.0, 0.0, 0.0};
  const std::complex<double> w(0.3, 0.2);
  FlowParams fp;
  fp.substeps = 4;
  RVec q = continue_flow(*xi, p, w, fp);
  const std::complex<double> z = std::exp(std::complex<double>(0.0, 0.5) * w);
  CHECK(std::abs(q[0] - z.real()) <= 1e-10);
  CHECK(std::abs(q[1] - z.imag()) <= 1e-10);
}

TEST_CASE("group property and flow laws") {
  FlowParams fp;
  for (const char* name : {"sphere", "heisenberg", "ellipsoid", "sphere3"}) {
    const SurfaceEntry& e = Catalog::builtin().find(name);
    auto xi = make_reeb_field(e);
    Hypersurface h = make_hypersurface(e);
    SamplingBox box{RVec(h.real_dim(), 0.0), RVec(h.real_dim(), 1.1)};
    if (e.label == "heisenberg") box.half = {0.4, 0.4, 0.4, 0.3};
    auto pts = sample_hypersurface(h, box, 5, 321);
    for (const RVec& p : pts) {
      // g_{is}(g_t(p)) vs g_{t+is}(p)
      const double t = 0.12, s = 0.07;
      RVec a = continue_flow(*xi, p, {t, s}, fp);
      RVec b =
          continue_flow(*xi, continue_flow(*xi, p, {t, 0.0}, fp), {0.0, s},
                        fp);
      for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) <= 1e-9);
      // full complex group property in holomorphic-extension mode
      const std::complex<double> w1(0.05, 0.04), w2(-0.03, 0.06);
      RVec c = continue_flow(*xi, continue_flow(*xi, p, w2, fp), w1, fp);
      RVec d = continue_flow(*xi, p, w1 + w2, fp);
      for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(std::abs(c[i] - d[i]) <= 1e-8);
    }
  }
}

TEST_CASE("Cauchy-Riemann residual of the continued flow") {
  auto xi = field("(1 + 0.3*x1) * (-x2/2), (1 + 0.3*x1) * (x1/2), "
                  "(1 + 0.3*x1) * (-x4/2), (1 + 0.3*x1) * (x3/2)",
                  2);
  FlowParams fp;
  fp.mode = FlowMode::kTimeSeries;
  RVec p{0.6, 0.0, 0.0, 0.8};
  const std::complex<double> w0(0.08, 0.05);
  const double h = 1e-5;
  auto at = [&](std::complex<double> w) {
    return continue_flow(*xi, p, w, fp);
  };
  RVec tp = at(w0 + h), tm = at(w0 - h);
  RVec sp = at(w0 + std::complex<double>(0, h)),
       sm = at(w0 - std::complex<double>(0, h));
  for (int a = 0; a < 2; ++a) {
    const std::complex<double> dt((tp[2 * a] - tm[2 * a]) / (2 * h),
                                  (tp[2 * a + 1] - tm[2 * a + 1]) / (2 * h));
    const std::complex<double> ds((sp[2 * a] - sm[2 * a]) / (2 * h),
                                  (sp[2 * a + 1] - sm[2 * a + 1]) / (2 * h));
    CHECK(std::abs(0.5 * (dt + std::complex<double>(0, 1) * ds)) <= 1e-7);
  }
}

TEST_CASE("time-series mode rejects vertical segments beyond one trust region") {
  auto xi = field("z1^2", 1);
  FlowParams fp;
  fp.mode = FlowMode::kTimeSeries;
  RVec p{1.0, 0.0};
  // radius is about 1, trust fraction 0.5: a 0.9 vertical step cannot fit
  CHECK_THROWS_AS(continue_flow(*xi, p, {0.0, 0.9}, fp), TrustRegionError);
  try {
    continue_flow(*xi, p, {0.0, 0.9}, fp);
  } catch (const TrustRegionError& e) {
    CHECK(e.reached_fraction >= 0.0);
    CHECK(e.reached_fraction < 1.0);
  }
  // evaluate_orbit has the same guard
  TaylorOrbit o = taylor_orbit(*xi, p, 15);
  CHECK_THROWS_AS(evaluate_orbit(o, {0.0, 0.9}), TrustRegionError);
}
