#include <doctest.h>

#include "support/oracles.hpp"

using namespace mafol;
using namespace mafol::testing;

TEST_CASE("abs2(z1) - 1 desugars to (Re z1)^2 + (Im z1)^2 - 1") {
  Expression got = parse_expression("abs2(z1) - 1", 2);
  Expression x1 = Expression::variable(0, 4);
  Expression x2 = Expression::variable(1, 4);
  Expression want = x1 * x1 + x2 * x2 - Expression::constant(1.0, 4);
  CHECK(got == want);
}

TEST_CASE("im(z2) - abs2(z1) desugars to the Heisenberg tree") {
  Expression got = parse_expression("im(z2) - abs2(z1)", 2);
  Expression x1 = Expression::variable(0, 4);
  Expression x2 = Expression::variable(1, 4);
  Expression x4 = Expression::variable(3, 4);
  Expression want = x4 - (x1 * x1 + x2 * x2);
  CHECK(got == want);
}

TEST_CASE("parse errors carry 1-based byte offsets") {
  try {
    parse_expression("re(z1", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset == 6);
  }
  CHECK_THROWS_AS(parse_expression("", 2), ParseError);
  CHECK_THROWS_AS(parse_expression("x1 +", 2), ParseError);
  CHECK_THROWS_AS(parse_expression("x1 x2", 2), ParseError);
}

TEST_CASE("unknown identifiers and arity mismatches") {
  CHECK_THROWS_AS(parse_expression("frob(x1)", 2), ParseError);
  CHECK_THROWS_AS(parse_expression("y1 + 1", 2), ParseError);
  CHECK_THROWS_AS(parse_expression("x9", 2), ParseError);   // out of range
  CHECK_THROWS_AS(parse_expression("z3", 2), ParseError);   // out of range
  CHECK_THROWS_AS(parse_expression("exp(x1, x2)", 2), ParseError);
  CHECK_THROWS_AS(parse_expression("sin(z1)", 2), ParseError);  // complex arg
  CHECK_THROWS_AS(parse_expression("z1 + 1", 2), ParseError);   // not real
  CHECK_THROWS_AS(parse_expression("x1^x2", 2), ParseError);    // non-integer
}

TEST_CASE("abs2(z1) - 1 jet at z1 = (0.6, 0.8)") {
  Expression e = parse_expression("abs2(z1) - 1", 1);
  RVec p{0.6, 0.8};
  Jet<double> j = e.eval_jet(p, 2);
  CHECK(j.value() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(j.partial(0) == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(j.partial(1) == doctest::Approx(1.6).epsilon(1e-14));
  JetSpace::Exponents e20{}, e02{}, e11{};
  e20[0] = 2;
  e02[1] = 2;
  e11[0] = e11[1] = 1;
  CHECK(j.coeff(e20) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(j.coeff(e02) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(j.coeff(e11) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("print/parse round-trips on the desugared tree") {
  // hand-picked structures that stress precedence and associativity
  for (const char* text :
       {"x1 + x2 + x3", "x1 - (x2 + x3)", "x1 * (x2 + x3)", "x1 / (x2 * x3)",
        "-(x1 * x2)", "x1 * -x2", "(x1 + x2)^3", "x1^2 - x2^2",
        "exp(x1) * log(x2 + 2) - sqrt(x3 + 4) / cos(x4)",
        "abs2(z1) - 1", "im(z2) - abs2(z1)"}) {
    Expression a = parse_expression(text, 2);
    Expression b = parse_expression(a.str(), 2);
    CAPTURE(text);
    CAPTURE(a.str());
    CHECK(a == b);
  }
  // random polynomial trees
  auto rng = make_rng(42);
  for (int rep = 0; rep < 100; ++rep) {
    Expression a = random_poly_expr(rng, 4);
    Expression b = parse_expression(a.str(), 2);
    CAPTURE(a.str());
    CHECK(a == b);
  }
}

TEST_CASE("vector fields parse in complex or real component form") {
  VectorExpression complex_form = parse_vector_field("i*z1/2, i*z2/2", 2);
  REQUIRE(complex_form.dim() == 4);
  auto rng = make_rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    RVec p = random_vec(rng, 4);
    RVec v = complex_form.eval_value(p);
    CHECK(v[0] == doctest::Approx(-p[1] / 2).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(p[0] / 2).epsilon(1e-14));
    CHECK(v[2] == doctest::Approx(-p[3] / 2).epsilon(1e-14));
    CHECK(v[3] == doctest::Approx(p[2] / 2).epsilon(1e-14));
  }
  VectorExpression real_form = parse_vector_field("0, 0, -1, 0", 2);
  REQUIRE(real_form.dim() == 4);
  RVec v = real_form.eval_value(RVec{0.1, 0.2, 0.3, 0.4});
  CHECK(v[2] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(parse_vector_field("x1, x2, x3", 2), ParseError);
}

namespace {
void walk_desugared(const ExprNode* n, int nvars) {
  REQUIRE(n != nullptr);
  if (n->op == ExprOp::kVar) {
    CHECK(n->var >= 0);
    CHECK(n->var < nvars);
  }
  if (n->a) walk_desugared(n->a.get(), nvars);
  if (n->b) walk_desugared(n->b.get(), nvars);
}
}  // namespace

TEST_CASE("desugared trees are closed over the declared real coordinates") {
  for (const char* text :
       {"abs2(z1) - 1", "im(z2) - abs2(z1)", "re(conj(z1) * z2)",
        "abs2(z1 + i*z2)^2 / (1 + abs2(z2))"}) {
    Expression e = parse_expression(text, 2);
    walk_desugared(e.root().get(), 4);
  }
}

TEST_CASE("complex exponential desugars through exp/cos/sin") {
  // exp(i*x1) = (cos x1, sin x1); use re() to extract
  Expression re = parse_expression("re(exp(i * x1))", 1);
  Expression im = parse_expression("im(exp(i * x1))", 1);
  RVec p{0.7, 0.0};
  CHECK(re.eval_value(p) == doctest::Approx(std::cos(0.7)).epsilon(1e-14));
  CHECK(im.eval_value(p) == doctest::Approx(std::sin(0.7)).epsilon(1e-14));
}
