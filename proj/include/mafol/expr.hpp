#pragma once

// Real-analytic scalar and vector-field expressions over the ambient real
// coordinates x1..x_{2n+2} (x_{2a-1} = Re z_a, x_{2a} = Im z_a). The parser
// desugars the complex convenience atoms (z_a, conj, re, im, abs2, the
// literal i) into real-coordinate trees; evaluation is generic over any
// scalar ring that provides arithmetic plus exp/log/sin/cos/sqrt/pow, so the
// same tree yields plain values, multivariate jets or flow series.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mafol/jet.hpp"

namespace mafol {

enum class ExprOp {
  kConst,
  kVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kPow,
  kExp,
  kLog,
  kSin,
  kCos,
  kSqrt
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  double value = 0.0;  // kConst
  int var = -1;        // kVar (0-based real coordinate)
  int ipow = 0;        // kPow exponent
  ExprPtr a, b;
};

class Expression {
 public:
  Expression() = default;
  Expression(ExprPtr root, int nvars) : root_(std::move(root)), nvars_(nvars) {}

  static Expression constant(double v, int nvars);
  static Expression variable(int v, int nvars);

  bool valid() const { return root_ != nullptr; }
  int nvars() const { return nvars_; }
  const ExprPtr& root() const { return root_; }

  std::string str() const;

  // Structural equality of the desugared trees.
  friend bool operator==(const Expression& a, const Expression& b);

  template <class S>
  S eval(std::span<const S> vars) const;

  double eval_value(std::span<const double> p) const {
    return eval<double>(p);
  }

  // Exact Taylor jet of the expression at p (coefficients are Taylor
  // coefficients, derivative / factorial). Default maximum order 8.
  Jet<double> eval_jet(std::span<const double> p, int order,
                       int max_order = 8) const;

  Expression operator+(const Expression& o) const;
  Expression operator-(const Expression& o) const;
  Expression operator*(const Expression& o) const;
  Expression operator/(const Expression& o) const;
  Expression operator-() const;

 private:
  ExprPtr root_;
  int nvars_ = 0;
};

// Real components of a vector field on C^{n+1} ~ R^{2n+2}.
struct VectorExpression {
  std::vector<Expression> comp;  // size 2n+2

  int dim() const { return static_cast<int>(comp.size()); }

  std::vector<double> eval_value(std::span<const double> p) const;
  std::vector<Jet<double>> eval_jets(std::span<const double> p,
                                     int order) const;
  template <class S>
  std::vector<S> eval(std::span<const S> vars) const {
    std::vector<S> out;
    out.reserve(comp.size());
    for (const auto& e : comp) out.push_back(e.eval<S>(vars));
    return out;
  }
};

// Parse a scalar expression; ambient_complex_dim = n+1 fixes the variable
// set x1..x_{2(n+1)} and the complex atoms z1..z_{n+1}. The desugared result
// must be real-valued (structurally zero imaginary part); wrap complex
// subexpressions in re()/im()/abs2() otherwise.
Expression parse_expression(std::string_view text, int ambient_complex_dim);

// Parse a vector field given as a comma-separated list: either 2n+2 real
// component expressions, or n+1 complex component expressions (which are
// split into real and imaginary parts coordinate by coordinate).
VectorExpression parse_vector_field(std::string_view text,
                                    int ambient_complex_dim);

namespace detail {

template <class S>
S eval_node(const ExprNode* n, std::span<const S> vars, const S& proto) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  switch (n->op) {
    case ExprOp::kConst:
      return constant_like(proto, n->value);
    case ExprOp::kVar:
      return vars[n->var];
    case ExprOp::kAdd:
      return eval_node(n->a.get(), vars, proto) +
             eval_node(n->b.get(), vars, proto);
    case ExprOp::kSub:
      return eval_node(n->a.get(), vars, proto) -
             eval_node(n->b.get(), vars, proto);
    case ExprOp::kMul:
      return eval_node(n->a.get(), vars, proto) *
             eval_node(n->b.get(), vars, proto);
    case ExprOp::kDiv:
      return eval_node(n->a.get(), vars, proto) /
             eval_node(n->b.get(), vars, proto);
    case ExprOp::kNeg:
      return -eval_node(n->a.get(), vars, proto);
    case ExprOp::kPow:
      return pow(eval_node(n->a.get(), vars, proto), n->ipow);
    case ExprOp::kExp:
      return exp(eval_node(n->a.get(), vars, proto));
    case ExprOp::kLog:
      return log(eval_node(n->a.get(), vars, proto));
    case ExprOp::kSin:
      return sin(eval_node(n->a.get(), vars, proto));
    case ExprOp::kCos:
      return cos(eval_node(n->a.get(), vars, proto));
    case ExprOp::kSqrt:
      return sqrt(eval_node(n->a.get(), vars, proto));
  }
  throw Error("corrupt expression node");
}

}  // namespace detail

template <class S>
S Expression::eval(std::span<const S> vars) const {
  if (!root_) throw Error("evaluating an empty expression");
  return detail::eval_node(root_.get(), vars, vars[0]);
}

}  // namespace mafol
