#include "mafol/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>

namespace mafol {
namespace {

ExprPtr mk(ExprOp op, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprPtr mk_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kConst;
  n->value = v;
  return n;
}

ExprPtr mk_var(int v) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kVar;
  n->var = v;
  return n;
}

bool is_const(const ExprPtr& e, double v) {
  return e->op == ExprOp::kConst && e->value == v;
}
bool is_zero(const ExprPtr& e) { return !e || is_const(e, 0.0); }

ExprPtr mk_neg(ExprPtr a) {
  if (a->op == ExprOp::kConst) return mk_const(-a->value);
  if (a->op == ExprOp::kNeg) return a->a;
  return mk(ExprOp::kNeg, std::move(a));
}

ExprPtr mk_add(ExprPtr a, ExprPtr b) {
  if (a->op == ExprOp::kConst && b->op == ExprOp::kConst)
    return mk_const(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return mk(ExprOp::kAdd, std::move(a), std::move(b));
}

ExprPtr mk_sub(ExprPtr a, ExprPtr b) {
  if (a->op == ExprOp::kConst && b->op == ExprOp::kConst)
    return mk_const(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return mk_neg(std::move(b));
  return mk(ExprOp::kSub, std::move(a), std::move(b));
}

ExprPtr mk_mul(ExprPtr a, ExprPtr b) {
  if (a->op == ExprOp::kConst && b->op == ExprOp::kConst)
    return mk_const(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return mk_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return mk(ExprOp::kMul, std::move(a), std::move(b));
}

ExprPtr mk_div(ExprPtr a, ExprPtr b) {
  if (a->op == ExprOp::kConst && b->op == ExprOp::kConst && b->value != 0.0)
    return mk_const(a->value / b->value);
  if (is_const(b, 1.0)) return a;
  return mk(ExprOp::kDiv, std::move(a), std::move(b));
}

ExprPtr mk_pow(ExprPtr a, int k) {
  if (a->op == ExprOp::kConst) return mk_const(std::pow(a->value, k));
  if (k == 0) return mk_const(1.0);
  if (k == 1) return a;
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kPow;
  n->ipow = k;
  n->a = std::move(a);
  return n;
}

// Complex pair during desugaring; im == nullptr encodes a structurally real
// subexpression.
struct CPair {
  ExprPtr re, im;
};

ExprPtr im_or_zero(const CPair& p) { return p.im ? p.im : mk_const(0.0); }

CPair c_add(const CPair& a, const CPair& b) {
  CPair r;
  r.re = mk_add(a.re, b.re);
  if (a.im || b.im) {
    r.im = mk_add(im_or_zero(a), im_or_zero(b));
    if (is_zero(r.im)) r.im = nullptr;
  }
  return r;
}

CPair c_sub(const CPair& a, const CPair& b) {
  CPair r;
  r.re = mk_sub(a.re, b.re);
  if (a.im || b.im) {
    r.im = mk_sub(im_or_zero(a), im_or_zero(b));
    if (is_zero(r.im)) r.im = nullptr;
  }
  return r;
}

CPair c_neg(const CPair& a) {
  return {mk_neg(a.re), a.im ? mk_neg(a.im) : nullptr};
}

CPair c_mul(const CPair& a, const CPair& b) {
  if (!a.im && !b.im) return {mk_mul(a.re, b.re), nullptr};
  CPair r;
  r.re = mk_sub(mk_mul(a.re, b.re), mk_mul(im_or_zero(a), im_or_zero(b)));
  r.im = mk_add(mk_mul(a.re, im_or_zero(b)), mk_mul(im_or_zero(a), b.re));
  if (is_zero(r.im)) r.im = nullptr;
  return r;
}

CPair c_conj(const CPair& a) {
  return {a.re, a.im ? mk_neg(a.im) : nullptr};
}

ExprPtr c_abs2(const CPair& a) {
  if (!a.im) return mk_mul(a.re, a.re);
  return mk_add(mk_mul(a.re, a.re), mk_mul(a.im, a.im));
}

CPair c_div(const CPair& a, const CPair& b) {
  if (!a.im && !b.im) return {mk_div(a.re, b.re), nullptr};
  ExprPtr d = c_abs2(b);
  CPair num = c_mul(a, c_conj(b));
  CPair r;
  r.re = mk_div(num.re, d);
  r.im = num.im ? mk_div(num.im, d) : nullptr;
  return r;
}

CPair c_pow(CPair a, int k) {
  if (!a.im) return {mk_pow(a.re, k), nullptr};
  if (k < 0) return c_div(CPair{mk_const(1.0), nullptr}, c_pow(a, -k));
  CPair acc{mk_const(1.0), nullptr};
  while (k) {
    if (k & 1) acc = c_mul(acc, a);
    a = c_mul(a, a);
    k >>= 1;
  }
  return acc;
}

// ---------------------------------------------------------------------------

struct Token {
  enum Kind { kNum, kIdent, kOp, kEnd } kind;
  double num = 0.0;
  std::string ident;
  char op = 0;
  std::size_t offset;  // 1-based
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    tok_.offset = pos_ + 1;
    if (pos_ >= s_.size()) {
      tok_.kind = Token::kEnd;
      return;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.data() + pos_;
      const char* end = s_.data() + s_.size();
      double v = 0.0;
      auto res = std::from_chars(begin, end, v);
      if (res.ec != std::errc())
        throw ParseError("malformed number", pos_ + 1);
      tok_.kind = Token::kNum;
      tok_.num = v;
      pos_ += static_cast<std::size_t>(res.ptr - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = pos_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
        ++j;
      tok_.kind = Token::kIdent;
      tok_.ident.assign(s_.substr(pos_, j - pos_));
      pos_ = j;
      return;
    }
    if (std::strchr("+-*/^(),", c)) {
      tok_.kind = Token::kOp;
      tok_.op = c;
      ++pos_;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'",
                     pos_ + 1);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view text, int complex_dim)
      : lex_(text), ncplx_(complex_dim), nvars_(2 * complex_dim) {}

  CPair parse_cexpr() {
    CPair a = parse_term();
    while (lex_.peek().kind == Token::kOp &&
           (lex_.peek().op == '+' || lex_.peek().op == '-')) {
      const char op = lex_.next().op;
      CPair b = parse_term();
      a = op == '+' ? c_add(a, b) : c_sub(a, b);
    }
    return a;
  }

  void expect_end() {
    const Token& t = lex_.peek();
    if (t.kind != Token::kEnd)
      throw ParseError("syntax error: unexpected trailing input", t.offset);
  }

  bool at_comma() {
    return lex_.peek().kind == Token::kOp && lex_.peek().op == ',';
  }
  void eat_comma() { lex_.next(); }
  bool at_end() { return lex_.peek().kind == Token::kEnd; }

  int nvars() const { return nvars_; }

 private:
  CPair parse_term() {
    CPair a = parse_unary();
    while (lex_.peek().kind == Token::kOp &&
           (lex_.peek().op == '*' || lex_.peek().op == '/')) {
      const char op = lex_.next().op;
      CPair b = parse_unary();
      a = op == '*' ? c_mul(a, b) : c_div(a, b);
    }
    return a;
  }

  CPair parse_unary() {
    if (lex_.peek().kind == Token::kOp) {
      if (lex_.peek().op == '-') {
        lex_.next();
        return c_neg(parse_unary());
      }
      if (lex_.peek().op == '+') {
        lex_.next();
        return parse_unary();
      }
    }
    return parse_power();
  }

  CPair parse_power() {
    CPair a = parse_atom();
    if (lex_.peek().kind == Token::kOp && lex_.peek().op == '^') {
      lex_.next();
      a = c_pow(a, parse_int_exponent());
    }
    return a;
  }

  int parse_int_exponent() {
    bool paren = false;
    if (lex_.peek().kind == Token::kOp && lex_.peek().op == '(') {
      paren = true;
      lex_.next();
    }
    double sign = 1.0;
    if (lex_.peek().kind == Token::kOp && lex_.peek().op == '-') {
      sign = -1.0;
      lex_.next();
    }
    const Token t = lex_.next();
    if (t.kind != Token::kNum || t.num != std::floor(t.num))
      throw ParseError("exponent must be an integer literal", t.offset);
    if (paren) expect_op(')');
    return static_cast<int>(sign * t.num);
  }

  void expect_op(char c) {
    const Token& t = lex_.peek();
    if (t.kind != Token::kOp || t.op != c)
      throw ParseError(std::string("syntax error: expected '") + c + "'",
                       t.offset);
    lex_.next();
  }

  CPair parse_atom() {
    const Token t = lex_.next();
    if (t.kind == Token::kNum) return {mk_const(t.num), nullptr};
    if (t.kind == Token::kOp && t.op == '(') {
      CPair a = parse_cexpr();
      expect_op(')');
      return a;
    }
    if (t.kind == Token::kIdent) return parse_ident(t);
    throw ParseError("syntax error: expected a value", t.offset);
  }

  CPair parse_ident(const Token& t) {
    const std::string& id = t.ident;
    if (id == "i") return {mk_const(0.0), mk_const(1.0)};
    if (id.size() >= 2 && (id[0] == 'x' || id[0] == 'z') &&
        std::isdigit(static_cast<unsigned char>(id[1]))) {
      int k = 0;
      auto res = std::from_chars(id.data() + 1, id.data() + id.size(), k);
      if (res.ec == std::errc() && res.ptr == id.data() + id.size()) {
        if (id[0] == 'x') {
          if (k < 1 || k > nvars_)
            throw ParseError("variable " + id + " out of range x1..x" +
                                 std::to_string(nvars_),
                             t.offset);
          return {mk_var(k - 1), nullptr};
        }
        if (k < 1 || k > ncplx_)
          throw ParseError("variable " + id + " out of range z1..z" +
                               std::to_string(ncplx_),
                           t.offset);
        return {mk_var(2 * (k - 1)), mk_var(2 * (k - 1) + 1)};
      }
    }
    static const char* kFuncs[] = {"exp",  "log", "sin",  "cos",
                                   "sqrt", "re",  "im",   "abs2",
                                   "conj"};
    bool is_func = false;
    for (const char* f : kFuncs)
      if (id == f) is_func = true;
    if (!is_func)
      throw ParseError("unknown identifier '" + id + "'", t.offset);

    expect_op('(');
    CPair arg = parse_cexpr();
    if (at_comma())
      throw ParseError("arity mismatch: '" + id + "' takes one argument",
                       lex_.peek().offset);
    expect_op(')');

    if (id == "re") return {arg.re, nullptr};
    if (id == "im") return {im_or_zero(arg), nullptr};
    if (id == "abs2") return {c_abs2(arg), nullptr};
    if (id == "conj") return c_conj(arg);
    if (id == "exp") {
      if (!arg.im || is_zero(arg.im)) return {mk(ExprOp::kExp, arg.re), nullptr};
      // exp(a+ib) = exp(a) (cos b + i sin b)
      ExprPtr ea = mk(ExprOp::kExp, arg.re);
      return {mk_mul(ea, mk(ExprOp::kCos, arg.im)),
              mk_mul(ea, mk(ExprOp::kSin, arg.im))};
    }
    if (arg.im && !is_zero(arg.im))
      throw ParseError("'" + id + "' requires a real argument", t.offset);
    ExprOp op = id == "log"   ? ExprOp::kLog
                : id == "sin" ? ExprOp::kSin
                : id == "cos" ? ExprOp::kCos
                              : ExprOp::kSqrt;
    return {mk(op, arg.re), nullptr};
  }

  Lexer lex_;
  int ncplx_, nvars_;
};

void check_real(const CPair& p) {
  if (p.im && !is_zero(p.im))
    throw ParseError(
        "expression has a nonzero imaginary part; wrap complex "
        "subexpressions in re()/im()/abs2()",
        1);
}

// ---------------------------------------------------------------------------
// Canonical printing. Parenthesization is chosen so that parsing the printed
// form reproduces the tree node for node.

int prec(const ExprNode* n) {
  switch (n->op) {
    case ExprOp::kAdd:
    case ExprOp::kSub:
      return 1;
    case ExprOp::kMul:
    case ExprOp::kDiv:
      return 2;
    case ExprOp::kNeg:
      return 3;
    case ExprOp::kPow:
      return 4;
    default:
      return 5;
  }
}

std::string num_str(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print_node(const ExprNode* n, std::string& out);

void print_child(const ExprNode* c, int min_prec, std::string& out) {
  if (prec(c) < min_prec) {
    out += '(';
    print_node(c, out);
    out += ')';
  } else {
    print_node(c, out);
  }
}

void print_node(const ExprNode* n, std::string& out) {
  switch (n->op) {
    case ExprOp::kConst:
      if (n->value < 0.0) {
        out += '(';
        out += num_str(n->value);
        out += ')';
      } else {
        out += num_str(n->value);
      }
      return;
    case ExprOp::kVar:
      out += 'x';
      out += std::to_string(n->var + 1);
      return;
    case ExprOp::kAdd:
      print_child(n->a.get(), 1, out);
      out += " + ";
      print_child(n->b.get(), 2, out);
      return;
    case ExprOp::kSub:
      print_child(n->a.get(), 1, out);
      out += " - ";
      print_child(n->b.get(), 2, out);
      return;
    case ExprOp::kMul:
      print_child(n->a.get(), 2, out);
      out += " * ";
      print_child(n->b.get(), 3, out);
      return;
    case ExprOp::kDiv:
      print_child(n->a.get(), 2, out);
      out += " / ";
      print_child(n->b.get(), 3, out);
      return;
    case ExprOp::kNeg:
      out += '-';
      print_child(n->a.get(), 3, out);
      return;
    case ExprOp::kPow:
      print_child(n->a.get(), 5, out);
      out += '^';
      if (n->ipow < 0) {
        out += '(';
        out += std::to_string(n->ipow);
        out += ')';
      } else {
        out += std::to_string(n->ipow);
      }
      return;
    case ExprOp::kExp:
    case ExprOp::kLog:
    case ExprOp::kSin:
    case ExprOp::kCos:
    case ExprOp::kSqrt: {
      const char* name = n->op == ExprOp::kExp   ? "exp"
                         : n->op == ExprOp::kLog ? "log"
                         : n->op == ExprOp::kSin ? "sin"
                         : n->op == ExprOp::kCos ? "cos"
                                                 : "sqrt";
      out += name;
      out += '(';
      print_node(n->a.get(), out);
      out += ')';
      return;
    }
  }
}

bool equal_nodes(const ExprNode* a, const ExprNode* b) {
  if (a == b) return true;
  if (!a || !b || a->op != b->op) return false;
  switch (a->op) {
    case ExprOp::kConst:
      return a->value == b->value;
    case ExprOp::kVar:
      return a->var == b->var;
    case ExprOp::kPow:
      return a->ipow == b->ipow && equal_nodes(a->a.get(), b->a.get());
    default:
      return equal_nodes(a->a.get(), b->a.get()) &&
             equal_nodes(a->b.get(), b->b.get());
  }
}

}  // namespace

Expression Expression::constant(double v, int nvars) {
  return Expression(mk_const(v), nvars);
}

Expression Expression::variable(int v, int nvars) {
  return Expression(mk_var(v), nvars);
}

std::string Expression::str() const {
  if (!root_) return "";
  std::string out;
  print_node(root_.get(), out);
  return out;
}

bool operator==(const Expression& a, const Expression& b) {
  return a.nvars_ == b.nvars_ && equal_nodes(a.root_.get(), b.root_.get());
}

Jet<double> Expression::eval_jet(std::span<const double> p, int order,
                                 int max_order) const {
  if (order < 0 || order > max_order)
    throw DomainError("jet order overflow (requested " +
                      std::to_string(order) + ", maximum " +
                      std::to_string(max_order) + ")");
  const JetSpace& sp = JetSpace::get(nvars_, order);
  std::vector<Jet<double>> vars;
  vars.reserve(nvars_);
  for (int v = 0; v < nvars_; ++v)
    vars.push_back(Jet<double>::variable(sp, v, p[v]));
  return eval<Jet<double>>(vars);
}

Expression Expression::operator+(const Expression& o) const {
  return Expression(mk_add(root_, o.root_), nvars_);
}
Expression Expression::operator-(const Expression& o) const {
  return Expression(mk_sub(root_, o.root_), nvars_);
}
Expression Expression::operator*(const Expression& o) const {
  return Expression(mk_mul(root_, o.root_), nvars_);
}
Expression Expression::operator/(const Expression& o) const {
  return Expression(mk_div(root_, o.root_), nvars_);
}
Expression Expression::operator-() const {
  return Expression(mk_neg(root_), nvars_);
}

std::vector<double> VectorExpression::eval_value(
    std::span<const double> p) const {
  std::vector<double> out;
  out.reserve(comp.size());
  for (const auto& e : comp) out.push_back(e.eval_value(p));
  return out;
}

std::vector<Jet<double>> VectorExpression::eval_jets(std::span<const double> p,
                                                     int order) const {
  const JetSpace& sp = JetSpace::get(static_cast<int>(comp.size()), order);
  std::vector<Jet<double>> vars;
  vars.reserve(comp.size());
  for (int v = 0; v < static_cast<int>(comp.size()); ++v)
    vars.push_back(Jet<double>::variable(sp, v, p[v]));
  std::vector<Jet<double>> out;
  out.reserve(comp.size());
  for (const auto& e : comp) out.push_back(e.eval<Jet<double>>(vars));
  return out;
}

Expression parse_expression(std::string_view text, int ambient_complex_dim) {
  if (text.empty()) throw ParseError("empty expression", 1);
  Parser p(text, ambient_complex_dim);
  CPair c = p.parse_cexpr();
  p.expect_end();
  check_real(c);
  return Expression(c.re, p.nvars());
}

VectorExpression parse_vector_field(std::string_view text,
                                    int ambient_complex_dim) {
  if (text.empty()) throw ParseError("empty vector field", 1);
  Parser p(text, ambient_complex_dim);
  std::vector<CPair> parts;
  parts.push_back(p.parse_cexpr());
  while (p.at_comma()) {
    p.eat_comma();
    parts.push_back(p.parse_cexpr());
  }
  p.expect_end();

  const int ncplx = ambient_complex_dim;
  const int nreal = 2 * ambient_complex_dim;
  VectorExpression out;
  if (static_cast<int>(parts.size()) == nreal) {
    for (auto& c : parts) {
      check_real(c);
      out.comp.emplace_back(c.re, nreal);
    }
  } else if (static_cast<int>(parts.size()) == ncplx) {
    for (auto& c : parts) {
      out.comp.emplace_back(c.re, nreal);
      out.comp.emplace_back(im_or_zero(c), nreal);
    }
  } else {
    throw ParseError("vector field needs " + std::to_string(ncplx) +
                         " complex or " + std::to_string(nreal) +
                         " real components, got " +
                         std::to_string(parts.size()),
                     1);
  }
  return out;
}

}  // namespace mafol
