#include "moprox/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <type_traits>
#include <utility>

#include "moprox/numfmt.hpp"

namespace moprox {

enum class Op {
  constant,
  variable,
  add,
  sub,
  mul,
  div,
  neg,
  pow_int,
  fn_ln,
  fn_sqrt,
  fn_exp,
  fn_sin,
  fn_cos,
  fn_abs,
};

struct ExprNode {
  Op op;
  double constant = 0.0;   // Op::constant
  int var_index = 0;       // Op::variable, 0-based
  int exponent = 0;        // Op::pow_int
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

// ---- parsing ----

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
};

struct Parser {
  Lexer lex;
  int nvars;

  NodePtr parse_expr() {
    NodePtr node = parse_term();
    for (;;) {
      if (lex.consume('+')) {
        node = make_node({Op::add, 0, 0, 0, node, parse_term()});
      } else if (lex.consume('-')) {
        node = make_node({Op::sub, 0, 0, 0, node, parse_term()});
      } else {
        return node;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr node = parse_factor();
    for (;;) {
      if (lex.consume('*')) {
        node = make_node({Op::mul, 0, 0, 0, node, parse_factor()});
      } else if (lex.consume('/')) {
        node = make_node({Op::div, 0, 0, 0, node, parse_factor()});
      } else {
        return node;
      }
    }
  }

  NodePtr parse_factor() {
    bool negated = lex.consume('-');
    NodePtr node = parse_atom();
    if (lex.consume('^')) {
      std::size_t at = lex.pos;
      node = make_node({Op::pow_int, 0, 0, parse_integer(at), node, nullptr});
    }
    if (negated) node = make_node({Op::neg, 0, 0, 0, node, nullptr});
    return node;
  }

  int parse_integer(std::size_t at) {
    lex.skip_ws();
    std::size_t start = lex.pos;
    while (lex.pos < lex.text.size() && std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
      ++lex.pos;
    if (lex.pos == start) throw ParseError("expected integer exponent", at);
    int value = 0;
    auto res = std::from_chars(lex.text.data() + start, lex.text.data() + lex.pos, value);
    if (res.ec != std::errc() || value > 64)
      throw ParseError("exponent out of range (0..64)", start);
    return value;
  }

  NodePtr parse_atom() {
    lex.skip_ws();
    std::size_t at = lex.pos;
    if (at >= lex.text.size()) throw ParseError("unexpected end of expression", at);
    char c = lex.text[at];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(at);

    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident(at);

    if (c == '(') {
      ++lex.pos;
      NodePtr inner = parse_expr();
      if (!lex.consume(')')) throw ParseError("expected ')'", lex.pos);
      return inner;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", at);
  }

  NodePtr parse_number(std::size_t at) {
    std::size_t p = at;
    auto digits = [&] {
      while (p < lex.text.size() && std::isdigit(static_cast<unsigned char>(lex.text[p]))) ++p;
    };
    digits();
    if (p < lex.text.size() && lex.text[p] == '.') {
      ++p;
      digits();
    }
    if (p < lex.text.size() && (lex.text[p] == 'e' || lex.text[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < lex.text.size() && (lex.text[q] == '+' || lex.text[q] == '-')) ++q;
      std::size_t d = q;
      while (d < lex.text.size() && std::isdigit(static_cast<unsigned char>(lex.text[d]))) ++d;
      if (d > q) p = d;
    }
    double value = 0.0;
    auto res = std::from_chars(lex.text.data() + at, lex.text.data() + p, value);
    if (res.ec != std::errc() || res.ptr != lex.text.data() + p)
      throw ParseError("malformed number", at);
    lex.pos = p;
    return make_node({Op::constant, value, 0, 0, nullptr, nullptr});
  }

  NodePtr parse_ident(std::size_t at) {
    std::size_t p = at;
    while (p < lex.text.size() && std::isalnum(static_cast<unsigned char>(lex.text[p]))) ++p;
    std::string word = lex.text.substr(at, p - at);
    lex.pos = p;

    Op fn;
    if (word == "ln") fn = Op::fn_ln;
    else if (word == "sqrt") fn = Op::fn_sqrt;
    else if (word == "exp") fn = Op::fn_exp;
    else if (word == "sin") fn = Op::fn_sin;
    else if (word == "cos") fn = Op::fn_cos;
    else if (word == "abs") fn = Op::fn_abs;
    else {
      if (word.size() >= 2 && word[0] == 'x') {
        bool all_digits = true;
        for (std::size_t i = 1; i < word.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(word[i]))) all_digits = false;
        if (all_digits) {
          int idx = 0;
          std::from_chars(word.data() + 1, word.data() + word.size(), idx);
          if (idx < 1 || idx > nvars)
            throw ParseError("variable " + word + " out of range (1.." +
                                 std::to_string(nvars) + ")",
                             at);
          return make_node({Op::variable, 0, idx - 1, 0, nullptr, nullptr});
        }
      }
      throw ParseError("unknown identifier '" + word + "'", at);
    }
    if (!lex.consume('(')) throw ParseError("expected '(' after " + word, lex.pos);
    NodePtr arg = parse_expr();
    if (!lex.consume(')')) throw ParseError("expected ')'", lex.pos);
    return make_node({fn, 0, 0, 0, arg, nullptr});
  }
};

// ---- printing ----

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& n, std::string& out) {
  bool atom = n.op == Op::constant || n.op == Op::variable || n.op == Op::fn_ln ||
              n.op == Op::fn_sqrt || n.op == Op::fn_exp || n.op == Op::fn_sin ||
              n.op == Op::fn_cos || n.op == Op::fn_abs;
  if (atom) {
    print_node(n, out);
  } else {
    out += '(';
    print_node(n, out);
    out += ')';
  }
}

void print_node(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case Op::constant:
      out += repr_shortest(n.constant);
      return;
    case Op::variable:
      out += 'x';
      out += std::to_string(n.var_index + 1);
      return;
    case Op::add:
    case Op::sub:
      print_child(*n.lhs, out);
      out += n.op == Op::add ? " + " : " - ";
      print_child(*n.rhs, out);
      return;
    case Op::mul:
    case Op::div:
      print_child(*n.lhs, out);
      out += n.op == Op::mul ? "*" : "/";
      print_child(*n.rhs, out);
      return;
    case Op::neg:
      out += '-';
      print_child(*n.lhs, out);
      return;
    case Op::pow_int:
      print_child(*n.lhs, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    case Op::fn_ln: out += "ln("; break;
    case Op::fn_sqrt: out += "sqrt("; break;
    case Op::fn_exp: out += "exp("; break;
    case Op::fn_sin: out += "sin("; break;
    case Op::fn_cos: out += "cos("; break;
    case Op::fn_abs: out += "abs("; break;
  }
  print_node(*n.lhs, out);
  out += ')';
}

std::string node_text(const ExprNode& n) {
  std::string s;
  print_node(n, s);
  return s;
}

// ---- evaluation ----

// Scalar evaluation and dual (value + gradient) evaluation share one walker;
// Plain = double carries no derivative work.
struct Dual {
  double v;
  Vec d;
};

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

inline double make_zero(double, int) { return 0.0; }
inline Dual make_zero(const Dual&, int n) { return Dual{0.0, Vec(n, 0.0)}; }

template <class T>
T eval_node(const ExprNode& n, const Vec& x, int nvars);

template <class T>
T eval_binary(const ExprNode& n, const Vec& x, int nvars) {
  T a = eval_node<T>(*n.lhs, x, nvars);
  T b = eval_node<T>(*n.rhs, x, nvars);
  if constexpr (std::is_same_v<T, double>) {
    switch (n.op) {
      case Op::add: return a + b;
      case Op::sub: return a - b;
      case Op::mul: return a * b;
      default:
        if (b == 0.0) throw DomainError("division by zero", node_text(n));
        return a / b;
    }
  } else {
    Dual r{0.0, Vec(nvars, 0.0)};
    switch (n.op) {
      case Op::add:
        r.v = a.v + b.v;
        for (int i = 0; i < nvars; ++i) r.d[i] = a.d[i] + b.d[i];
        return r;
      case Op::sub:
        r.v = a.v - b.v;
        for (int i = 0; i < nvars; ++i) r.d[i] = a.d[i] - b.d[i];
        return r;
      case Op::mul:
        r.v = a.v * b.v;
        for (int i = 0; i < nvars; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
        return r;
      default:
        if (b.v == 0.0) throw DomainError("division by zero", node_text(n));
        r.v = a.v / b.v;
        for (int i = 0; i < nvars; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
        return r;
    }
  }
}

template <class T>
T eval_node(const ExprNode& n, const Vec& x, int nvars) {
  switch (n.op) {
    case Op::constant:
      if constexpr (std::is_same_v<T, double>) return n.constant;
      else return Dual{n.constant, Vec(nvars, 0.0)};
    case Op::variable:
      if constexpr (std::is_same_v<T, double>) return x[n.var_index];
      else {
        Dual r{x[n.var_index], Vec(nvars, 0.0)};
        r.d[n.var_index] = 1.0;
        return r;
      }
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
      return eval_binary<T>(n, x, nvars);
    case Op::neg: {
      T a = eval_node<T>(*n.lhs, x, nvars);
      if constexpr (std::is_same_v<T, double>) return -a;
      else {
        for (int i = 0; i < nvars; ++i) a.d[i] = -a.d[i];
        a.v = -a.v;
        return a;
      }
    }
    case Op::pow_int: {
      T a = eval_node<T>(*n.lhs, x, nvars);
      int k = n.exponent;
      double v = value_of(a);
      double pv = std::pow(v, k);
      if constexpr (std::is_same_v<T, double>) return pv;
      else {
        Dual r{pv, Vec(nvars, 0.0)};
        if (k != 0) {
          double dv = k * std::pow(v, k - 1);
          for (int i = 0; i < nvars; ++i) r.d[i] = dv * a.d[i];
        }
        return r;
      }
    }
    default: {
      T a = eval_node<T>(*n.lhs, x, nvars);
      double v = value_of(a);
      double fv, dv = 0.0;
      switch (n.op) {
        case Op::fn_ln:
          if (v <= 0.0) throw DomainError("ln of non-positive value", node_text(n));
          fv = std::log(v);
          dv = 1.0 / v;
          break;
        case Op::fn_sqrt:
          if constexpr (std::is_same_v<T, double>) {
            if (v < 0.0) throw DomainError("sqrt of negative value", node_text(n));
          } else {
            if (v <= 0.0)
              throw DomainError("sqrt not differentiable at non-positive value", node_text(n));
          }
          fv = std::sqrt(v);
          if (v > 0.0) dv = 0.5 / fv;
          break;
        case Op::fn_exp:
          fv = std::exp(v);
          dv = fv;
          break;
        case Op::fn_sin:
          fv = std::sin(v);
          dv = std::cos(v);
          break;
        case Op::fn_cos:
          fv = std::cos(v);
          dv = -std::sin(v);
          break;
        default:  // abs
          if constexpr (!std::is_same_v<T, double>) {
            if (v == 0.0) throw DomainError("abs not differentiable at 0", node_text(n));
          }
          fv = std::fabs(v);
          dv = v < 0.0 ? -1.0 : 1.0;
          break;
      }
      if constexpr (std::is_same_v<T, double>) {
        return fv;
      } else {
        Dual r{fv, Vec(nvars, 0.0)};
        for (int i = 0; i < nvars; ++i) r.d[i] = dv * a.d[i];
        return r;
      }
    }
  }
}

bool node_uses_abs(const ExprNode& n) {
  if (n.op == Op::fn_abs) return true;
  if (n.lhs && node_uses_abs(*n.lhs)) return true;
  if (n.rhs && node_uses_abs(*n.rhs)) return true;
  return false;
}

void check_point(const Vec& x, int nvars, const ExprNode& root) {
  if (static_cast<int>(x.size()) != nvars)
    throw DomainError("point has wrong dimension", node_text(root));
  for (double xi : x)
    if (!std::isfinite(xi)) throw DomainError("non-finite point coordinate", node_text(root));
}

}  // namespace

Expression::Expression(std::shared_ptr<const ExprNode> root, int nvars)
    : root_(std::move(root)), nvars_(nvars) {}

Expression Expression::parse(const std::string& text, int nvars) {
  if (nvars < 1) throw ParseError("nvars must be >= 1", 0);
  Parser p{Lexer{text}, nvars};
  NodePtr root = p.parse_expr();
  if (!p.lex.eof()) throw ParseError("trailing input", p.lex.pos);
  return Expression(std::move(root), nvars);
}

double Expression::eval(const Vec& x) const {
  check_point(x, nvars_, *root_);
  double v = eval_node<double>(*root_, x, nvars_);
  if (!std::isfinite(v)) throw DomainError("non-finite value", to_text());
  return v;
}

DualVector Expression::eval_grad(const Vec& x) const {
  check_point(x, nvars_, *root_);
  Dual d = eval_node<Dual>(*root_, x, nvars_);
  if (!std::isfinite(d.v)) throw DomainError("non-finite value", to_text());
  for (double g : d.d)
    if (!std::isfinite(g)) throw DomainError("non-finite partial derivative", to_text());
  return DualVector{d.v, std::move(d.d)};
}

std::string Expression::to_text() const { return node_text(*root_); }

bool Expression::uses_abs() const { return node_uses_abs(*root_); }

double fd_check(const Expression& e, const Vec& x, double h) {
  DualVector ad = e.eval_grad(x);
  double worst = 0.0;
  Vec xp = x, xm = x;
  for (int i = 0; i < e.nvars(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    double fd = (e.eval(xp) - e.eval(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
    double diff = std::fabs(ad.partials[i] - fd);
    if (diff <= 1e-9) continue;
    double rel = diff / std::max(std::fabs(ad.partials[i]), std::fabs(fd));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace moprox
