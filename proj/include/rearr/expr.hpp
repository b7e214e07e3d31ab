#pragma once

// Mini expression language for weights a(x, v), integrands F(v, p) and test
// functions u(x).
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?          (right-associative; -2^2 == -(2^2))
//   atom    := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//
// Variables: x, v, p. Functions: abs exp log sqrt cos sin (one argument),
// min max (two or more arguments). No implicit multiplication.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rearr/errors.hpp"

namespace rearr {

enum class Variable { X, V, P };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Abs, Min, Max, Exp, Log, Sqrt, Cos, Sin };

inline std::string_view function_name(Function f) {
  switch (f) {
    case Function::Abs: return "abs";
    case Function::Min: return "min";
    case Function::Max: return "max";
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sqrt: return "sqrt";
    case Function::Cos: return "cos";
    case Function::Sin: return "sin";
  }
  return "?";
}

inline char variable_name(Variable v) {
  switch (v) {
    case Variable::X: return 'x';
    case Variable::V: return 'v';
    case Variable::P: return 'p';
  }
  return '?';
}

struct ExprNode {
  enum class Kind { Number, Var, Neg, Binary, Call };

  Kind kind = Kind::Number;
  double number = 0.0;
  Variable var = Variable::X;
  BinaryOp op = BinaryOp::Add;
  Function fn = Function::Abs;
  std::vector<std::shared_ptr<const ExprNode>> children;
};

using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct Bindings {
  std::optional<double> x;
  std::optional<double> v;
  std::optional<double> p;
};

/// Parsed expression tree. Immutable; copies share the tree.
class Expr {
 public:
  explicit Expr(ExprNodePtr root, std::string source = {})
      : root_(std::move(root)), source_(std::move(source)) {}

  const ExprNode& root() const { return *root_; }
  const std::string& source() const { return source_; }

  bool uses(Variable var) const { return uses(*root_, var); }

  double eval(const Bindings& b) const { return eval(*root_, b); }

  double operator()(double x, double v, double p) const { return eval(Bindings{x, v, p}); }

  /// Fully parenthesised canonical text; parsing it yields an identical tree.
  std::string print() const { return print(*root_); }

  friend bool operator==(const Expr& a, const Expr& b) { return same_tree(*a.root_, *b.root_); }

  static bool same_tree(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
    switch (a.kind) {
      case ExprNode::Kind::Number:
        if (a.number != b.number) return false;
        break;
      case ExprNode::Kind::Var:
        if (a.var != b.var) return false;
        break;
      case ExprNode::Kind::Binary:
        if (a.op != b.op) return false;
        break;
      case ExprNode::Kind::Call:
        if (a.fn != b.fn) return false;
        break;
      case ExprNode::Kind::Neg:
        break;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
      if (!same_tree(*a.children[i], *b.children[i])) return false;
    }
    return true;
  }

 private:
  static bool uses(const ExprNode& n, Variable var) {
    if (n.kind == ExprNode::Kind::Var) return n.var == var;
    for (const auto& c : n.children) {
      if (uses(*c, var)) return true;
    }
    return false;
  }

  static double eval(const ExprNode& n, const Bindings& b) {
    switch (n.kind) {
      case ExprNode::Kind::Number:
        return n.number;
      case ExprNode::Kind::Var: {
        const std::optional<double>& slot = n.var == Variable::X ? b.x : n.var == Variable::V ? b.v : b.p;
        if (!slot) {
          throw Error(ErrorCode::UnboundVariable,
                      std::string("variable '") + variable_name(n.var) + "' is not bound");
        }
        return *slot;
      }
      case ExprNode::Kind::Neg:
        return -eval(*n.children[0], b);
      case ExprNode::Kind::Binary:
        return eval_binary(n, b);
      case ExprNode::Kind::Call:
        return eval_call(n, b);
    }
    return 0.0;
  }

  static double eval_binary(const ExprNode& n, const Bindings& b) {
    const double l = eval(*n.children[0], b);
    const double r = eval(*n.children[1], b);
    switch (n.op) {
      case BinaryOp::Add: return l + r;
      case BinaryOp::Sub: return l - r;
      case BinaryOp::Mul: return l * r;
      case BinaryOp::Div:
        if (r == 0.0) throw Error(ErrorCode::DomainError, "division by zero");
        return l / r;
      case BinaryOp::Pow: {
        if (l == 0.0 && r < 0.0) throw Error(ErrorCode::DomainError, "0 raised to a negative power");
        if (l < 0.0) {
          const ExprNode& e = *n.children[1];
          const bool literal = e.kind == ExprNode::Kind::Number ||
                               (e.kind == ExprNode::Kind::Neg && e.children[0]->kind == ExprNode::Kind::Number);
          if (!literal || std::trunc(r) != r) {
            throw Error(ErrorCode::DomainError, "negative base needs an integer literal exponent");
          }
        }
        return std::pow(l, r);
      }
    }
    return 0.0;
  }

  static double eval_call(const ExprNode& n, const Bindings& b) {
    const double a0 = eval(*n.children[0], b);
    switch (n.fn) {
      case Function::Abs: return std::abs(a0);
      case Function::Exp: return std::exp(a0);
      case Function::Log:
        if (!(a0 > 0.0)) throw Error(ErrorCode::DomainError, "log of a nonpositive number");
        return std::log(a0);
      case Function::Sqrt:
        if (a0 < 0.0) throw Error(ErrorCode::DomainError, "sqrt of a negative number");
        return std::sqrt(a0);
      case Function::Cos: return std::cos(a0);
      case Function::Sin: return std::sin(a0);
      case Function::Min:
      case Function::Max: {
        double acc = a0;
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          const double c = eval(*n.children[i], b);
          acc = n.fn == Function::Min ? std::min(acc, c) : std::max(acc, c);
        }
        return acc;
      }
    }
    return 0.0;
  }

  static std::string print(const ExprNode& n) {
    switch (n.kind) {
      case ExprNode::Kind::Number: {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, n.number);
        return std::string(buf, end);
      }
      case ExprNode::Kind::Var:
        return std::string(1, variable_name(n.var));
      case ExprNode::Kind::Neg:
        return "(-" + print(*n.children[0]) + ")";
      case ExprNode::Kind::Binary: {
        static constexpr const char* kOps[] = {" + ", " - ", " * ", " / ", " ^ "};
        return "(" + print(*n.children[0]) + kOps[static_cast<int>(n.op)] + print(*n.children[1]) + ")";
      }
      case ExprNode::Kind::Call: {
        std::string s(function_name(n.fn));
        s += "(";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) s += ", ";
          s += print(*n.children[i]);
        }
        return s + ")";
      }
    }
    return {};
  }

  ExprNodePtr root_;
  std::string source_;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  ExprNodePtr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "empty expression");
    auto e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) {
      throw SyntaxError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  static ExprNodePtr make_binary(BinaryOp op, ExprNodePtr l, ExprNodePtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->children = {std::move(l), std::move(r)};
    return n;
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  ExprNodePtr parse_expr() {
    auto lhs = parse_term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = make_binary(BinaryOp::Add, lhs, parse_term());
      } else if (peek('-')) {
        ++pos_;
        lhs = make_binary(BinaryOp::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprNodePtr parse_term() {
    auto lhs = parse_unary();
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = make_binary(BinaryOp::Mul, lhs, parse_unary());
      } else if (peek('/')) {
        ++pos_;
        lhs = make_binary(BinaryOp::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprNodePtr parse_unary() {
    if (peek('-')) {
      ++pos_;
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Neg;
      n->children = {parse_unary()};
      return n;
    }
    return parse_power();
  }

  ExprNodePtr parse_power() {
    auto base = parse_atom();
    if (peek('^')) {
      ++pos_;
      return make_binary(BinaryOp::Pow, base, parse_unary());
    }
    return base;
  }

  ExprNodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parse_expr();
      if (!peek(')')) throw SyntaxError(pos_, "expected ')'");
      ++pos_;
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
  }

  ExprNodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ((text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && text_[q] >= '0' && text_[q] <= '9') {
        pos_ = q;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw SyntaxError(start, "malformed number");
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Number;
    n->number = value;
    return n;
  }

  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  ExprNodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (peek('(')) {
      const auto fn = lookup_function(name);
      if (!fn) throw Error(ErrorCode::UnknownIdentifier, "unknown function '" + std::string(name) + "'");
      ++pos_;
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Call;
      n->fn = *fn;
      n->children.push_back(parse_expr());
      while (peek(',')) {
        ++pos_;
        n->children.push_back(parse_expr());
      }
      if (!peek(')')) throw SyntaxError(pos_, "expected ')' or ','");
      ++pos_;
      const bool variadic = *fn == Function::Min || *fn == Function::Max;
      if (variadic ? n->children.size() < 2 : n->children.size() != 1) {
        throw Error(ErrorCode::ArityError, std::string(name) + (variadic ? " takes at least two arguments"
                                                                           : " takes exactly one argument"));
      }
      return n;
    }

    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Var;
    if (name == "x") {
      n->var = Variable::X;
    } else if (name == "v") {
      n->var = Variable::V;
    } else if (name == "p") {
      n->var = Variable::P;
    } else {
      throw Error(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'");
    }
    return n;
  }

  static std::optional<Function> lookup_function(std::string_view name) {
    for (Function f : {Function::Abs, Function::Min, Function::Max, Function::Exp, Function::Log, Function::Sqrt,
                       Function::Cos, Function::Sin}) {
      if (function_name(f) == name) return f;
    }
    return std::nullopt;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(std::string_view text) {
  return Expr(detail::ExprParser(text).parse(), std::string(text));
}

inline double eval_expr(const Expr& e, const Bindings& b) { return e.eval(b); }

}  // namespace rearr
