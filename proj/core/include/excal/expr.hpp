#pragma once

// Scalar expressions in chart coordinates x0..x(n-1). Parsed once,
// immutable afterwards; evaluation is pure. First (and, where operators
// stack, higher) derivatives are exact via jet evaluation.
//
// Grammar (EBNF):
//   expr    = term , { ("+" | "-") , term } ;
//   term    = unary , { ("*" | "/") , unary } ;
//   unary   = "-" , unary | power ;
//   power   = atom , [ "^" , [ "-" ] , digits ] ;
//   atom    = number | variable | function , "(" , expr , ")"
//           | "(" , expr , ")" ;
//   variable = "x" , digits ;
//   function = "sin" | "cos" | "exp" | "log" | "sqrt" | "tanh" | "pospart" ;
//
// "pospart" is max(x, 0); squaring it gives the C^1 bump profiles used
// by compactly supported test forms.

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "excal/jet.hpp"

namespace excal {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::size_t offset;
};

enum class NodeKind {
  Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Call, Deriv, Compose
};

enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh, PosPart };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind{};
  double value = 0.0;        // Constant
  int index = 0;             // Variable / Deriv direction
  Func fn = Func::Sin;       // Call
  int exponent = 0;          // Pow
  NodePtr a, b;              // children
  std::vector<NodePtr> args; // Compose arguments
};

class Expression {
public:
  Expression() = default;

  static Expression parse(std::string_view source, int dimension);
  static Expression constant(double c, int dimension);
  static Expression variable(int i, int dimension);

  bool valid() const { return root_ != nullptr; }
  int dimension() const { return dim_; }
  const std::string& source() const { return source_; }

  double eval(std::span<const double> p) const;
  std::pair<double, std::vector<double>> eval_grad(std::span<const double> p) const;

  /// Exact partial derivative as a new expression (jet-evaluated, not
  /// symbolic and not a finite difference).
  Expression derivative(int i) const;

  /// Substitution: this expression (over args.size() variables) evaluated
  /// at the given argument expressions. Chain rule is automatic because
  /// jets flow through the substituted arguments.
  Expression compose(std::vector<Expression> args) const;

  Expression pow_int(int e) const;
  Expression apply(Func f) const;

  std::string serialize() const;
  bool same_ast(const Expression& other) const;

  template <class T>
  T eval_t(std::span<const T> xs) const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

private:
  Expression(NodePtr root, int dim, std::string source = {})
      : root_(std::move(root)), dim_(dim), source_(std::move(source)) {}

  NodePtr root_;
  int dim_ = 0;
  std::string source_;
};

namespace detail {
template <class T>
T eval_node(const ExprNode& n, std::span<const T> xs);
}

template <class T>
T Expression::eval_t(std::span<const T> xs) const {
  if (!root_) throw EvalError("evaluating empty expression");
  if (static_cast<int>(xs.size()) != dim_)
    throw EvalError("point dimension mismatch");
  return detail::eval_node<T>(*root_, xs);
}

namespace detail {

template <class T>
T eval_node(const ExprNode& n, std::span<const T> xs) {
  switch (n.kind) {
    case NodeKind::Constant: return T{n.value};
    case NodeKind::Variable: return xs[static_cast<std::size_t>(n.index)];
    case NodeKind::Add: return eval_node<T>(*n.a, xs) + eval_node<T>(*n.b, xs);
    case NodeKind::Sub: return eval_node<T>(*n.a, xs) - eval_node<T>(*n.b, xs);
    case NodeKind::Mul: return eval_node<T>(*n.a, xs) * eval_node<T>(*n.b, xs);
    case NodeKind::Div: {
      T denom = eval_node<T>(*n.b, xs);
      if (primal(denom) == 0.0) throw EvalError("division by zero");
      return eval_node<T>(*n.a, xs) / denom;
    }
    case NodeKind::Neg: return -eval_node<T>(*n.a, xs);
    case NodeKind::Pow: return j_ipow(eval_node<T>(*n.a, xs), n.exponent);
    case NodeKind::Call: {
      T x = eval_node<T>(*n.a, xs);
      switch (n.fn) {
        case Func::Sin: return j_sin(x);
        case Func::Cos: return j_cos(x);
        case Func::Exp: return j_exp(x);
        case Func::Log: return j_log(x);
        case Func::Sqrt: return j_sqrt(x);
        case Func::Tanh: return j_tanh(x);
        case Func::PosPart: return j_pospart(x);
      }
      throw EvalError("unknown function");
    }
    case NodeKind::Deriv: {
      if constexpr (jet_depth<T> + 1 > kMaxJetDepth) {
        throw EvalError("derivative nesting exceeds supported depth");
      } else {
        std::vector<Jet<T>> ys;
        ys.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
          Jet<T> j(xs[i]);
          if (static_cast<int>(i) == n.index) j.d = {T{1.0}};
          ys.push_back(std::move(j));
        }
        Jet<T> r = eval_node<Jet<T>>(*n.a, ys);
        return r.d.empty() ? T{} : r.d[0];
      }
    }
    case NodeKind::Compose: {
      std::vector<T> ys;
      ys.reserve(n.args.size());
      for (const auto& arg : n.args) ys.push_back(eval_node<T>(*arg, xs));
      return eval_node<T>(*n.a, ys);
    }
  }
  throw EvalError("corrupt expression node");
}

}  // namespace detail

}  // namespace excal
