#include "excal/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace excal {

namespace {

NodePtr make_node(ExprNode n) {
  return std::make_shared<const ExprNode>(std::move(n));
}

struct Parser {
  std::string_view src;
  std::size_t pos = 0;
  int dim = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(std::string("expected ") + what, pos);
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      if (accept('+')) {
        lhs = make_node({.kind = NodeKind::Add, .a = lhs, .b = parse_term()});
      } else if (accept('-')) {
        lhs = make_node({.kind = NodeKind::Sub, .a = lhs, .b = parse_term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (true) {
      if (accept('*')) {
        lhs = make_node({.kind = NodeKind::Mul, .a = lhs, .b = parse_unary()});
      } else if (accept('/')) {
        lhs = make_node({.kind = NodeKind::Div, .a = lhs, .b = parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) {
      return make_node({.kind = NodeKind::Neg, .a = parse_unary()});
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (accept('^')) {
      skip_ws();
      bool neg = false;
      if (pos < src.size() && src[pos] == '-') {
        neg = true;
        ++pos;
      }
      std::size_t start = pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      if (pos == start) throw ParseError("expected integer exponent", pos);
      int e = 0;
      std::from_chars(src.data() + start, src.data() + pos, e);
      return make_node({.kind = NodeKind::Pow, .exponent = neg ? -e : e, .a = base});
    }
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos >= src.size()) throw ParseError("unexpected end of input", pos);
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      expect(')', "')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_ident();
    }
    throw ParseError("unexpected character", pos);
  }

  NodePtr parse_number() {
    const char* begin = src.data() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos);
    pos += static_cast<std::size_t>(end - begin);
    return make_node({.kind = NodeKind::Constant, .value = v});
  }

  NodePtr parse_ident() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    std::string_view name = src.substr(start, pos - start);

    if (name.size() >= 2 && name[0] == 'x' &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      int idx = 0;
      auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec == std::errc() && p == name.data() + name.size()) {
        if (idx >= dim)
          throw ParseError("variable index out of range", start);
        return make_node({.kind = NodeKind::Variable, .index = idx});
      }
    }

    Func f;
    if (name == "sin") f = Func::Sin;
    else if (name == "cos") f = Func::Cos;
    else if (name == "exp") f = Func::Exp;
    else if (name == "log") f = Func::Log;
    else if (name == "sqrt") f = Func::Sqrt;
    else if (name == "tanh") f = Func::Tanh;
    else if (name == "pospart") f = Func::PosPart;
    else throw ParseError("unknown identifier '" + std::string(name) + "'", start);

    expect('(', "'(' after function name");
    NodePtr arg = parse_expr();
    expect(')', "')'");
    return make_node({.kind = NodeKind::Call, .fn = f, .a = arg});
  }
};

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Tanh: return "tanh";
    case Func::PosPart: return "pospart";
  }
  return "?";
}

void write_node(std::ostream& os, const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Constant: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.value;
      std::string s = tmp.str();
      if (n.value < 0) os << '(' << s << ')';
      else os << s;
      return;
    }
    case NodeKind::Variable: os << 'x' << n.index; return;
    case NodeKind::Add:
      os << '(';
      write_node(os, *n.a);
      os << '+';
      write_node(os, *n.b);
      os << ')';
      return;
    case NodeKind::Sub:
      os << '(';
      write_node(os, *n.a);
      os << '-';
      write_node(os, *n.b);
      os << ')';
      return;
    case NodeKind::Mul:
      os << '(';
      write_node(os, *n.a);
      os << '*';
      write_node(os, *n.b);
      os << ')';
      return;
    case NodeKind::Div:
      os << '(';
      write_node(os, *n.a);
      os << '/';
      write_node(os, *n.b);
      os << ')';
      return;
    case NodeKind::Neg:
      os << "(-";
      write_node(os, *n.a);
      os << ')';
      return;
    case NodeKind::Pow:
      os << '(';
      write_node(os, *n.a);
      os << '^';
      if (n.exponent < 0) os << '-' << -n.exponent;
      else os << n.exponent;
      os << ')';
      return;
    case NodeKind::Call:
      os << func_name(n.fn) << '(';
      write_node(os, *n.a);
      os << ')';
      return;
    case NodeKind::Deriv:
      os << "D" << n.index << "[";
      write_node(os, *n.a);
      os << ']';
      return;
    case NodeKind::Compose:
      os << "subst[";
      write_node(os, *n.a);
      os << "](";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) os << ',';
        write_node(os, *n.args[i]);
      }
      os << ')';
      return;
  }
}

bool node_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant: return a.value == b.value;
    case NodeKind::Variable: return a.index == b.index;
    case NodeKind::Pow: return a.exponent == b.exponent && node_equal(*a.a, *b.a);
    case NodeKind::Call: return a.fn == b.fn && node_equal(*a.a, *b.a);
    case NodeKind::Neg: return node_equal(*a.a, *b.a);
    case NodeKind::Deriv: return a.index == b.index && node_equal(*a.a, *b.a);
    case NodeKind::Compose: {
      if (a.args.size() != b.args.size() || !node_equal(*a.a, *b.a)) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!node_equal(*a.args[i], *b.args[i])) return false;
      return true;
    }
    default: return node_equal(*a.a, *b.a) && node_equal(*a.b, *b.b);
  }
}

}  // namespace

Expression Expression::parse(std::string_view source, int dimension) {
  if (dimension <= 0) throw ParseError("dimension must be positive", 0);
  if (source.empty()) throw ParseError("empty expression", 0);
  Parser p{source, 0, dimension};
  NodePtr root = p.parse_expr();
  if (!p.at_end()) throw ParseError("trailing input", p.pos);
  return Expression(std::move(root), dimension, std::string(source));
}

Expression Expression::constant(double c, int dimension) {
  return Expression(make_node({.kind = NodeKind::Constant, .value = c}), dimension);
}

Expression Expression::variable(int i, int dimension) {
  if (i < 0 || i >= dimension) throw ParseError("variable index out of range", 0);
  return Expression(make_node({.kind = NodeKind::Variable, .index = i}), dimension);
}

double Expression::eval(std::span<const double> p) const { return eval_t<double>(p); }

std::pair<double, std::vector<double>> Expression::eval_grad(
    std::span<const double> p) const {
  std::vector<Jet1> xs;
  xs.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<double> seed(p.size(), 0.0);
    seed[i] = 1.0;
    xs.emplace_back(p[i], std::move(seed));
  }
  Jet1 r = eval_t<Jet1>(xs);
  std::vector<double> grad = std::move(r.d);
  grad.resize(p.size(), 0.0);
  return {r.v, std::move(grad)};
}

Expression Expression::derivative(int i) const {
  if (i < 0 || i >= dim_) throw EvalError("derivative index out of range");
  return Expression(make_node({.kind = NodeKind::Deriv, .index = i, .a = root_}), dim_);
}

Expression Expression::compose(std::vector<Expression> args) const {
  if (static_cast<int>(args.size()) != dim_)
    throw EvalError("compose arity mismatch");
  int outer_dim = args.front().dim_;
  std::vector<NodePtr> roots;
  roots.reserve(args.size());
  for (const auto& a : args) {
    if (a.dim_ != outer_dim) throw EvalError("compose argument dimension mismatch");
    roots.push_back(a.root_);
  }
  return Expression(
      make_node({.kind = NodeKind::Compose, .a = root_, .args = std::move(roots)}),
      outer_dim);
}

Expression Expression::pow_int(int e) const {
  return Expression(make_node({.kind = NodeKind::Pow, .exponent = e, .a = root_}), dim_);
}

Expression Expression::apply(Func f) const {
  return Expression(make_node({.kind = NodeKind::Call, .fn = f, .a = root_}), dim_);
}

std::string Expression::serialize() const {
  std::ostringstream os;
  if (root_) write_node(os, *root_);
  return os.str();
}

bool Expression::same_ast(const Expression& other) const {
  if (!root_ || !other.root_) return root_ == other.root_;
  return dim_ == other.dim_ && node_equal(*root_, *other.root_);
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(make_node({.kind = NodeKind::Add, .a = a.root_, .b = b.root_}), a.dim_);
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(make_node({.kind = NodeKind::Sub, .a = a.root_, .b = b.root_}), a.dim_);
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(make_node({.kind = NodeKind::Mul, .a = a.root_, .b = b.root_}), a.dim_);
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(make_node({.kind = NodeKind::Div, .a = a.root_, .b = b.root_}), a.dim_);
}
Expression operator-(const Expression& a) {
  return Expression(make_node({.kind = NodeKind::Neg, .a = a.root_}), a.dim_);
}

}  // namespace excal
