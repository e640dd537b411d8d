#include "vfcal/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <variant>
#include <vector>

namespace vfcal {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

namespace {
// Offsets are reported 1-based: the column of the offending character, or
// length + 1 at end of input.
std::size_t column(std::size_t pos) { return pos + 1; }
}  // namespace

enum class Var { X, Y, R2 };
enum class Func { Exp, Log, Sqrt, Sin, Cos };
enum class BinOp { Add, Sub, Mul, Div, Pow };

struct Expression::Node {
  struct Unary {
    Func func;
    std::shared_ptr<const Node> arg;
  };
  struct Negate {
    std::shared_ptr<const Node> arg;
  };
  struct Binary {
    BinOp op;
    std::shared_ptr<const Node> lhs, rhs;
  };
  std::variant<double, Var, Unary, Negate, Binary> v;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(auto value) { return std::make_shared<const Node>(Node{std::move(value)}); }

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(ParseError::Kind::Syntax, column(pos_), "syntax error: " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Binary{BinOp::Add, lhs, term()});
      } else if (accept('-')) {
        lhs = make(Node::Binary{BinOp::Sub, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Binary{BinOp::Mul, lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Node::Binary{BinOp::Div, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Negate{unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Binary{BinOp::Pow, base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return make(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = s_.substr(start, pos_ - start);
    if (name == "x") return make(Var::X);
    if (name == "y") return make(Var::Y);
    if (name == "r2") return make(Var::R2);
    if (name == "pi") return make(std::numbers::pi);

    static constexpr std::pair<std::string_view, Func> kFuncs[] = {
        {"exp", Func::Exp}, {"log", Func::Log}, {"sqrt", Func::Sqrt},
        {"sin", Func::Sin}, {"cos", Func::Cos}};
    for (const auto& [fname, func] : kFuncs) {
      if (name == fname) {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(Node::Unary{func, arg});
      }
    }
    throw ParseError(ParseError::Kind::UnknownIdentifier, column(start),
                     "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, double x, double y) {
  struct Visitor {
    double x, y;
    double operator()(double c) const { return c; }
    double operator()(Var v) const {
      switch (v) {
        case Var::X: return x;
        case Var::Y: return y;
        case Var::R2: return x * x + y * y;
      }
      return 0.0;
    }
    double operator()(const Node::Unary& u) const {
      const double a = eval(*u.arg, x, y);
      switch (u.func) {
        case Func::Exp: return std::exp(a);
        case Func::Log: return std::log(a);
        case Func::Sqrt: return std::sqrt(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
      }
      return 0.0;
    }
    double operator()(const Node::Negate& u) const { return -eval(*u.arg, x, y); }
    double operator()(const Node::Binary& b) const {
      const double l = eval(*b.lhs, x, y);
      const double r = eval(*b.rhs, x, y);
      switch (b.op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div: return l / r;
        case BinOp::Pow: return std::pow(l, r);
      }
      return 0.0;
    }
  };
  return std::visit(Visitor{x, y}, n.v);
}

bool constant(const Node& n) {
  struct Visitor {
    bool operator()(double) const { return true; }
    bool operator()(Var) const { return false; }
    bool operator()(const Node::Unary& u) const { return constant(*u.arg); }
    bool operator()(const Node::Negate& u) const { return constant(*u.arg); }
    bool operator()(const Node::Binary& b) const { return constant(*b.lhs) && constant(*b.rhs); }
  };
  return std::visit(Visitor{}, n.v);
}

}  // namespace

Expression::Expression(std::string text, std::shared_ptr<const Node> root)
    : text_(std::move(text)), root_(std::move(root)) {}

Expression Expression::parse(std::string_view text) {
  Parser p(text);
  NodePtr root = p.run();
  return Expression(std::string(text), std::move(root));
}

double Expression::evaluate(double x, double y) const { return eval(*root_, x, y); }

bool Expression::is_constant() const { return constant(*root_); }

}  // namespace vfcal
