#include "orps/app/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace orps::app {

struct Expression::Node {
  enum class Kind { number, time, s, y, z, neg, add, sub, mul, div, sin, cos, exp } kind;
  double value = 0.0;
  int index = 0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(const std::string& src, int dim, bool allow_s) : s_(src), dim_(dim), allow_s_(allow_s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ConfigParse, "expression \"" + s_ + "\" column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = make(Kind::add, lhs, term());
      else if (eat('-')) lhs = make(Kind::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make(Kind::mul, lhs, unary());
      else if (eat('/')) lhs = make(Kind::div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::neg, unary());
    if (eat('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.data() + pos_;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::number;
    n->value = v;
    return n;
  }

  NodePtr word() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string w = s_.substr(start, pos_ - start);
    if (w == "t") return make(Kind::time);
    if (w == "s" && allow_s_) return make(Kind::s);
    if (w == "pi") {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::number;
      n->value = std::numbers::pi;
      return n;
    }
    if (w == "sin" || w == "cos" || w == "exp") {
      if (!eat('(')) fail("expected '(' after " + w);
      NodePtr arg = expr();
      if (!eat(')')) fail("expected ')'");
      return make(w == "sin" ? Kind::sin : w == "cos" ? Kind::cos : Kind::exp, arg);
    }
    if ((w[0] == 'y' || w[0] == 'z') && w.size() > 1 &&
        w.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int idx = std::stoi(w.substr(1));
      if (idx < 1 || idx > dim_) {
        pos_ = start;
        fail("component " + w + " outside 1.." + std::to_string(dim_));
      }
      auto n = std::make_shared<Expression::Node>();
      n->kind = w[0] == 'y' ? Kind::y : Kind::z;
      n->index = idx - 1;
      return n;
    }
    pos_ = start;
    fail("unknown name '" + w + "'");
  }

  const std::string& s_;
  int dim_;
  bool allow_s_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, double t, const Vector& y, const Vector& z, double s) {
  switch (n.kind) {
    case Kind::number: return n.value;
    case Kind::time: return t;
    case Kind::s: return s;
    case Kind::y: return y(n.index);
    case Kind::z: return z(n.index);
    case Kind::neg: return -eval(*n.lhs, t, y, z, s);
    case Kind::add: return eval(*n.lhs, t, y, z, s) + eval(*n.rhs, t, y, z, s);
    case Kind::sub: return eval(*n.lhs, t, y, z, s) - eval(*n.rhs, t, y, z, s);
    case Kind::mul: return eval(*n.lhs, t, y, z, s) * eval(*n.rhs, t, y, z, s);
    case Kind::div: return eval(*n.lhs, t, y, z, s) / eval(*n.rhs, t, y, z, s);
    case Kind::sin: return std::sin(eval(*n.lhs, t, y, z, s));
    case Kind::cos: return std::cos(eval(*n.lhs, t, y, z, s));
    case Kind::exp: return std::exp(eval(*n.lhs, t, y, z, s));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& source, int dim, bool allow_s) {
  Expression e;
  e.source_ = source;
  e.root_ = Parser(e.source_, dim, allow_s).parse();
  return e;
}

double Expression::operator()(double t, const Vector& y, const Vector& z, double s) const {
  return eval(*root_, t, y, z, s);
}

}  // namespace orps::app
