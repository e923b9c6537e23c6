#include "rdabs/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "rdabs/errors.hpp"

namespace rdabs {

namespace {

ExprPtr node(Expr::Op op, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr constant(double v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Constant;
  e->value = v;
  return e;
}

ExprPtr variable(int index) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Variable;
  e->var = index;
  return e;
}

ExprPtr power(ExprPtr base, int exponent) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Pow;
  e->exponent = exponent;
  e->lhs = std::move(base);
  return e;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
  Kind kind = Kind::End;
  double number = 0.0;
  std::string_view text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    current_ = Token{};
    current_.pos = pos_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::Kind::End;
      return;
    }
    const char c = text_[pos_];
    switch (c) {
      case '+': current_.kind = Token::Kind::Plus; ++pos_; return;
      case '-': current_.kind = Token::Kind::Minus; ++pos_; return;
      case '*': current_.kind = Token::Kind::Star; ++pos_; return;
      case '/': current_.kind = Token::Kind::Slash; ++pos_; return;
      case '^': current_.kind = Token::Kind::Caret; ++pos_; return;
      case '(': current_.kind = Token::Kind::LParen; ++pos_; return;
      case ')': current_.kind = Token::Kind::RParen; ++pos_; return;
      case ',': current_.kind = Token::Kind::Comma; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) {
        ++end;
      }
      if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
        std::size_t exp = end + 1;
        if (exp < text_.size() && (text_[exp] == '+' || text_[exp] == '-')) ++exp;
        if (exp < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp]))) {
          end = exp;
          while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
        }
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + end, v);
      if (ec != std::errc{} || ptr != text_.data() + end) {
        throw ParseError("malformed number", pos_);
      }
      current_.kind = Token::Kind::Number;
      current_.number = v;
      current_.text = text_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                    text_[end] == '_')) {
        ++end;
      }
      current_.kind = Token::Kind::Ident;
      current_.text = text_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_;
};

class Parser {
 public:
  Parser(std::string_view text, int dimension) : lexer_(text), dimension_(dimension) {}

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    if (lexer_.peek().kind != Token::Kind::End) {
      throw ParseError("unexpected trailing input", lexer_.peek().pos);
    }
    return e;
  }

 private:
  ExprPtr parse_sum() {
    ExprPtr e = parse_product();
    while (true) {
      const auto kind = lexer_.peek().kind;
      if (kind == Token::Kind::Plus) {
        lexer_.take();
        e = node(Expr::Op::Add, e, parse_product());
      } else if (kind == Token::Kind::Minus) {
        lexer_.take();
        e = node(Expr::Op::Sub, e, parse_product());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_product() {
    ExprPtr e = parse_unary();
    while (true) {
      const auto kind = lexer_.peek().kind;
      if (kind == Token::Kind::Star) {
        lexer_.take();
        e = node(Expr::Op::Mul, e, parse_unary());
      } else if (kind == Token::Kind::Slash) {
        lexer_.take();
        e = node(Expr::Op::Div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_unary() {
    if (lexer_.peek().kind == Token::Kind::Minus) {
      lexer_.take();
      return node(Expr::Op::Neg, parse_unary());
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    while (lexer_.peek().kind == Token::Kind::Caret) {
      lexer_.take();
      base = power(base, parse_integer_exponent());
    }
    return base;
  }

  int parse_integer_exponent() {
    bool negative = false;
    if (lexer_.peek().kind == Token::Kind::Minus) {
      lexer_.take();
      negative = true;
    }
    const Token t = lexer_.peek();
    if (t.kind != Token::Kind::Number) {
      throw ParseError("integer exponent expected", t.pos);
    }
    lexer_.take();
    const double v = t.number;
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw ParseError("integer exponent required", t.pos);
    }
    const int k = static_cast<int>(v);
    return negative ? -k : k;
  }

  ExprPtr parse_atom() {
    const Token t = lexer_.peek();
    switch (t.kind) {
      case Token::Kind::Number:
        lexer_.take();
        return constant(t.number);
      case Token::Kind::LParen: {
        lexer_.take();
        ExprPtr e = parse_sum();
        expect(Token::Kind::RParen, "')' expected");
        return e;
      }
      case Token::Kind::Ident:
        lexer_.take();
        return parse_identifier(t);
      case Token::Kind::End:
        throw ParseError("unexpected end of input", t.pos);
      default:
        throw ParseError("operand expected", t.pos);
    }
  }

  ExprPtr parse_identifier(const Token& t) {
    const std::string_view name = t.text;
    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      int index = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (index < 1 || index > dimension_) {
        throw ParseError("variable index out of range [1, " + std::to_string(dimension_) +
                             "]: " + std::string(name),
                         t.pos);
      }
      return variable(index - 1);
    }
    if (name == "pow") {
      expect(Token::Kind::LParen, "'(' expected");
      ExprPtr base = parse_sum();
      expect(Token::Kind::Comma, "',' expected");
      const int k = parse_integer_exponent();
      expect(Token::Kind::RParen, "')' expected");
      return power(std::move(base), k);
    }
    Expr::Op op;
    int arity = 1;
    if (name == "sin") {
      op = Expr::Op::Sin;
    } else if (name == "cos") {
      op = Expr::Op::Cos;
    } else if (name == "exp") {
      op = Expr::Op::Exp;
    } else if (name == "log") {
      op = Expr::Op::Log;
    } else if (name == "abs") {
      op = Expr::Op::Abs;
    } else if (name == "mod1") {
      op = Expr::Op::Mod1;
    } else if (name == "min") {
      op = Expr::Op::Min;
      arity = 2;
    } else if (name == "max") {
      op = Expr::Op::Max;
      arity = 2;
    } else {
      throw ParseError("unknown identifier '" + std::string(name) + "'", t.pos);
    }
    expect(Token::Kind::LParen, "'(' expected");
    ExprPtr a = parse_sum();
    ExprPtr b;
    if (arity == 2) {
      expect(Token::Kind::Comma, "',' expected");
      b = parse_sum();
    }
    expect(Token::Kind::RParen, "')' expected");
    return node(op, std::move(a), std::move(b));
  }

  void expect(Token::Kind kind, const char* message) {
    if (lexer_.peek().kind != kind) throw ParseError(message, lexer_.peek().pos);
    lexer_.take();
  }

  Lexer lexer_;
  int dimension_;
};

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

int precedence(Expr::Op op) {
  switch (op) {
    case Expr::Op::Add:
    case Expr::Op::Sub: return 1;
    case Expr::Op::Mul:
    case Expr::Op::Div: return 2;
    case Expr::Op::Neg: return 3;
    case Expr::Op::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
  if (precedence(child.op) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.op) {
    case Expr::Op::Constant:
      if (e.value < 0) {
        out += '(';
        out += format_number(e.value);
        out += ')';
      } else {
        out += format_number(e.value);
      }
      return;
    case Expr::Op::Variable:
      out += 'x';
      out += std::to_string(e.var + 1);
      return;
    case Expr::Op::Add:
      print_child(*e.lhs, 1, out);
      out += " + ";
      print_child(*e.rhs, 2, out);
      return;
    case Expr::Op::Sub:
      print_child(*e.lhs, 1, out);
      out += " - ";
      print_child(*e.rhs, 2, out);
      return;
    case Expr::Op::Mul:
      print_child(*e.lhs, 2, out);
      out += " * ";
      print_child(*e.rhs, 3, out);
      return;
    case Expr::Op::Div:
      print_child(*e.lhs, 2, out);
      out += " / ";
      print_child(*e.rhs, 3, out);
      return;
    case Expr::Op::Neg:
      out += '-';
      print_child(*e.lhs, 3, out);
      return;
    case Expr::Op::Pow:
      print_child(*e.lhs, 5, out);
      out += '^';
      if (e.exponent < 0) {
        out += '-';
        out += std::to_string(-static_cast<long>(e.exponent));
      } else {
        out += std::to_string(e.exponent);
      }
      return;
    case Expr::Op::Sin: out += "sin("; break;
    case Expr::Op::Cos: out += "cos("; break;
    case Expr::Op::Exp: out += "exp("; break;
    case Expr::Op::Log: out += "log("; break;
    case Expr::Op::Abs: out += "abs("; break;
    case Expr::Op::Mod1: out += "mod1("; break;
    case Expr::Op::Min: out += "min("; break;
    case Expr::Op::Max: out += "max("; break;
  }
  print(*e.lhs, out);
  if (e.rhs) {
    out += ", ";
    print(*e.rhs, out);
  }
  out += ')';
}

// ---------------------------------------------------------------------------
// Interval function enclosures
// ---------------------------------------------------------------------------

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// True when some point phase + k*period (integer k) lies in [lo, hi].
bool contains_phase(double lo, double hi, double phase, double period) {
  const double k = std::ceil((lo - phase) / period);
  return phase + k * period <= hi;
}

Interval interval_sin(const Interval& x) {
  if (x.width() >= kTwoPi) return Interval(-1.0, 1.0);
  const double slo = std::sin(x.lo);
  const double shi = std::sin(x.hi);
  double lo = std::min(slo, shi);
  double hi = std::max(slo, shi);
  if (contains_phase(x.lo, x.hi, 0.5 * std::numbers::pi, kTwoPi)) hi = 1.0;
  if (contains_phase(x.lo, x.hi, -0.5 * std::numbers::pi, kTwoPi)) lo = -1.0;
  return Interval(lo, hi);
}

Interval interval_cos(const Interval& x) {
  if (x.width() >= kTwoPi) return Interval(-1.0, 1.0);
  const double clo = std::cos(x.lo);
  const double chi = std::cos(x.hi);
  double lo = std::min(clo, chi);
  double hi = std::max(clo, chi);
  if (contains_phase(x.lo, x.hi, 0.0, kTwoPi)) hi = 1.0;
  if (contains_phase(x.lo, x.hi, std::numbers::pi, kTwoPi)) lo = -1.0;
  return Interval(lo, hi);
}

Interval interval_exp(const Interval& x) { return Interval(std::exp(x.lo), std::exp(x.hi)); }

Interval interval_log(const Interval& x) {
  if (x.lo <= 0.0) throw EvalError("log of a non-positive interval");
  return Interval(std::log(x.lo), std::log(x.hi));
}

Interval interval_abs(const Interval& x) {
  if (x.lo >= 0.0) return x;
  if (x.hi <= 0.0) return Interval(-x.hi, -x.lo);
  return Interval(0.0, std::max(-x.lo, x.hi));
}

// Hull of x mod 1; exact when the interval stays within one unit cell.
Interval interval_mod1(const Interval& x) {
  const double flo = std::floor(x.lo);
  if (flo == std::floor(x.hi)) return Interval(x.lo - flo, x.hi - flo);
  return Interval(0.0, 1.0);
}

Interval interval_pow(const Interval& x, int k) {
  if (k == 0) return Interval(1.0, 1.0);
  if (k < 0) {
    if (x.lo <= 0.0 && 0.0 <= x.hi) {
      throw EvalError("negative power of an interval containing zero");
    }
    const Interval p = interval_pow(x, -k);
    return Interval(1.0 / p.hi, 1.0 / p.lo);
  }
  if (k % 2 == 1) return Interval(std::pow(x.lo, k), std::pow(x.hi, k));
  const double alo = std::abs(x.lo);
  const double ahi = std::abs(x.hi);
  const double big = std::pow(std::max(alo, ahi), k);
  if (x.lo <= 0.0 && 0.0 <= x.hi) return Interval(0.0, big);
  return Interval(std::pow(std::min(alo, ahi), k), big);
}

Interval interval_min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}

Interval interval_max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

// ---------------------------------------------------------------------------
// Scalar ops
// ---------------------------------------------------------------------------

double scalar_pow(double x, int k) {
  if (k < 0 && x == 0.0) throw EvalError("negative power of zero");
  return std::pow(x, k);
}

// ---------------------------------------------------------------------------
// Dual ops (forward mode; a.e. derivative conventions for the kinks:
// mod1' = 1, abs/min/max take the attaining branch, left branch on ties)
// ---------------------------------------------------------------------------

Dual dual_const(double v, Eigen::Index n) {
  Dual d;
  d.v = v;
  d.g = Vec::Zero(n);
  return d;
}

Dual dual_add(const Dual& a, const Dual& b) { return {a.v + b.v, a.g + b.g}; }
Dual dual_sub(const Dual& a, const Dual& b) { return {a.v - b.v, a.g - b.g}; }
Dual dual_neg(const Dual& a) { return {-a.v, -a.g}; }
Dual dual_mul(const Dual& a, const Dual& b) { return {a.v * b.v, a.g * b.v + b.g * a.v}; }

Dual dual_div(const Dual& a, const Dual& b) {
  if (b.v == 0.0) throw EvalError("division by zero");
  return {a.v / b.v, (a.g * b.v - b.g * a.v) / (b.v * b.v)};
}

Dual dual_pow(const Dual& a, int k) {
  if (k == 0) return dual_const(1.0, a.g.size());
  if (k < 0 && a.v == 0.0) throw EvalError("negative power of zero");
  const double v = std::pow(a.v, k);
  return {v, static_cast<double>(k) * std::pow(a.v, k - 1) * a.g};
}

Dual dual_sin(const Dual& a) { return {std::sin(a.v), std::cos(a.v) * a.g}; }
Dual dual_cos(const Dual& a) { return {std::cos(a.v), -std::sin(a.v) * a.g}; }
Dual dual_exp(const Dual& a) { return {std::exp(a.v), std::exp(a.v) * a.g}; }

Dual dual_log(const Dual& a) {
  if (a.v <= 0.0) throw EvalError("log of a non-positive value");
  return {std::log(a.v), a.g / a.v};
}

Dual dual_abs(const Dual& a) {
  if (a.v <= 0.0) return {-a.v, -a.g};  // tie at 0 takes the left branch
  return a;
}

Dual dual_mod1(const Dual& a) { return {a.v - std::floor(a.v), a.g}; }

Dual dual_min(const Dual& a, const Dual& b) { return a.v <= b.v ? a : b; }
Dual dual_max(const Dual& a, const Dual& b) { return a.v >= b.v ? a : b; }

}  // namespace

ExprPtr parse_expression(std::string_view text, int dimension) {
  if (text.empty()) throw ParseError("empty expression", 0);
  if (dimension < 1) throw std::invalid_argument("parse_expression: dimension must be >= 1");
  return Parser(text, dimension).parse();
}

std::string format_expression(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Expr::Op::Constant: return a.value == b.value;
    case Expr::Op::Variable: return a.var == b.var;
    case Expr::Op::Pow:
      return a.exponent == b.exponent && expr_equal(*a.lhs, *b.lhs);
    default: break;
  }
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !expr_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !expr_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

bool expr_piecewise(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Abs:
    case Expr::Op::Mod1:
    case Expr::Op::Min:
    case Expr::Op::Max: return true;
    default: break;
  }
  if (e.lhs && expr_piecewise(*e.lhs)) return true;
  if (e.rhs && expr_piecewise(*e.rhs)) return true;
  return false;
}

double eval_scalar(const Expr& e, std::span<const double> env) {
  switch (e.op) {
    case Expr::Op::Constant: return e.value;
    case Expr::Op::Variable: return env[static_cast<std::size_t>(e.var)];
    case Expr::Op::Add: return eval_scalar(*e.lhs, env) + eval_scalar(*e.rhs, env);
    case Expr::Op::Sub: return eval_scalar(*e.lhs, env) - eval_scalar(*e.rhs, env);
    case Expr::Op::Mul: return eval_scalar(*e.lhs, env) * eval_scalar(*e.rhs, env);
    case Expr::Op::Div: {
      const double d = eval_scalar(*e.rhs, env);
      if (d == 0.0) throw EvalError("division by zero");
      return eval_scalar(*e.lhs, env) / d;
    }
    case Expr::Op::Neg: return -eval_scalar(*e.lhs, env);
    case Expr::Op::Pow: return scalar_pow(eval_scalar(*e.lhs, env), e.exponent);
    case Expr::Op::Sin: return std::sin(eval_scalar(*e.lhs, env));
    case Expr::Op::Cos: return std::cos(eval_scalar(*e.lhs, env));
    case Expr::Op::Exp: return std::exp(eval_scalar(*e.lhs, env));
    case Expr::Op::Log: {
      const double x = eval_scalar(*e.lhs, env);
      if (x <= 0.0) throw EvalError("log of a non-positive value");
      return std::log(x);
    }
    case Expr::Op::Abs: return std::abs(eval_scalar(*e.lhs, env));
    case Expr::Op::Mod1: {
      const double x = eval_scalar(*e.lhs, env);
      return x - std::floor(x);
    }
    case Expr::Op::Min: return std::min(eval_scalar(*e.lhs, env), eval_scalar(*e.rhs, env));
    case Expr::Op::Max: return std::max(eval_scalar(*e.lhs, env), eval_scalar(*e.rhs, env));
  }
  throw NumericError("eval_scalar: unreachable");
}

double eval_scalar(const Expr& e, const Vec& env) {
  return eval_scalar(e, std::span<const double>(env.data(), static_cast<std::size_t>(env.size())));
}

Interval eval_interval(const Expr& e, std::span<const Interval> env) {
  switch (e.op) {
    case Expr::Op::Constant: return Interval::point(e.value);
    case Expr::Op::Variable: return env[static_cast<std::size_t>(e.var)];
    case Expr::Op::Add: return eval_interval(*e.lhs, env) + eval_interval(*e.rhs, env);
    case Expr::Op::Sub: return eval_interval(*e.lhs, env) - eval_interval(*e.rhs, env);
    case Expr::Op::Mul: return eval_interval(*e.lhs, env) * eval_interval(*e.rhs, env);
    case Expr::Op::Div: return eval_interval(*e.lhs, env) / eval_interval(*e.rhs, env);
    case Expr::Op::Neg: return -eval_interval(*e.lhs, env);
    case Expr::Op::Pow: return interval_pow(eval_interval(*e.lhs, env), e.exponent);
    case Expr::Op::Sin: return interval_sin(eval_interval(*e.lhs, env));
    case Expr::Op::Cos: return interval_cos(eval_interval(*e.lhs, env));
    case Expr::Op::Exp: return interval_exp(eval_interval(*e.lhs, env));
    case Expr::Op::Log: return interval_log(eval_interval(*e.lhs, env));
    case Expr::Op::Abs: return interval_abs(eval_interval(*e.lhs, env));
    case Expr::Op::Mod1: return interval_mod1(eval_interval(*e.lhs, env));
    case Expr::Op::Min: return interval_min(eval_interval(*e.lhs, env), eval_interval(*e.rhs, env));
    case Expr::Op::Max: return interval_max(eval_interval(*e.lhs, env), eval_interval(*e.rhs, env));
  }
  throw NumericError("eval_interval: unreachable");
}

Dual dual_variable(double x, int index, int n) {
  Dual d;
  d.v = x;
  d.g = Vec::Zero(n);
  d.g[index] = 1.0;
  return d;
}

Dual eval_dual(const Expr& e, std::span<const Dual> env) {
  const Eigen::Index n = env.empty() ? 0 : env[0].g.size();
  switch (e.op) {
    case Expr::Op::Constant: return dual_const(e.value, n);
    case Expr::Op::Variable: return env[static_cast<std::size_t>(e.var)];
    case Expr::Op::Add: return dual_add(eval_dual(*e.lhs, env), eval_dual(*e.rhs, env));
    case Expr::Op::Sub: return dual_sub(eval_dual(*e.lhs, env), eval_dual(*e.rhs, env));
    case Expr::Op::Mul: return dual_mul(eval_dual(*e.lhs, env), eval_dual(*e.rhs, env));
    case Expr::Op::Div: return dual_div(eval_dual(*e.lhs, env), eval_dual(*e.rhs, env));
    case Expr::Op::Neg: return dual_neg(eval_dual(*e.lhs, env));
    case Expr::Op::Pow: return dual_pow(eval_dual(*e.lhs, env), e.exponent);
    case Expr::Op::Sin: return dual_sin(eval_dual(*e.lhs, env));
    case Expr::Op::Cos: return dual_cos(eval_dual(*e.lhs, env));
    case Expr::Op::Exp: return dual_exp(eval_dual(*e.lhs, env));
    case Expr::Op::Log: return dual_log(eval_dual(*e.lhs, env));
    case Expr::Op::Abs: return dual_abs(eval_dual(*e.lhs, env));
    case Expr::Op::Mod1: return dual_mod1(eval_dual(*e.lhs, env));
    case Expr::Op::Min: return dual_min(eval_dual(*e.lhs, env), eval_dual(*e.rhs, env));
    case Expr::Op::Max: return dual_max(eval_dual(*e.lhs, env), eval_dual(*e.rhs, env));
  }
  throw NumericError("eval_dual: unreachable");
}

}  // namespace rdabs
