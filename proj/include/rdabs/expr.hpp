#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "rdabs/geometry.hpp"

namespace rdabs {

// Arithmetic expression AST over variables x1..xn. Nodes are immutable and
// shared; trees are safe to evaluate from any number of threads.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op {
    Constant,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,  // integer exponent only
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Mod1,  // x - floor(x)
    Min,
    Max,
  };

  Op op;
  double value = 0.0;  // Constant
  int var = 0;         // Variable, zero-based
  int exponent = 0;    // Pow
  ExprPtr lhs;
  ExprPtr rhs;
};

// Parses with precedence pow > unary minus > mul/div > add/sub. Variables are
// x1..x<dimension>. Throws ParseError with the byte offset of the failure.
ExprPtr parse_expression(std::string_view text, int dimension);

// Canonical text form; parse(format(e)) reproduces the same AST.
std::string format_expression(const Expr& e);

bool expr_equal(const Expr& a, const Expr& b);

// True when the expression contains mod1, abs, min or max, i.e. its exact
// range may be a union of pieces that the interval semantics hulls over.
bool expr_piecewise(const Expr& e);

double eval_scalar(const Expr& e, std::span<const double> env);
double eval_scalar(const Expr& e, const Vec& env);

// Inclusion-isotone natural interval extension: the result contains
// {e(x) : x in env box}.
Interval eval_interval(const Expr& e, std::span<const Interval> env);

// Forward-mode value + gradient.
struct Dual {
  double v = 0.0;
  Vec g;
};

// Seeds variable `index` (zero-based) of an n-dimensional environment.
Dual dual_variable(double x, int index, int n);

Dual eval_dual(const Expr& e, std::span<const Dual> env);

}  // namespace rdabs
