#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rdabs/errors.hpp"
#include "rdabs/expr.hpp"
#include "rdabs/rng.hpp"

using namespace rdabs;

namespace {

const std::vector<std::string> kAllOpsExprs = {
    "0.9*x1 + 0.1*sin(x2)",
    "2*x2^3 - x2",
    "0.9*x3 + 0.1*x1*x2",
    "mod1(2*x1)",
    "abs(x1 - x2)",
    "min(x1, x2*x3)",
    "max(sin(x1), cos(x2))",
    "exp(-(x1^2)) * cos(3*x2)",
    "log(1 + x1^2 + x3^2)",
    "(x1 + 2) / (x2 + 6)",
    "x1^4 - 2*x1^2 + x2",
    "pow(x3, 2) + x1^-1 * 0.25",
};

// Smooth everywhere on the sampled ranges; safe for finite differences.
const std::vector<std::string> kSmoothExprs = {
    "0.9*x1 + 0.1*sin(x2)",
    "2*x2^3 - x2",
    "0.9*x3 + 0.1*x1*x2",
    "exp(-(x1^2)) * cos(3*x2)",
    "log(1 + x1^2 + x3^2)",
    "(x1 + 2) / (x2 + 6)",
    "x1^4 - 2*x1^2 + x2",
};

double eval_at(const std::string& text, std::vector<double> point) {
  const ExprPtr e = parse_expression(text, static_cast<int>(point.size()));
  return eval_scalar(*e, std::span<const double>(point));
}

}  // namespace

TEST_CASE("parsing and evaluation basics") {
  SUBCASE("sample dynamics component") {
    CHECK(eval_at("0.9*x1 + 0.1*sin(x2)", {1.0, 0.0, 0.0}) == doctest::Approx(0.9).epsilon(1e-15));
  }
  SUBCASE("identity") {
    CHECK(eval_at("x1", {0.375}) == 0.375);
  }
  SUBCASE("malformed input reports a position") {
    CHECK_THROWS_AS(parse_expression("2*x3 +", 3), ParseError);
    try {
      parse_expression("2*x3 +", 3);
    } catch (const ParseError& e) {
      CHECK(e.position == 6);  // end of input
    }
  }
  SUBCASE("unknown identifier") {
    CHECK_THROWS_AS(parse_expression("y1 + 1", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("sinh(x1)", 1), ParseError);
  }
  SUBCASE("variable index out of range") {
    CHECK_THROWS_AS(parse_expression("x4", 3), ParseError);
    CHECK_THROWS_AS(parse_expression("x0", 3), ParseError);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(parse_expression("", 1), ParseError);
  }
  SUBCASE("integer exponents only") {
    CHECK_THROWS_AS(parse_expression("x1^2.5", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("pow(x1, 0.5)", 1), ParseError);
    CHECK(eval_at("x1^-1", {4.0}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(eval_at("pow(x1, 3)", {2.0}) == 8.0);
    CHECK(eval_at("pow(x1, -2)", {2.0}) == 0.25);
  }
  SUBCASE("precedence: pow binds tighter than unary minus") {
    CHECK(eval_at("-x1^2", {3.0}) == -9.0);
    CHECK(eval_at("(-x1)^2", {3.0}) == 9.0);
    CHECK(eval_at("2*x1 + 1", {0.25}) == 1.5);
    CHECK(eval_at("2 - 3 - 4", {0.0}) == -5.0);
    CHECK(eval_at("2 / 4 / 2", {0.0}) == 0.25);
    CHECK(eval_at("-x1 - -x1", {5.0}) == 0.0);
  }
  SUBCASE("mod1 value convention") {
    CHECK(eval_at("mod1(x1)", {1.0}) == 0.0);
    CHECK(eval_at("mod1(x1)", {-0.25}) == 0.75);
    CHECK(eval_at("mod1(2*x1)", {0.3}) == doctest::Approx(0.6).epsilon(1e-15));
  }
  SUBCASE("scalar domain errors") {
    CHECK_THROWS_AS(eval_at("log(x1)", {0.0}), EvalError);
    CHECK_THROWS_AS(eval_at("1/(x1 - 1)", {1.0}), EvalError);
  }
}

TEST_CASE("interval semantics") {
  const auto box1 = [](double lo, double hi) { return std::vector<Interval>{Interval(lo, hi)}; };

  SUBCASE("square on a positive interval is exact") {
    const ExprPtr e = parse_expression("x1*x1", 1);
    const Interval r = eval_interval(*e, box1(0.6, 0.8));
    CHECK(r.lo == doctest::Approx(0.36).epsilon(1e-15));
    CHECK(r.hi == doctest::Approx(0.64).epsilon(1e-15));
  }
  SUBCASE("mod1 hulls over the breakpoint") {
    const ExprPtr e = parse_expression("mod1(2*x1)", 1);
    const Interval inner = eval_interval(*e, box1(0.05, 0.1));
    CHECK(inner.lo == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(inner.hi == doctest::Approx(0.2).epsilon(1e-15));
    const Interval wrapped = eval_interval(*e, box1(0.4, 0.6));
    CHECK(wrapped.lo == 0.0);
    CHECK(wrapped.hi == 1.0);
    CHECK(expr_piecewise(*e));
    CHECK_FALSE(expr_piecewise(*parse_expression("sin(x1) + x1^2", 1)));
  }
  SUBCASE("sin enclosures") {
    const ExprPtr e = parse_expression("sin(x1)", 1);
    const Interval over_peak = eval_interval(*e, box1(0.25 * std::numbers::pi, 0.75 * std::numbers::pi));
    CHECK(over_peak.hi == 1.0);
    CHECK(over_peak.lo == doctest::Approx(std::sin(0.25 * std::numbers::pi)).epsilon(1e-12));
    const Interval wide = eval_interval(*e, box1(0.0, 10.0));
    CHECK(wide.lo == -1.0);
    CHECK(wide.hi == 1.0);
    const Interval monotone = eval_interval(*e, box1(-0.5, 0.5));
    CHECK(monotone.lo == doctest::Approx(std::sin(-0.5)).epsilon(1e-12));
    CHECK(monotone.hi == doctest::Approx(std::sin(0.5)).epsilon(1e-12));
  }
  SUBCASE("cos enclosures") {
    const ExprPtr e = parse_expression("cos(x1)", 1);
    const Interval around_zero = eval_interval(*e, box1(-0.5, 0.5));
    CHECK(around_zero.hi == 1.0);
    const Interval around_pi = eval_interval(*e, box1(2.5, 4.0));
    CHECK(around_pi.lo == -1.0);
  }
  SUBCASE("interval domain errors") {
    CHECK_THROWS_AS(eval_interval(*parse_expression("1/x1", 1), box1(-1.0, 1.0)), EvalError);
    CHECK_THROWS_AS(eval_interval(*parse_expression("log(x1)", 1), box1(0.0, 1.0)), EvalError);
    CHECK_THROWS_AS(eval_interval(*parse_expression("x1^-2", 1), box1(-1.0, 1.0)), EvalError);
  }
  SUBCASE("even powers fold the sign") {
    const Interval r = eval_interval(*parse_expression("x1^2", 1), box1(-2.0, 1.0));
    CHECK(r.lo == 0.0);
    CHECK(r.hi == 4.0);
  }
}

TEST_CASE("interval soundness: scalar evaluations stay inside interval enclosures") {
  // 1e3 random boxes x 1e2 points per box across the expression list.
  SampleRng box_rng(1234, 0);
  long violations = 0;
  long checks = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<Interval> box;
    for (int i = 0; i < 3; ++i) {
      double a = box_rng.next_in(-2.0, 2.0);
      double b = box_rng.next_in(-2.0, 2.0);
      if (a > b) std::swap(a, b);
      box.emplace_back(a, b);
    }
    // Keep divisor and reciprocal arguments away from zero.
    box[0] = Interval(std::max(0.1, box[0].lo + 2.2), std::max(0.2, box[0].hi + 2.2));
    const auto& expr_text = kAllOpsExprs[static_cast<std::size_t>(rep) % kAllOpsExprs.size()];
    const ExprPtr e = parse_expression(expr_text, 3);
    const Interval enclosure = eval_interval(*e, box);
    for (int p = 0; p < 100; ++p) {
      SampleRng point_rng(1234, static_cast<std::uint64_t>(rep) * 1000 + p);
      std::vector<double> point;
      for (const auto& ax : box) point.push_back(point_rng.next_in(ax.lo, ax.hi));
      const double value = eval_scalar(*e, std::span<const double>(point));
      const double tol = 1e-9 * (1.0 + std::abs(enclosure.lo) + std::abs(enclosure.hi));
      ++checks;
      if (value < enclosure.lo - tol || value > enclosure.hi + tol) ++violations;
    }
  }
  CHECK(checks == 100000);
  CHECK(violations == 0);
}

TEST_CASE("dual semantics") {
  SUBCASE("mod1 derivative is 1 almost everywhere") {
    const ExprPtr e = parse_expression("mod1(2*x1)", 1);
    std::vector<Dual> env = {dual_variable(0.3, 0, 1)};
    const Dual r = eval_dual(*e, env);
    CHECK(r.v == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(r.g[0] == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("abs/min/max take the attaining branch, left on ties") {
    std::vector<Dual> env = {dual_variable(0.0, 0, 1)};
    CHECK(eval_dual(*parse_expression("abs(x1)", 1), env).g[0] == -1.0);
    std::vector<Dual> env2 = {dual_variable(1.0, 0, 2), dual_variable(1.0, 1, 2)};
    CHECK(eval_dual(*parse_expression("min(x1, x2)", 2), env2).g[0] == 1.0);
    CHECK(eval_dual(*parse_expression("max(x1, x2)", 2), env2).g[0] == 1.0);
  }
  SUBCASE("finite-difference agreement on smooth expressions") {
    // 1e3 random smooth points; every partial within 1e-6 relative.
    long points_checked = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      SampleRng rng(777, static_cast<std::uint64_t>(rep));
      std::vector<double> x = {rng.next_in(0.3, 2.0), rng.next_in(-2.0, 2.0),
                               rng.next_in(-2.0, 2.0)};
      const auto& text = kSmoothExprs[static_cast<std::size_t>(rep) % kSmoothExprs.size()];
      const ExprPtr e = parse_expression(text, 3);
      std::vector<Dual> env;
      for (int i = 0; i < 3; ++i) env.push_back(dual_variable(x[static_cast<std::size_t>(i)], i, 3));
      const Dual d = eval_dual(*e, env);
      for (int i = 0; i < 3; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[static_cast<std::size_t>(i)]));
        std::vector<double> xp = x, xm = x;
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        const double fd = (eval_scalar(*e, std::span<const double>(xp)) -
                           eval_scalar(*e, std::span<const double>(xm))) /
                          (2.0 * h);
        const double scale = std::max({1e-6, std::abs(fd), std::abs(d.g[i])});
        CHECK(std::abs(d.g[i] - fd) / scale < 1e-6);
      }
      ++points_checked;
    }
    CHECK(points_checked == 1000);
  }
}

TEST_CASE("parse and print round-trip to the same tree") {
  for (const auto& text : kAllOpsExprs) {
    const ExprPtr e = parse_expression(text, 3);
    const std::string printed = format_expression(*e);
    const ExprPtr reparsed = parse_expression(printed, 3);
    CHECK_MESSAGE(expr_equal(*e, *reparsed), "round trip changed: ", text, " -> ", printed);
    CHECK(format_expression(*reparsed) == printed);
  }
  for (const auto& text : {"-x1^2", "-(x1 + 1)", "x1 - (x2 - x3)", "(x1 + x2) * x3",
                           "x1 / (x2 * x3)", "-(-x1)", "2 - -3 * x1", "(x1^2)^3"}) {
    const ExprPtr e = parse_expression(text, 3);
    const ExprPtr reparsed = parse_expression(format_expression(*e), 3);
    CHECK_MESSAGE(expr_equal(*e, *reparsed), "round trip changed: ", text);
  }
}
