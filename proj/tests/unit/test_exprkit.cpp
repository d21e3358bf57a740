#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hidsym/expr.hpp"
#include "hidsym/simplify.hpp"

using namespace hidsym;

namespace {

const std::set<std::string> kCoords{"r", "theta", "x", "t"};

Expr P(const char* s) { return parse(s, kCoords); }

bool same(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

}  // namespace

TEST(Parse, ZeroIsConstant) {
  Expr e = P("0");
  EXPECT_EQ(e.op(), Op::Const);
  EXPECT_TRUE(e.is_zero());
}

TEST(Parse, QuotientOfSum) {
  Expr e = P("(4*m + r)/r");
  ASSERT_EQ(e.op(), Op::Quotient);
  const Expr& num = e.args()[0];
  ASSERT_EQ(num.op(), Op::Sum);
  ASSERT_EQ(num.args().size(), 2u);
  bool has_product = false, has_r = false;
  for (const auto& a : num.args()) {
    if (a.op() == Op::Product) {
      has_product = true;
      ASSERT_EQ(a.args().size(), 2u);
    }
    if (a.op() == Op::Coord && a.name() == "r") has_r = true;
  }
  EXPECT_TRUE(has_product && has_r);
  EXPECT_EQ(e.args()[1].op(), Op::Coord);
  EXPECT_EQ(free_parameters(e), std::set<std::string>{"m"});
  EXPECT_EQ(free_coordinates(e), std::set<std::string>{"r"});
}

TEST(Parse, PowerOfSine) {
  Expr e = P("sin(theta)^2");
  ASSERT_EQ(e.op(), Op::Power);
  EXPECT_EQ(e.args()[0].op(), Op::Sin);
}

TEST(Parse, RoundTripIsStructural) {
  for (const char* s : {"(4*m + r)/r", "sin(theta)^2", "-x*cos(t)/(1 + x^2)", "sqrt(1 + r^2)^(3/2)",
                        "exp(-r)*log(2 + x)", "tan(theta) - 3/7*r"}) {
    Expr e = P(s);
    EXPECT_TRUE(same(e, P(to_string(e).c_str()))) << s;
  }
}

TEST(Parse, RejectsMalformedInput) {
  EXPECT_THROW(P("(r + 1"), ParseError);
  EXPECT_THROW(P("r +* 2"), ParseError);
  EXPECT_THROW(P("foo(r)"), ParseError);
  EXPECT_THROW(P(""), ParseError);
}

TEST(Differentiate, QuotientMatchesClosedForm) {
  Expr d = simplify(differentiate(P("(4*m+r)/r"), "r"));
  EXPECT_TRUE(simplify(d - P("-4*m/r^2")).is_zero()) << to_string(d);
  // Value frozen from a central finite difference at r = 2, m = 1.
  EXPECT_NEAR(evaluate(d, {{"r", 2.0}}, {{"m", 1.0}}), -1.0, 1e-12);
  auto f = [](double r) { return (4.0 + r) / r; };
  double h = 1e-5;
  EXPECT_NEAR((f(2 + h) - f(2 - h)) / (2 * h), -1.0, 1e-8);
}

TEST(Differentiate, SineAndParameter) {
  EXPECT_TRUE(same(differentiate(P("sin(theta)"), "theta"), P("cos(theta)")));
  EXPECT_TRUE(differentiate(P("m"), "r").is_zero());
}

TEST(Differentiate, ChainRuleAgainstFiniteDifference) {
  Expr e = P("sqrt(1 + x^2)*exp(sin(x))/(2 + cos(x))");
  Expr d = differentiate(e, "x");
  for (double x : {-1.3, 0.2, 0.9, 2.4}) {
    double h = 1e-4;
    double fd = (evaluate(e, {{"x", x + h}}, {}) - evaluate(e, {{"x", x - h}}, {})) / (2 * h);
    EXPECT_NEAR(evaluate(d, {{"x", x}}, {}), fd, 1e-7);
  }
}

TEST(Simplify, Identities) {
  EXPECT_TRUE(same(simplify(P("x + 0")), P("x")));
  EXPECT_TRUE(simplify(P("sin(t)^2 + cos(t)^2")).is_one());
  EXPECT_TRUE(simplify(P("(4*m+r)/r - 4*m/r")).is_one());
}

TEST(Simplify, PreservesValues) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.3, 2.5);
  for (const char* s : {"(4*m+r)/r - 4*m/r", "(x^2 - 1)/(x - 1)", "sin(t)^2*r + r*cos(t)^2 + x*(x - r)",
                        "(1 + r)^3 - r^3"}) {
    Expr e = P(s);
    Expr z = simplify(e);
    for (int k = 0; k < 5; ++k) {
      Point p{{"r", u(rng)}, {"x", u(rng) + 1.1}, {"t", u(rng)}, {"theta", u(rng)}};
      ParamEnv env{{"m", u(rng)}};
      double a = evaluate(e, p, env), b = evaluate(z, p, env);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << s;
    }
  }
}

TEST(Evaluate, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(evaluate(P("(4*m+r)/r"), {{"r", 4.0}}, {{"m", 1.0}}), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(P("0*x"), {{"x", 123.0}}, {}), 0.0);
}

TEST(Evaluate, SingularPointRaisesDomainError) {
  EXPECT_THROW(evaluate(P("1/r"), {{"r", 0.0}}, {}), DomainError);
  EXPECT_THROW(evaluate(P("log(r)"), {{"r", -1.0}}, {}), DomainError);
  EXPECT_THROW(evaluate(P("sqrt(r)"), {{"r", -1.0}}, {}), DomainError);
}

TEST(Evaluate, UnboundNames) {
  EXPECT_THROW(evaluate(P("m*r"), {{"r", 1.0}}, {}), UnboundNameError);
  EXPECT_THROW(evaluate(P("r"), {}, {}), UnboundNameError);
}

TEST(Program, MatchesTreeEvaluation) {
  std::vector<Expr> batch{P("(4*m+r)/r"), P("sin(theta)^2*r"), P("sqrt(1 + r^2)*cos(theta)")};
  Program prog(batch, {"r", "theta"}, {{"m", 1.5}});
  std::vector<double> x{1.7, 0.6};
  auto out = prog(x);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(out[i], evaluate(batch[i], {{"r", 1.7}, {"theta", 0.6}}, {{"m", 1.5}}), 1e-14);
}

TEST(Program, SharesSubexpressions) {
  Expr s = P("sin(theta)*cos(theta)");
  std::vector<Expr> batch{s * P("r"), s * P("r^2"), s};
  Program prog(batch, {"r", "theta"}, {});
  EXPECT_LT(prog.instructions(), dag_size(batch[0]) + dag_size(batch[1]) + dag_size(batch[2]));
}

TEST(Substitute, ReplacesCoordinates) {
  Expr e = substitute(P("r^2 + x"), {{"r", P("2*t")}});
  EXPECT_DOUBLE_EQ(evaluate(e, {{"t", 1.5}, {"x", 1.0}}, {}), 10.0);
}
