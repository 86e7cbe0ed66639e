#include <doctest.h>

#include <cmath>
#include <random>

#include "layerfd/expression.hpp"

using layerfd::Bindings;
using layerfd::EvalError;
using layerfd::Expression;
using layerfd::ParseError;

TEST_CASE("single variable") {
    Expression e = Expression::parse("u");
    CHECK(e.free_vars() == std::set<std::string>{"u"});
    CHECK(e.evaluate({{"u", 3.5}}) == 3.5);
}

TEST_CASE("tree shape of exp(-x) + u^2") {
    Expression e = Expression::parse("exp(-x) + u^2");
    CHECK(e.free_vars() == std::set<std::string>{"x", "u"});
    const auto& root = *e.root();
    REQUIRE(root.kind == layerfd::ExprNode::Kind::Binary);
    CHECK(root.op == '+');
    REQUIRE(root.lhs->kind == layerfd::ExprNode::Kind::Call);
    CHECK(root.lhs->fn == layerfd::Builtin::Exp);
    CHECK(root.lhs->lhs->kind == layerfd::ExprNode::Kind::Unary);
    REQUIRE(root.rhs->kind == layerfd::ExprNode::Kind::Binary);
    CHECK(root.rhs->op == '^');
    CHECK(e.evaluate({{"x", 0.0}, {"u", 2.0}}) == 5.0);
}

TEST_CASE("unbalanced parenthesis reports the offset") {
    try {
        Expression::parse("2*(");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 3);
    }
}

TEST_CASE("identity evaluation") {
    CHECK(Expression::parse("x").evaluate({{"x", 0.25}}) == 0.25);
}

TEST_CASE("domain and binding errors") {
    CHECK_THROWS_AS(Expression::parse("ln(x)").evaluate({{"x", -1.0}}), EvalError);
    CHECK_THROWS_AS(Expression::parse("ln(x)").evaluate({{"x", 0.0}}), EvalError);
    CHECK_THROWS_AS(Expression::parse("1/x").evaluate({{"x", 0.0}}), EvalError);
    CHECK_THROWS_AS(Expression::parse("x^(0-1)").evaluate({{"x", 0.0}}), EvalError);
    CHECK_THROWS_AS(Expression::parse("sqrt(-x)").evaluate({{"x", 1.0}}), EvalError);
    CHECK_THROWS_AS(Expression::parse("exp(x)").evaluate({{"x", 1e9}}), EvalError);
    CHECK_THROWS_AS(Expression::parse("x+u").evaluate({{"x", 1.0}}), EvalError);
}

TEST_CASE("unknown identifiers and functions") {
    CHECK_THROWS_AS(Expression::parse("y + 1"), ParseError);
    CHECK_THROWS_AS(Expression::parse("foo(x)"), ParseError);
    CHECK_THROWS_AS(Expression::parse(""), ParseError);
    CHECK_THROWS_AS(Expression::parse("   "), ParseError);
    CHECK_THROWS_AS(Expression::parse("2 +"), ParseError);
    CHECK_THROWS_AS(Expression::parse("(x"), ParseError);
}

TEST_CASE("numeric literal forms") {
    CHECK(Expression::parse(".5").evaluate({}) == 0.5);
    CHECK(Expression::parse("1e-4").evaluate({}) == 1e-4);
    CHECK(Expression::parse("2.5E2").evaluate({}) == 250.0);
    CHECK_THROWS_AS(Expression::parse("2e"), ParseError);  // 'e' is no identifier
}

TEST_CASE("precedence and associativity") {
    CHECK(Expression::parse("2+3*4").evaluate({}) == 14.0);
    CHECK(Expression::parse("2^3^2").evaluate({}) == 512.0);
    CHECK(Expression::parse("2-3-4").evaluate({}) == -5.0);
    CHECK(Expression::parse("16/4/2").evaluate({}) == 2.0);
    CHECK(Expression::parse("-2^2").evaluate({}) == -4.0);  // ^ binds before unary -
    CHECK(Expression::parse("(-2)^2").evaluate({}) == 4.0);
    CHECK(Expression::parse("2^-1").evaluate({}) == 0.5);
    CHECK(Expression::parse("-x^2").evaluate({{"x", 3.0}}) == -9.0);
}

TEST_CASE("numeric derivative against analytic values") {
    // corpus of smooth expressions at non-degenerate points
    struct Case {
        const char* source;
        const char* var;
        Bindings at;
        double expected;
    };
    const Case cases[] = {
        {"u^2", "u", {{"u", 3.0}}, 6.0},
        {"x", "u", {{"x", 1.0}}, 0.0},
        {"exp(u)", "u", {{"u", 0.0}}, 1.0},
        {"sin(x)", "x", {{"x", 0.7}}, std::cos(0.7)},
        {"cos(u)", "u", {{"u", 1.2}}, -std::sin(1.2)},
        {"x^3", "x", {{"x", 2.0}}, 12.0},
        {"ln(x)", "x", {{"x", 0.5}}, 2.0},
        {"sqrt(x)", "x", {{"x", 4.0}}, 0.25},
        {"exp(-x) + u^2", "x", {{"x", 1.0}, {"u", 2.0}}, -std::exp(-1.0)},
        {"u*sin(u)", "u", {{"u", 0.9}}, std::sin(0.9) + 0.9 * std::cos(0.9)},
    };
    for (const Case& c : cases) {
        CAPTURE(c.source);
        double d = Expression::parse(c.source).derivative_at(c.var, c.at);
        CHECK(std::fabs(d - c.expected) <= 1e-5 * (1.0 + std::fabs(c.expected)));
    }
}

TEST_CASE("derivative of an independent variable is exactly zero") {
    CHECK(Expression::parse("x").derivative_at("u", {{"x", 1.0}}) == 0.0);
    CHECK(Expression::parse("x*x + 1").derivative_at("u", {{"x", 2.0}}) == 0.0);
}

namespace {

// depth-bounded random expression over x and u, avoiding partial
// functions so random bindings always evaluate
std::string random_expression(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 7);
    switch (pick(rng)) {
        case 0: return "x";
        case 1: return "u";
        case 2: {
            std::uniform_real_distribution<double> lit(0.1, 9.9);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", lit(rng));
            return buf;
        }
        case 3: return "(" + random_expression(rng, depth - 1) + "+" + random_expression(rng, depth - 1) + ")";
        case 4: return "(" + random_expression(rng, depth - 1) + "-" + random_expression(rng, depth - 1) + ")";
        case 5: return "(" + random_expression(rng, depth - 1) + "*" + random_expression(rng, depth - 1) + ")";
        case 6: return "sin(" + random_expression(rng, depth - 1) + ")";
        default: return "-" + random_expression(rng, depth - 1);
    }
}

}  // namespace

TEST_CASE("pretty-print round trip evaluates bit-identically") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    const char* fixed[] = {
        "exp(-x) + u^2", "2+3*4", "2^3^2", "-x^2", "x - u - 1", "x/u/2",
        "sin(cos(x))*abs(u - 2)", "sqrt(abs(x)) + ln(2 + u^2)", "2^-x", "-(x + u)",
    };
    auto check_roundtrip = [&](const std::string& source) {
        CAPTURE(source);
        Expression original = Expression::parse(source);
        Expression reparsed = Expression::parse(original.pretty());
        CHECK(reparsed.pretty() == original.pretty());
        for (int i = 0; i < 100; ++i) {
            Bindings b{{"x", value(rng)}, {"u", value(rng)}};
            double lhs, rhs;
            try {
                lhs = original.evaluate(b);
            } catch (const EvalError&) {
                CHECK_THROWS_AS(reparsed.evaluate(b), EvalError);
                continue;
            }
            rhs = reparsed.evaluate(b);
            CHECK(lhs == rhs);  // identical trees, bit-identical arithmetic
        }
    };
    for (const char* s : fixed) check_roundtrip(s);
    for (int i = 0; i < 25; ++i) check_roundtrip(random_expression(rng, 4));
}

TEST_CASE("evaluation is deterministic") {
    Expression e = Expression::parse("exp(-x)*sin(u) + u^2/3");
    Bindings b{{"x", 0.123456}, {"u", -2.71828}};
    double first = e.evaluate(b);
    for (int i = 0; i < 10; ++i) CHECK(e.evaluate(b) == first);
}
