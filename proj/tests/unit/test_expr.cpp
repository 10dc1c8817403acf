#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "quasiode/error.hpp"
#include "quasiode/expr.hpp"
#include "support/oracles.hpp"

using namespace quasiode;

namespace {

double re(const std::string& src, double x) { return evaluate(parse_expression(src), x).real(); }

// Richardson-extrapolated central difference.
cplx numeric_derivative(const Expr& f, double x) {
    auto central = [&](double h) { return (evaluate(f, x + h) - evaluate(f, x - h)) / (2.0 * h); };
    const double h = 1e-3 * std::max(1.0, std::abs(x));
    const cplx d1 = central(h), d2 = central(h / 2), d3 = central(h / 4);
    const cplx r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    switch (pick(rng)) {
        case 0: return testsupport::num(c(rng));
        case 1: return "x";
        case 2: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
        case 3: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
        case 5: return "sin(" + random_expr(rng, depth - 1) + ")";
        case 6: return "cos(" + random_expr(rng, depth - 1) + ")";
        case 7: return "exp(0.3*" + random_expr(rng, depth - 1) + ")";
        case 8: return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(1 + rng() % 3);
        default: return random_expr(rng, depth - 1) + " / (2 + sin(" + random_expr(rng, depth - 1) + "))";
    }
}

}  // namespace

TEST_SUITE("expr") {
    TEST_CASE("literals and polynomials") {
        const Expr e = parse_expression("0.5");
        CHECK(e->op == ExprOp::Const);
        CHECK(evaluate(e, 123.0) == cplx(0.5));
        CHECK(re("x^2+1", 2.0) == 5.0);
        CHECK(re("1/2", 0.0) == 0.5);
    }

    TEST_CASE("precedence and unary minus") {
        CHECK(re("2*x^2", 3.0) == 18.0);
        CHECK(re("-x^2", 3.0) == -9.0);
        CHECK(re("2^3^1", 0.0) == 8.0);
        CHECK(re("1-2-3", 0.0) == -4.0);
        CHECK(re("12/3/2", 0.0) == 2.0);
        CHECK(re("-(x-1)*2", 0.0) == 2.0);
        CHECK(re("x^-1", 4.0) == 0.25);
    }

    TEST_CASE("imaginary unit") {
        CHECK(evaluate(parse_expression("i"), 0.0) == cplx(0, 1));
        CHECK(evaluate(parse_expression("2i*x"), 3.0) == cplx(0, 6));
        CHECK(evaluate(parse_expression("exp(i*x)"), 0.0) == cplx(1, 0));
        CHECK(parse_complex("1+2i") == cplx(1, 2));
        CHECK(parse_complex("-0.5i") == cplx(0, -0.5));
    }

    TEST_CASE("unknown identifier reports name and offset") {
        try {
            parse_expression("2*q");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("unknown identifier `q`") != std::string::npos);
            CHECK(e.offset() == 2);
        }
    }

    TEST_CASE("syntax errors carry byte offsets") {
        for (const char* bad : {"", "x+", "(x", "x)", "sin x", "2**x", "x^1.5", "3 4"}) {
            CAPTURE(bad);
            CHECK_THROWS_AS(parse_expression(bad), ParseError);
        }
        try {
            parse_expression("x + (1 +");
        } catch (const ParseError& e) {
            CHECK(e.offset() == 8);
        }
    }

    TEST_CASE("division by zero is an error, never a silent non-finite") {
        CHECK_THROWS_AS(evaluate(parse_expression("1/x"), 0.0), EvaluationError);
        CHECK_THROWS_AS(evaluate(parse_expression("x^-2"), 0.0), EvaluationError);
        CHECK_THROWS_AS(evaluate(parse_expression("exp(x)"), 1e6), EvaluationError);
    }

    TEST_CASE("symbolic derivatives") {
        const Expr d = differentiate(parse_expression("x^2"), 1);
        for (double x : {-1.5, 0.0, 2.0}) CHECK(evaluate(d, x).real() == doctest::Approx(2 * x));
        const Expr c = differentiate(parse_expression("sin(x)"), 1);
        for (double x : {-1.5, 0.0, 2.0}) CHECK(evaluate(c, x).real() == doctest::Approx(std::cos(x)));
        CHECK(evaluate(differentiate(parse_expression("exp(x)"), 2), 0.0) == cplx(1.0));
        CHECK(evaluate(differentiate(parse_expression("x^3"), 4), 1.0) == cplx(0.0));
    }

    TEST_CASE("order zero is the identity and the cap is enforced") {
        const Expr e = parse_expression("sin(x)*x^2");
        CHECK(structurally_equal(differentiate(e, 0), e));
        CHECK_NOTHROW(differentiate(e, kDefaultDerivativeCap));
        CHECK_THROWS_AS(differentiate(e, kDefaultDerivativeCap + 1), ValidationError);
        CHECK_THROWS_AS(differentiate(e, -1), ValidationError);
        CHECK_NOTHROW(differentiate(e, 20, 20));
    }

    TEST_CASE("to_string re-parses to an equal tree") {
        std::mt19937 rng(7);
        for (int t = 0; t < 50; ++t) {
            const Expr e = parse_expression(random_expr(rng, 4));
            const Expr back = parse_expression(to_string(e));
            for (double x : {-0.7, 0.3, 1.1}) CHECK(std::abs(evaluate(back, x) - evaluate(e, x)) <= 1e-12 * (1 + std::abs(evaluate(e, x))));
        }
    }

    TEST_CASE("property: numeric and symbolic derivatives agree at 100 random points") {
        std::mt19937 rng(20240611);
        std::uniform_real_distribution<double> xs(-2.0, 2.0);
        int checked = 0;
        while (checked < 100) {
            const Expr f = parse_expression(random_expr(rng, 3));
            const Expr df = differentiate(f, 1);
            const double x = xs(rng);
            const cplx exact = evaluate(df, x);
            const cplx approx = numeric_derivative(f, x);
            CAPTURE(to_string(f));
            CAPTURE(x);
            CHECK(std::abs(approx - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
            ++checked;
        }
    }
}
