#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entlab/expr.hpp"

using entlab::expr::Expression;

TEST_CASE("arithmetic and precedence") {
    Expression e("1 + 2 * 3 - 4 / 2", {});
    CHECK(e.eval({}) == doctest::Approx(5.0));
    Expression p("(1 + 2) * 3", {});
    CHECK(p.eval({}) == doctest::Approx(9.0));
    Expression pw("2 ^ 3 ^ 2", {});  // right associative
    CHECK(pw.eval({}) == doctest::Approx(512.0));
    Expression neg("-2 ^ 2", {});  // unary minus binds looser than ^
    CHECK(neg.eval({}) == doctest::Approx(-4.0));
}

TEST_CASE("variables and functions") {
    Expression e("x - sin(pi * t) * x ^ 3", {"t", "x"});
    CHECK(e.eval({0.5, 2.0}) == doctest::Approx(2.0 - 8.0));
    Expression f("pos(sin(t))", {"t"});
    CHECK(f.eval({M_PI / 2}) == doctest::Approx(1.0));
    CHECK(f.eval({-M_PI / 2}) == doctest::Approx(0.0));
    Expression g("sqrt(abs(t))", {"t"});
    CHECK(g.eval({-9.0}) == doctest::Approx(3.0));
}

TEST_CASE("parse errors throw with position info") {
    CHECK_THROWS_AS(Expression("1 +", {}), std::invalid_argument);
    CHECK_THROWS_AS(Expression("foo(1)", {}), std::invalid_argument);
    CHECK_THROWS_AS(Expression("x + y", {"x"}), std::invalid_argument);
    CHECK_THROWS_AS(Expression("(1 + 2", {}), std::invalid_argument);
    CHECK_THROWS_AS(Expression("1 2", {}), std::invalid_argument);
}

TEST_CASE("eval validates the argument count") {
    Expression e("t + x", {"t", "x"});
    CHECK_THROWS_AS(e.eval({1.0}), std::invalid_argument);
}
