#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entlab/quadrature.hpp"

using namespace entlab;

TEST_CASE("adaptive simpson on polynomials is exact") {
    auto f = [](double x) { return 3.0 * x * x - 2.0 * x + 1.0; };
    CHECK(quad::adaptive_simpson(f, 0.0, 2.0) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("adaptive simpson matches closed forms") {
    CHECK(quad::adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(quad::adaptive_simpson([](double x) { return std::exp(-x); }, 0.0, 20.0) ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("reversed limits flip the sign") {
    auto f = [](double x) { return x; };
    CHECK(quad::adaptive_simpson(f, 1.0, 0.0) == doctest::Approx(-0.5));
}

TEST_CASE("breakpoints resolve kinks in the integrand") {
    auto f = [](double x) { return std::abs(x); };
    const double v = quad::adaptive_simpson(f, -1.0, 1.0, 1e-12, {0.0});
    CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    auto pos_sin = [](double x) { return std::max(std::sin(x), 0.0); };
    const double w =
        quad::adaptive_simpson(pos_sin, 0.0, 2.0 * M_PI, 1e-10, {M_PI});
    CHECK(w == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("gauss legendre integrates high-degree polynomials exactly") {
    // n-point rule is exact through degree 2n-1
    auto f = [](double x) { return std::pow(x, 9) + std::pow(x, 4); };
    const double v = quad::gauss_legendre_integrate(f, -1.0, 1.0, 5);
    CHECK(v == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("gauss legendre rule weights sum to interval length") {
    const auto& rule = quad::gauss_legendre(32);
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-13));
    for (std::size_t i = 1; i < rule.nodes.size(); ++i)
        CHECK(rule.nodes[i] > rule.nodes[i - 1]);
}

TEST_CASE("gauss jacobi rule handles the inverse-sqrt endpoint weight") {
    // int_0^1 (1-r)^{-1/2} dr = 2
    const auto rule = quad::gauss_jacobi_sqrt_singular(0.0, 1.0, 8);
    double total = 0.0;
    for (double w : rule.weights) total += w;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-12));

    // int_0^1 r (1-r)^{-1/2} dr = 4/3
    double lin = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        lin += rule.weights[i] * rule.nodes[i];
    CHECK(lin == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

    // int_a^b cos(r) (b-r)^{-1/2} dr vs adaptive oracle with substitution
    const double a = 0.5, b = 2.0;
    const auto r2 = quad::gauss_jacobi_sqrt_singular(a, b, 16);
    double v = 0.0;
    for (std::size_t i = 0; i < r2.nodes.size(); ++i)
        v += r2.weights[i] * std::cos(r2.nodes[i]);
    // substitution u = sqrt(b-r): integral = 2 int_0^{sqrt(b-a)} cos(b-u^2) du
    const double oracle = 2.0 * quad::adaptive_simpson(
                                    [b](double u) { return std::cos(b - u * u); },
                                    0.0, std::sqrt(b - a), 1e-12);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-10));
}
