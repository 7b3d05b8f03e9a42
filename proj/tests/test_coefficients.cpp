#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entlab/coefficients.hpp"
#include "entlab/quadrature.hpp"

using namespace entlab;

namespace {

CoefficientSet double_well() {
    CoefficientSet c;
    c.d = 1;
    c.name = "double_well";
    c.drift = [](double, const Vec& x) {
        return Vec{x[0] - x[0] * x[0] * x[0]};
    };
    c.diffusion = [](double, const Vec&) { return Mat{{1.0}}; };
    c.envelope.alpha = [](double) { return -2.0; };
    c.envelope.lambda = [](double) { return 4.0; };
    c.envelope.g = [](double d) { return 4.0 * d; };
    c.gamma2 = 1.0;
    c.kappa = 3.0;
    return c;
}

}  // namespace

TEST_CASE("truncate_drift is the radial projection outside the ball") {
    const CoefficientSet c = truncate_drift(double_well(), 2.0);
    CHECK(c.drift(0.0, {3.0})[0] == doctest::Approx(2.0 - 8.0));   // b(2) = -6
    CHECK(c.drift(0.0, {1.0})[0] == doctest::Approx(0.0));         // untouched inside
    CHECK(c.drift(0.0, {-3.0})[0] == doctest::Approx(6.0));
    CHECK(c.diffusion(0.0, {3.0})[0][0] == doctest::Approx(1.0));  // unchanged
}

TEST_CASE("truncate_drift envelope holds on a dense grid for the bpsv drift") {
    const CoefficientSet base = make_example("bpsv");
    const CoefficientSet c = truncate_drift(base, 3.0);
    // <x, b_N(t,x)> <= (alpha^+ + Lambda)|x|^2 + Lambda
    for (int it = 0; it <= 10; ++it) {
        const double t = -10.0 + 2.0 * it;
        const double ap = std::max(c.envelope.alpha(t), 0.0);
        for (int ix = 0; ix <= 1000; ++ix) {
            const double x = -10.0 + 0.02 * ix;
            const double xb = x * c.drift(t, {x})[0];
            const double lam = c.envelope.lambda(t);
            CHECK(xb <= (ap + lam) * x * x + lam + 1e-9);
        }
    }
}

TEST_CASE("truncate_drift is idempotent and consistent across radii") {
    const CoefficientSet c2 = truncate_drift(double_well(), 2.0);
    const CoefficientSet c22 = truncate_drift(c2, 2.0);
    const CoefficientSet c5_then_2 = truncate_drift(double_well(), 5.0);
    for (double x = -4.0; x <= 4.0; x += 0.25) {
        CHECK(c22.drift(0.0, {x})[0] == doctest::Approx(c2.drift(0.0, {x})[0]));
        if (std::abs(x) <= 2.0)
            CHECK(c5_then_2.drift(0.0, {x})[0] ==
                  doctest::Approx(double_well().drift(0.0, {x})[0]));
    }
}

TEST_CASE("mollify fixes linear drift and constant diffusion") {
    CoefficientSet lin;
    lin.d = 1;
    lin.drift = [](double, const Vec& x) { return Vec{x[0]}; };
    lin.diffusion = [](double, const Vec&) { return Mat{{1.0}}; };
    const CoefficientSet m = mollify(lin, 0.3);
    for (double x = -2.0; x <= 2.0; x += 0.5) {
        CHECK(m.drift(0.0, {x})[0] == doctest::Approx(x).epsilon(1e-10));
        CHECK(m.diffusion(0.0, {x})[0][0] == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("mollify matches a high-order quadrature oracle") {
    const CoefficientSet c = truncate_drift(double_well(), 5.0);
    const double eps = 0.1, x = 0.5;
    const CoefficientSet m = mollify(c, eps);
    // oracle: int b(x - eps u) rho(u) du with the normalized bump on [-1,1]
    const double z = quad::adaptive_simpson(
        [](double u) { return std::exp(-1.0 / (1.0 - u * u)); }, -0.999999, 0.999999,
        1e-13);
    const double oracle =
        quad::adaptive_simpson(
            [&](double u) {
                return c.drift(0.0, {x - eps * u})[0] * std::exp(-1.0 / (1.0 - u * u));
            },
            -0.999999, 0.999999, 1e-13) /
        z;
    CHECK(m.drift(0.0, {x})[0] == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("mollification error halves as eps halves") {
    const CoefficientSet c = truncate_drift(double_well(), 5.0);
    auto max_err = [&](double eps) {
        const CoefficientSet m = mollify(c, eps);
        double e = 0.0;
        for (double x = -3.0; x <= 3.0; x += 0.2)
            e = std::max(e, std::abs(m.drift(0.0, {x})[0] - c.drift(0.0, {x})[0]));
        return e;
    };
    const double e1 = max_err(0.2), e2 = max_err(0.1);
    // smooth region: error is O(eps^2); near the truncation kink it is O(eps).
    CHECK(e2 <= 0.6 * e1);
    CHECK(e2 > 0.0);
}

TEST_CASE("mollify rejects eps outside (0,1]") {
    CHECK_THROWS_AS(mollify(double_well(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mollify(double_well(), 1.5), std::invalid_argument);
}

TEST_CASE("reparameterize with the identity is the identity") {
    const CoefficientSet c = make_example("bpsv");
    const CoefficientSet r = reparameterize(c, TimeChange::identity());
    for (double t = -3.0; t <= 3.0; t += 0.7)
        for (double x = -2.0; x <= 2.0; x += 0.9) {
            CHECK(r.drift(t, {x})[0] == doctest::Approx(c.drift(t, {x})[0]));
            CHECK(r.diffusion(t, {x})[0][0] ==
                  doctest::Approx(c.diffusion(t, {x})[0][0]));
        }
}

TEST_CASE("power time change turns the |t|^eps OU family homogeneous") {
    const double eps = 0.5;
    const CoefficientSet c = make_example("ou_t_eps", {{"eps", eps}});
    const CoefficientSet r = reparameterize(c, TimeChange::power(eps));
    for (double t : {0.5, 2.0, 4.0, 10.0}) {
        for (double x : {-1.0, 0.3, 2.0}) {
            CHECK(r.drift(t, {x})[0] == doctest::Approx(-x / (1.0 + eps)).epsilon(1e-9));
            CHECK(r.diffusion(t, {x})[0][0] ==
                  doctest::Approx(std::sqrt(1.0 / (1.0 + eps))).epsilon(1e-9));
        }
    }
    // envelope: (phi^{-1})'(4) * alpha_{phi^{-1}(4)} = -2/3 at eps = 0.5
    CHECK(r.envelope.alpha(4.0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("time change round trip and monotonicity") {
    const TimeChange tc = TimeChange::power(0.7);
    double prev = -1e18;
    for (double t = -5.0; t <= 5.0; t += 0.5) {
        CHECK(tc.phi(tc.phi_inv(t)) == doctest::Approx(t).epsilon(1e-10));
        const double v = tc.phi_inv(t);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("dissipation integral closed forms") {
    DissipationEnvelope env;
    env.alpha = [](double) { return -1.0; };
    env.lambda = [](double) { return 0.0; };
    env.g = [](double d) { return 0.0 * d; };
    CHECK(dissipation_integral(env, 0.0, 2.0) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(dissipation_integral(env, 2.0, 0.0), std::invalid_argument);

    DissipationEnvelope cosenv;
    cosenv.alpha = [](double t) { return std::cos(t); };
    cosenv.lambda = [](double) { return 0.0; };
    cosenv.g = [](double d) { return d; };
    CHECK(dissipation_integral(cosenv, 0.0, 2.0 * M_PI) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("expanding-interval envelope is strongly negative on the inner windows") {
    const CoefficientSet c = make_example("sin_sqrt_double_well");
    const int k = 1;
    const double Sk = -std::pow(5.0 * M_PI / 6.0 + 2.0 * k * M_PI, 2);
    const double Tk = -std::pow(M_PI / 6.0 + 2.0 * k * M_PI, 2);
    REQUIRE(Sk < Tk);
    const double integral = dissipation_integral(c.envelope, Sk, Tk);
    CHECK(integral <= -7.0 * (Tk - Sk) + 1e-6);
}

TEST_CASE("assumption screening on the built-in families") {
    const CoefficientSet c = make_example("bpsv");
    const AssumptionReport r = verify_assumptions(c, SamplingGrid{});
    CHECK(r.max_sigma_bound_violation <= 1e-9);
    CHECK(r.max_sigma_lipschitz_violation <= 1e-9);
    CHECK(r.max_growth_violation <= 1e-9);
    CHECK(r.max_dissipation_violation <= 1e-9);
    CHECK(r.min_diffusion_eigen > 0.0);
    CHECK(r.dissipative_on_average);
    CHECK(r.degenerate_intervals.empty());
}

TEST_CASE("degenerate diffusion windows are reported") {
    CoefficientSet c = make_example("bpsv");
    c.diffusion = [](double t, const Vec&) {
        return Mat{{std::max(std::sin(t / 4.0), 0.0)}};
    };
    const AssumptionReport r = verify_assumptions(c, SamplingGrid{});
    CHECK(!r.degenerate_intervals.empty());
    // sin^+(t/4) = 0 on [-4pi - 8k pi, -8k pi]
    bool covers = false;
    for (const auto& [a, b] : r.degenerate_intervals)
        if (a <= -2.0 && b >= -1.0) covers = true;
    CHECK(covers);
}

TEST_CASE("zero drift fails the average-dissipation screen") {
    CoefficientSet c;
    c.d = 1;
    c.drift = [](double, const Vec&) { return Vec{0.0}; };
    c.diffusion = [](double, const Vec&) { return Mat{{1.0}}; };
    c.envelope.alpha = [](double) { return 0.0; };
    c.envelope.lambda = [](double) { return 0.0; };
    c.envelope.g = [](double) { return 0.0; };
    const AssumptionReport r = verify_assumptions(c, SamplingGrid{});
    CHECK(r.average_alpha == doctest::Approx(0.0));
    CHECK(!r.dissipative_on_average);
}

TEST_CASE("quasi-periodic torus-average dissipation matches the screen") {
    const QuasiPeriodicParent q = make_quasi_double_well(1.0, 1.0, 1.0, std::sqrt(2.0));
    double avg = 0.0;
    const int n = 16;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            avg += q.alpha(q.tau1 * (i + 0.5) / n, q.tau2 * (j + 0.5) / n);
    avg /= n * n;
    const AssumptionReport r = verify_assumptions(q.diagonal(), SamplingGrid{});
    CHECK((avg < 0.0) == r.dissipative_on_average);
}

TEST_CASE("subgeometric forcing function blocks") {
    const CoefficientSet c = make_example("linear_f_eps", {{"eps", 0.5}});
    const auto f = c.separable->a1;
    CHECK(f(0.0) == doctest::Approx(-1.0));    // t >= -1
    CHECK(f(-4.1) == doctest::Approx(-1.0));   // inside [i^2, i^2 + i^eps], i = 2
    CHECK(f(-7.0) == doctest::Approx(0.5));    // +1/i stretch, i = 2
    CHECK(f(-9.5) == doctest::Approx(-1.0));   // i = 3 block start
}

TEST_CASE("unknown example and symbolic coefficients") {
    CHECK_THROWS_AS(make_example("nope"), std::invalid_argument);
    const CoefficientSet c = make_symbolic("x - x^3 + cos(t)", "1", "-2", "5");
    CHECK(c.drift(0.0, {2.0})[0] == doctest::Approx(2.0 - 8.0 + 1.0));
    CHECK(c.diffusion(0.0, {2.0})[0][0] == doctest::Approx(1.0));
    CHECK(c.envelope.alpha(3.0) == doctest::Approx(-2.0));
    CHECK(c.envelope.lambda(3.0) == doctest::Approx(5.0));
}
