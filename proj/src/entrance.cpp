#include "entlab/entrance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entlab/quadrature.hpp"

namespace entlab {

EntranceEstimate estimate_entrance(const CoefficientSet& c, double t,
                                   const std::vector<double>& starts, double x0,
                                   const SimConfig& sim, const MeasureConfig& mc) {
    if (starts.empty()) throw std::invalid_argument("estimate_entrance: no starts");
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (starts[i] > t)
            throw std::invalid_argument("estimate_entrance: start above target time");
        if (i && !(starts[i] < starts[i - 1]))
            throw std::invalid_argument("estimate_entrance: starts not decreasing");
    }
    EntranceEstimate est;
    est.t = t;
    est.starts = starts;
    const LyapunovSpec spec = LyapunovSpec::abs_squared(mc.beta);
    for (std::size_t i = 0; i < starts.size(); ++i) {
        SimConfig cfg = sim;
        cfg.seed = sim.seed + i;  // decorrelate the start times
        const Ensemble e =
            push_ensemble(c, starts[i], delta_sampler(Vec{x0}), t, cfg);
        GridMeasure g({mc.lo}, {mc.hi}, {mc.cells});
        g.deposit1d(e.coordinate(0));
        est.estimates.push_back(std::move(g));
        if (i > 0)
            est.consecutive_rho.push_back(
                rho_beta(est.estimates[i - 1], est.estimates[i], spec));
        const std::size_t m = est.consecutive_rho.size();
        if (m >= 2 && est.consecutive_rho[m - 1] < mc.tolerance &&
            est.consecutive_rho[m - 2] < mc.tolerance) {
            est.converged = true;
            est.final_estimate = est.estimates.back();
            break;
        }
    }
    if (!est.converged && !est.estimates.empty())
        est.final_estimate = est.estimates.back();
    return est;
}

std::vector<double> geometric_starts(double t, double delta0, int count) {
    std::vector<double> s;
    for (int n = 1; n <= count; ++n) s.push_back(t - std::ldexp(delta0, n));
    return s;
}

double linear_f_eps_antiderivative(double t, double eps) {
    // F(t) = int_0^t f_eps; piecewise-exact
    if (t >= -1.0) return -t;
    double acc = -1.0;  // int over [-1, 0] of f = -1, so int_t^0 piece; F = -acc
    const double u = -t;
    double i = 1.0;
    while (true) {
        const double len_neg = std::pow(i, eps);
        const double block_hi = i * i;           // |t| at block start
        const double block_lo = (i + 1.0) * (i + 1.0);
        if (u <= block_hi + len_neg) {
            acc += -(u - block_hi);
            break;
        }
        acc += -len_neg;
        if (u <= block_lo) {
            acc += (u - block_hi - len_neg) / i;
            break;
        }
        acc += (block_lo - block_hi - len_neg) / i;
        i += 1.0;
    }
    // acc = int over [t, 0] of f, so F(t) = int_0^t f = -acc
    return -acc;
}

GaussianMeasure linear_entrance_exact(const std::function<double(double)>& f,
                                      const std::function<double(double)>& sigma,
                                      double t,
                                      const std::vector<double>& breakpoints) {
    // variance = int_{-inf}^t exp(2 int_u^t f) sigma(u)^2 du, accumulated in
    // blocks going down until the tail contributes < 1e-8
    double variance = 0.0;
    double exponent = 0.0;  // int_{a}^{t} f for the current block top a
    double a = t;
    const double block = 5.0;
    bool converged = false;
    for (int k = 0; k < 400; ++k) {
        const double b = a - block;
        auto inner = [&](double u) {
            const double e =
                exponent + quad::adaptive_simpson(f, u, a, 1e-10, breakpoints);
            const double sg = sigma(u);
            return std::exp(2.0 * e) * sg * sg;
        };
        const double contrib =
            quad::adaptive_simpson(inner, b, a, 1e-10, breakpoints);
        variance += contrib;
        exponent += quad::adaptive_simpson(f, b, a, 1e-10, breakpoints);
        a = b;
        if (k > 2 && contrib < 1e-8 && std::exp(2.0 * exponent) < 1e-10) {
            converged = true;
            break;
        }
        if (exponent > 50.0)
            throw std::runtime_error("linear_entrance_exact: divergent variance");
    }
    if (!converged)
        throw std::runtime_error("linear_entrance_exact: tail did not converge");
    GaussianMeasure g;
    g.mean = {0.0};
    g.cov = {{variance}};
    return g;
}

GaussianMeasure linear_transition(const std::function<double(double)>& f_integral,
                                  const std::function<double(double)>& sigma,
                                  double s, double x, double t) {
    const double Ft = f_integral(t);
    const double mean = std::exp(Ft - f_integral(s)) * x;
    auto inner = [&](double u) {
        const double sg = sigma(u);
        return std::exp(2.0 * (Ft - f_integral(u))) * sg * sg;
    };
    const double var = quad::adaptive_simpson(inner, s, t, 1e-9);
    GaussianMeasure g;
    g.mean = {mean};
    g.cov = {{var}};
    return g;
}

std::vector<std::pair<double, double>> convergence_curve_linear(
    const std::function<double(double)>& f_integral,
    const std::function<double(double)>& sigma, double t, double x,
    const std::vector<double>& starts, const LyapunovSpec& spec) {
    // entrance variance: extend the transition variance from the deepest
    // start downward until stable
    const double Ft = f_integral(t);
    auto inner = [&](double u) {
        const double sg = sigma(u);
        return std::exp(2.0 * (Ft - f_integral(u))) * sg * sg;
    };
    double lo = starts.empty() ? t - 50.0 : starts.back();
    double variance = quad::adaptive_simpson(inner, lo, t, 1e-9);
    for (int k = 0; k < 200; ++k) {
        const double contrib = quad::adaptive_simpson(inner, lo - 10.0, lo, 1e-10);
        variance += contrib;
        lo -= 10.0;
        if (contrib < 1e-9) break;
    }
    GaussianMeasure mu;
    mu.mean = {0.0};
    mu.cov = {{variance}};
    std::vector<std::pair<double, double>> curve;
    for (double s : starts) {
        const GaussianMeasure p = linear_transition(f_integral, sigma, s, x, t);
        curve.emplace_back(t - s, gaussian_rho_beta(p, mu, spec));
    }
    return curve;
}

double m_t_integral(const DissipationEnvelope& env, double t, double gamma1,
                    int d) {
    // screen: long-run average dissipation must be negative
    if (env.alpha_integral(t - 100.0, t) >= 0.0)
        throw std::runtime_error("m_t_integral: nonnegative average dissipation");
    double total = 0.0;
    double exponent = 0.0;  // int_a^t alpha for current block top a
    double a = t;
    const double block = 5.0;
    for (int k = 0; k < 400; ++k) {
        const double b = a - block;
        auto inner = [&](double u) {
            const double e = exponent + quad::adaptive_simpson(env.alpha, u, a, 1e-10,
                                                               env.breakpoints);
            return std::exp(2.0 * e) * (2.0 * env.lambda(u) + d * gamma1);
        };
        total += quad::adaptive_simpson(inner, b, a, 1e-9, env.breakpoints);
        exponent += env.alpha_integral(b, a);
        a = b;
        if (k > 2 && std::exp(2.0 * exponent) < 1e-12) return total;
        if (exponent > 50.0)
            throw std::runtime_error("m_t_integral: divergent integral");
    }
    throw std::runtime_error("m_t_integral: tail did not converge");
}

double alpha_delta(const DissipationEnvelope& env, double Delta, double horizon,
                   double t_hi) {
    const double t_lo = t_hi - horizon;
    const int n = 2000;
    const double step = horizon / n;
    std::vector<double> cum(n + 1, 0.0);
    for (int i = 1; i <= n; ++i)
        cum[i] = cum[i - 1] +
                 env.alpha_integral(t_lo + (i - 1) * step, t_lo + i * step);
    const int k = std::max(1, static_cast<int>(std::floor(Delta / step)));
    double best = 0.0;
    for (int i = 0; i + 1 <= n; ++i)
        for (int j = i + 1; j <= std::min(n, i + k); ++j)
            best = std::max(best, cum[j] - cum[i]);
    return best;
}

std::vector<ExampleTruth> example_catalog() {
    return {
        {"bpsv", 0.9, 1.1, false, 0.0},
        {"sin_sqrt_double_well", 0.9, 1.1, false, 0.0},
        {"sin_double_well", 0.9, 1.1, false, 0.0},
        {"linear_f_eps", 0.65, 0.85, false, 0.0},
        {"ou_t_eps", 1.3, 2.2, true, 0.5},
        {"ou", 0.9, 1.1, true, 0.5},
        {"quasi_double_well", 0.9, 1.1, false, 0.0},
    };
}

}  // namespace entlab
