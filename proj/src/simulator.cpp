#include "entlab/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "entlab/quadrature.hpp"
#include "entlab/rng.hpp"

namespace entlab {

namespace {

constexpr double kBlowUp = 1e8;

double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Noise is keyed by the step's distance from the target time (n - 1 - k), so
// runs pushed to the same endpoint from different start times share their
// driving noise over the overlapping window. Burn-doubling and start-ladder
// comparisons then couple pathwise instead of fighting independent MC noise.
std::size_t step_count(double s, double t, double h) {
    if (t <= s) return 0;
    return static_cast<std::size_t>(std::ceil((t - s) / h - 1e-12));
}

Vec stabilized_drift(const CoefficientSet& c, double t, const Vec& x,
                     const SimConfig& cfg, double h) {
    if (cfg.scheme == Scheme::TruncatedEM) {
        const double r = norm2(x);
        if (r <= cfg.trunc_radius) return c.drift(t, x);
        Vec y(x);
        const double sc = cfg.trunc_radius / r;
        for (double& v : y) v *= sc;
        return c.drift(t, y);
    }
    Vec b = c.drift(t, x);
    const double denom = 1.0 + h * norm2(b);
    for (double& v : b) v /= denom;
    return b;
}

}  // namespace

std::vector<double> Ensemble::coordinate(int axis) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& x : samples) out.push_back(x[axis]);
    return out;
}

double Ensemble::second_moment() const {
    double s = 0.0;
    for (const auto& x : samples) {
        double r = 0.0;
        for (double v : x) r += v * v;
        s += r;
    }
    return s / samples.size();
}

Trajectory simulate_path(const CoefficientSet& c, double s, const Vec& x, double t,
                         const SimConfig& cfg) {
    if (s > t) throw std::invalid_argument("simulate_path: s > t");
    const std::size_t n = step_count(s, t, cfg.h);
    Trajectory tr;
    tr.times.reserve(n + 1);
    tr.states.reserve(n + 1);
    tr.times.push_back(s);
    tr.states.push_back(x);
    Vec cur = x;
    const int d = c.d;
    for (std::size_t k = 0; k < n; ++k) {
        const double t0 = s + k * cfg.h;
        const double t1 = std::min(t0 + cfg.h, t);
        const double h = t1 - t0;
        const Vec b = stabilized_drift(c, t0, cur, cfg, h);
        const Mat sg = c.diffusion(t0, cur);
        const double sh = std::sqrt(h);
        Vec dw(d);
        for (int a = 0; a < d; ++a)
            dw[a] = sh * rng::normal(cfg.seed, 0, n - 1 - k,
                                     static_cast<std::uint64_t>(a + 1));
        for (int a = 0; a < d; ++a) {
            double diff = 0.0;
            for (int q = 0; q < d; ++q) diff += sg[a][q] * dw[q];
            cur[a] += h * b[a] + diff;
        }
        if (norm2(cur) > kBlowUp) throw BlowUpError(t1);
        tr.times.push_back(t1);
        tr.states.push_back(cur);
    }
    return tr;
}

InitSampler delta_sampler(Vec x) {
    return [x](std::uint64_t, std::uint64_t) { return x; };
}

InitSampler uniform_sampler1d(double lo, double hi) {
    return [lo, hi](std::uint64_t path, std::uint64_t seed) {
        const double u = rng::uniform(seed, path, 0xffffffffULL);
        return Vec{lo + (hi - lo) * u};
    };
}

namespace {

// Time-outer loop: evaluate the four time-only coefficients once per step,
// then sweep all paths. This is the throughput path for the big ensembles.
void push_separable(const CoefficientSet& c, double s, double t,
                    const SimConfig& cfg, std::vector<double>& xs) {
    const Separable1D& sep = *c.separable;
    const std::size_t n = step_count(s, t, cfg.h);
    const std::size_t npaths = xs.size();
    const double N = cfg.trunc_radius;
    const bool tamed = cfg.scheme == Scheme::TamedEM;
    double blow_time = 0.0;
    bool blew = false;
    for (std::size_t k = 0; k < n; ++k) {
        const double t0 = s + k * cfg.h;
        const double t1 = std::min(t0 + cfg.h, t);
        const double h = t1 - t0;
        const double a1 = sep.a1(t0);
        const double a3 = sep.a3(t0);
        const double f = sep.force(t0);
        const double sgh = sep.sig(t0) * std::sqrt(h);
        for (std::size_t p = 0; p < npaths; ++p) {
            double x = xs[p];
            double xb = x;
            if (!tamed && std::abs(xb) > N) xb = xb > 0.0 ? N : -N;
            double b = a1 * xb + a3 * xb * xb * xb + f;
            if (tamed) b /= 1.0 + h * std::abs(b);
            x += h * b + sgh * rng::normal(cfg.seed, p, n - 1 - k);
            xs[p] = x;
        }
        if ((k & 1023) == 0 || k + 1 == n) {
            for (std::size_t p = 0; p < npaths; ++p)
                if (!(std::abs(xs[p]) <= kBlowUp)) {
                    blew = true;
                    blow_time = t1;
                }
            if (blew) throw BlowUpError(blow_time);
        }
    }
}

}  // namespace

Ensemble push_ensemble(const CoefficientSet& c, double s, const InitSampler& init,
                       double t, const SimConfig& cfg) {
    if (s > t) throw std::invalid_argument("push_ensemble: s > t");
    Ensemble e;
    e.s = s;
    e.t = t;
    e.config = cfg;
    e.samples.reserve(cfg.paths);
    if (c.d == 1 && c.separable) {
        std::vector<double> xs(cfg.paths);
        for (std::size_t p = 0; p < cfg.paths; ++p) xs[p] = init(p, cfg.seed)[0];
        push_separable(c, s, t, cfg, xs);
        for (double v : xs) e.samples.push_back(Vec{v});
        return e;
    }
    const std::size_t n = step_count(s, t, cfg.h);
    const int d = c.d;
    for (std::size_t p = 0; p < cfg.paths; ++p) {
        Vec cur = init(p, cfg.seed);
        for (std::size_t k = 0; k < n; ++k) {
            const double t0 = s + k * cfg.h;
            const double t1 = std::min(t0 + cfg.h, t);
            const double h = t1 - t0;
            const Vec b = stabilized_drift(c, t0, cur, cfg, h);
            const Mat sg = c.diffusion(t0, cur);
            const double sh = std::sqrt(h);
            Vec dw(d);
            for (int a = 0; a < d; ++a)
                dw[a] = sh * rng::normal(cfg.seed, p, n - 1 - k,
                                         static_cast<std::uint64_t>(a + 1));
            for (int a = 0; a < d; ++a) {
                double diff = 0.0;
                for (int q = 0; q < d; ++q) diff += sg[a][q] * dw[q];
                cur[a] += h * b[a] + diff;
            }
            double r = 0.0;
            for (double v : cur) r += v * v;
            if (r > kBlowUp * kBlowUp) throw BlowUpError(t1);
        }
        e.samples.push_back(std::move(cur));
    }
    return e;
}

double second_moment_bound(const DissipationEnvelope& env, double s, double t,
                           const Vec& x, double gamma1, int d) {
    if (s > t) throw std::invalid_argument("second_moment_bound: s > t");
    double x2 = 0.0;
    for (double v : x) x2 += v * v;
    const double head = std::exp(2.0 * env.alpha_integral(s, t)) * x2;
    auto integrand = [&](double u) {
        return std::exp(2.0 * env.alpha_integral(u, t)) *
               (2.0 * env.lambda(u) + d * gamma1);
    };
    const double tail =
        quad::adaptive_simpson(integrand, s, t, 1e-8, env.breakpoints);
    return head + tail;
}

MomentReport check_moment_bound(const Ensemble& e, double bound) {
    if (e.samples.empty())
        throw std::invalid_argument("check_moment_bound: empty ensemble");
    MomentReport rep;
    rep.bound = bound;
    const std::size_t n = e.samples.size();
    double mean = 0.0, m2 = 0.0;
    std::vector<double> vals;
    vals.reserve(n);
    for (const auto& xv : e.samples) {
        double r = 0.0;
        for (double v : xv) r += v * v;
        vals.push_back(r);
        mean += r;
    }
    mean /= n;
    for (double v : vals) m2 += (v - mean) * (v - mean);
    rep.sample_mean = mean;
    rep.standard_error = n > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    rep.pass = mean <= bound + 3.0 * rep.standard_error;
    return rep;
}

}  // namespace entlab
