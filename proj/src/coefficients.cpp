#include "entlab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "entlab/expr.hpp"
#include "entlab/quadrature.hpp"

namespace entlab {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace

double DissipationEnvelope::alpha_integral(double s, double t) const {
    return quad::adaptive_simpson(alpha, s, t, 1e-9, breakpoints);
}

double dissipation_integral(const DissipationEnvelope& env, double s, double t) {
    if (s > t) throw std::invalid_argument("dissipation_integral: s > t");
    return env.alpha_integral(s, t);
}

CoefficientSet truncate_drift(const CoefficientSet& c, double N) {
    if (!(N > 0.0)) throw std::invalid_argument("truncate_drift: N <= 0");
    CoefficientSet out = c;
    auto b = c.drift;
    out.drift = [b, N](double t, const Vec& x) {
        const double r = norm2(x);
        if (r <= N) return b(t, x);
        Vec y(x);
        const double scale = N / r;
        for (double& v : y) v *= scale;
        return b(t, y);
    };
    const auto alpha = c.envelope.alpha;
    const auto lambda = c.envelope.lambda;
    out.envelope.alpha = [alpha, lambda](double t) {
        return pos(alpha(t)) + lambda(t);
    };
    out.envelope.lambda = lambda;
    const auto g = c.envelope.g;
    out.envelope.g = [g](double d) { return 2.0 * g(d); };
    out.separable.reset();
    out.name = c.name + "_trunc";
    return out;
}

CoefficientSet mollify(const CoefficientSet& c, double eps) {
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("mollify: eps must be in (0,1]");
    if (c.d > 2) throw std::invalid_argument("mollify: d > 2 unsupported");
    const int n = 32;
    const quad::Rule& rule = quad::gauss_legendre(n);

    // bump kernel exp(-1/(1-u^2)) on |u|<1, normalized so the quadrature of
    // the kernel itself is exactly 1 (constants mollify to themselves)
    auto bump = [](double u) {
        const double q = 1.0 - u * u;
        return q > 1e-12 ? std::exp(-1.0 / q) : 0.0;
    };
    const int d = c.d;
    std::vector<double> nodes(n), wts(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        nodes[i] = rule.nodes[i];
        wts[i] = rule.weights[i] * bump(rule.nodes[i]);
        z += wts[i];
    }
    for (double& w : wts) w /= z;

    CoefficientSet out = c;
    auto b = c.drift;
    auto sig = c.diffusion;
    if (d == 1) {
        out.drift = [b, eps, nodes, wts](double t, const Vec& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                s += wts[i] * b(t, Vec{x[0] - eps * nodes[i]})[0];
            return Vec{s};
        };
        out.diffusion = [sig, eps, nodes, wts](double t, const Vec& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                s += wts[i] * sig(t, Vec{x[0] - eps * nodes[i]})[0][0];
            return Mat{{s}};
        };
    } else {
        out.drift = [b, eps, nodes, wts](double t, const Vec& x) {
            Vec s(2, 0.0);
            for (std::size_t i = 0; i < nodes.size(); ++i)
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    const Vec y{x[0] - eps * nodes[i], x[1] - eps * nodes[j]};
                    const Vec bv = b(t, y);
                    const double w = wts[i] * wts[j];
                    s[0] += w * bv[0];
                    s[1] += w * bv[1];
                }
            return s;
        };
        out.diffusion = [sig, eps, nodes, wts](double t, const Vec& x) {
            Mat s(2, Vec(2, 0.0));
            for (std::size_t i = 0; i < nodes.size(); ++i)
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    const Vec y{x[0] - eps * nodes[i], x[1] - eps * nodes[j]};
                    const Mat sv = sig(t, y);
                    const double w = wts[i] * wts[j];
                    for (int a = 0; a < 2; ++a)
                        for (int bq = 0; bq < 2; ++bq) s[a][bq] += w * sv[a][bq];
                }
            return s;
        };
    }
    out.separable.reset();
    out.name = c.name + "_mollified";
    return out;
}

CoefficientSet reparameterize(const CoefficientSet& c, const TimeChange& tc) {
    for (double t : {0.25, 0.5, 1.0, 2.0, 4.0})
        if (!(tc.phi_inv(t + 1e-4) > tc.phi_inv(t)))
            throw std::invalid_argument("reparameterize: phi_inv not increasing");
    CoefficientSet out = c;
    auto b = c.drift;
    auto sig = c.diffusion;
    auto inv = tc.phi_inv;
    auto invp = tc.phi_inv_prime;
    out.drift = [b, inv, invp](double t, const Vec& x) {
        const double u = inv(t), du = invp(t);
        Vec v = b(u, x);
        for (double& vi : v) vi *= du;
        return v;
    };
    out.diffusion = [sig, inv, invp](double t, const Vec& x) {
        const double u = inv(t), r = std::sqrt(invp(t));
        Mat m = sig(u, x);
        for (auto& row : m)
            for (double& v : row) v *= r;
        return m;
    };
    const auto alpha = c.envelope.alpha;
    const auto lambda = c.envelope.lambda;
    out.envelope.alpha = [alpha, inv, invp](double t) { return invp(t) * alpha(inv(t)); };
    out.envelope.lambda = [lambda, inv, invp](double t) {
        return invp(t) * lambda(inv(t));
    };
    std::vector<double> bp;
    for (double p : c.envelope.breakpoints) bp.push_back(tc.phi(p));
    out.envelope.breakpoints = std::move(bp);
    out.separable.reset();
    out.name = c.name + "_timechanged";
    return out;
}

TimeChange TimeChange::identity() {
    TimeChange tc;
    tc.phi = [](double t) { return t; };
    tc.phi_inv = [](double t) { return t; };
    tc.phi_inv_prime = [](double) { return 1.0; };
    return tc;
}

TimeChange TimeChange::power(double eps) {
    if (!(eps > -1.0)) throw std::invalid_argument("TimeChange::power: eps <= -1");
    const double p = 1.0 + eps;
    TimeChange tc;
    tc.phi = [p](double t) {
        return t >= 0.0 ? std::pow(t, p) : -std::pow(-t, p);
    };
    tc.phi_inv = [p](double t) {
        return t >= 0.0 ? std::pow(t, 1.0 / p) : -std::pow(-t, 1.0 / p);
    };
    tc.phi_inv_prime = [p](double t) {
        const double a = std::abs(t);
        return a > 0.0 ? std::pow(a, 1.0 / p - 1.0) / p : 0.0;
    };
    return tc;
}

AssumptionReport verify_assumptions(const CoefficientSet& c, const SamplingGrid& grid) {
    AssumptionReport rep;
    rep.min_diffusion_eigen = std::numeric_limits<double>::max();
    const double dt = (grid.t_hi - grid.t_lo) / grid.t_cells;
    const double dx = (grid.x_hi - grid.x_lo) / grid.x_cells;
    double degen_start = 0.0;
    bool in_degen = false;
    for (int it = 0; it <= grid.t_cells; ++it) {
        const double t = grid.t_lo + it * dt;
        double min_eig_t = std::numeric_limits<double>::max();
        for (int ix = 0; ix <= grid.x_cells; ++ix) {
            const double xv = grid.x_lo + ix * dx;
            const Vec x{xv};
            const Vec bv = c.drift(t, x);
            const Mat sv = c.diffusion(t, x);
            const double s2 = sv[0][0] * sv[0][0];
            rep.max_sigma_bound_violation =
                std::max(rep.max_sigma_bound_violation, s2 - c.gamma1);
            min_eig_t = std::min(min_eig_t, s2);
            if (ix > 0) {
                const Vec xp{xv - dx};
                const double lip =
                    std::abs(sv[0][0] - c.diffusion(t, xp)[0][0]) / dx;
                rep.max_sigma_lipschitz_violation =
                    std::max(rep.max_sigma_lipschitz_violation, lip - c.gamma1);
            }
            rep.max_growth_violation =
                std::max(rep.max_growth_violation,
                         std::abs(bv[0]) -
                             c.gamma2 * (1.0 + std::pow(std::abs(xv), c.kappa)));
            rep.max_dissipation_violation =
                std::max(rep.max_dissipation_violation,
                         xv * bv[0] - c.envelope.alpha(t) * xv * xv -
                             c.envelope.lambda(t));
        }
        rep.min_diffusion_eigen = std::min(rep.min_diffusion_eigen, min_eig_t);
        const bool degen = min_eig_t < 1e-12;
        if (degen && !in_degen) {
            degen_start = t;
            in_degen = true;
        } else if (!degen && in_degen) {
            rep.degenerate_intervals.emplace_back(degen_start, t);
            in_degen = false;
        }
    }
    if (in_degen) rep.degenerate_intervals.emplace_back(degen_start, grid.t_hi);
    rep.average_alpha =
        c.envelope.alpha_integral(grid.t_lo, grid.t_hi) / (grid.t_hi - grid.t_lo);
    rep.dissipative_on_average = rep.average_alpha < 0.0;
    return rep;
}

namespace {

double get(const std::map<std::string, double>& p, const std::string& k, double def) {
    auto it = p.find(k);
    return it == p.end() ? def : it->second;
}

CoefficientSet from_separable(Separable1D s, std::string name,
                              DissipationEnvelope env, double gamma1,
                              double gamma2, double kappa) {
    CoefficientSet c;
    c.d = 1;
    c.name = std::move(name);
    c.gamma1 = gamma1;
    c.gamma2 = gamma2;
    c.kappa = kappa;
    c.envelope = std::move(env);
    auto a1 = s.a1, a3 = s.a3, f = s.force, sg = s.sig;
    c.drift = [a1, a3, f](double t, const Vec& x) {
        const double v = x[0];
        return Vec{a1(t) * v + a3(t) * v * v * v + f(t)};
    };
    c.diffusion = [sg](double t, const Vec&) { return Mat{{sg(t)}}; };
    c.separable = std::move(s);
    return c;
}

double sin_pos(double u) { return std::max(std::sin(u), 0.0); }

// f_eps of the subgeometric linear example: on u = -t, blocks
// [i^2, i^2 + i^eps] carry slope -1 and the remainder of (i^2, (i+1)^2)
// carries +1/i; f = -1 for t > -1.
double linear_f_eps(double t, double eps) {
    if (t >= -1.0) return -1.0;
    const double u = -t;
    double i = std::floor(std::sqrt(u));
    if ((i + 1.0) * (i + 1.0) <= u) i += 1.0;
    if (u <= i * i + std::pow(i, eps)) return -1.0;
    return 1.0 / i;
}

}  // namespace

CoefficientSet make_example(const std::string& name,
                            const std::map<std::string, double>& p) {
    if (name == "bpsv") {
        const double amp = get(p, "amp", 1.0);
        const double freq = get(p, "freq", 1.0);
        Separable1D s;
        s.a1 = [](double) { return 1.0; };
        s.a3 = [](double) { return -1.0; };
        s.force = [amp, freq](double t) { return amp * std::cos(freq * t); };
        s.sig = [](double) { return 1.0; };
        DissipationEnvelope env;
        const double lam = amp * amp + 4.0;
        env.alpha = [](double) { return -2.0; };
        env.lambda = [lam](double) { return lam; };
        env.g = [lam](double d) { return lam * d; };
        return from_separable(std::move(s), "bpsv", std::move(env), 1.0,
                              1.0 + std::abs(amp), 3.0);
    }
    if (name == "sin_sqrt_double_well") {
        Separable1D s;
        s.a1 = [](double) { return 1.0; };
        s.a3 = [](double t) { return -sin_pos(std::sqrt(std::abs(t))); };
        s.force = [](double) { return 0.0; };
        s.sig = [](double) { return 1.0; };
        DissipationEnvelope env;
        env.alpha = [](double t) {
            return 1.0 - 16.0 * sin_pos(std::sqrt(std::abs(t)));
        };
        env.lambda = [](double) { return 64.0; };
        env.g = [](double d) { return 65.0 * d; };
        for (int k = 0; k <= 80; ++k) {
            const double v = k * M_PI * k * M_PI;
            env.breakpoints.push_back(-v);
            if (k) env.breakpoints.push_back(v);
        }
        return from_separable(std::move(s), "sin_sqrt_double_well", std::move(env),
                              1.0, 1.0, 3.0);
    }
    if (name == "sin_double_well") {
        Separable1D s;
        s.a1 = [](double) { return 1.0; };
        s.a3 = [](double t) { return -sin_pos(t); };
        s.force = [](double) { return 0.0; };
        s.sig = [](double) { return 1.0; };
        DissipationEnvelope env;
        env.alpha = [](double t) { return 1.0 - 2.0 * M_PI * sin_pos(t); };
        env.lambda = [](double) { return M_PI * M_PI; };
        env.g = [](double d) { return (1.0 + M_PI * M_PI) * d; };
        for (int k = -80; k <= 80; ++k) env.breakpoints.push_back(k * M_PI);
        return from_separable(std::move(s), "sin_double_well", std::move(env), 1.0,
                              1.0, 3.0);
    }
    if (name == "linear_f_eps") {
        const double eps = get(p, "eps", 0.5);
        Separable1D s;
        s.a1 = [eps](double t) { return linear_f_eps(t, eps); };
        s.a3 = [](double) { return 0.0; };
        s.force = [](double) { return 0.0; };
        s.sig = [](double) { return 1.0; };
        DissipationEnvelope env;
        env.alpha = s.a1;
        env.lambda = [](double) { return 0.0; };
        env.g = [](double d) { return d; };
        for (int i = 1; i <= 700; ++i) {
            const double i2 = static_cast<double>(i) * i;
            env.breakpoints.push_back(-i2);
            env.breakpoints.push_back(-i2 - std::pow(static_cast<double>(i), eps));
        }
        return from_separable(std::move(s), "linear_f_eps", std::move(env), 1.0, 1.0,
                              1.0);
    }
    if (name == "ou_t_eps") {
        const double eps = get(p, "eps", 0.5);
        Separable1D s;
        s.a1 = [eps](double t) { return -std::pow(std::abs(t), eps); };
        s.a3 = [](double) { return 0.0; };
        s.force = [](double) { return 0.0; };
        s.sig = [eps](double t) { return std::pow(std::abs(t), 0.5 * eps); };
        DissipationEnvelope env;
        env.alpha = s.a1;
        env.lambda = [](double) { return 0.0; };
        env.g = [](double d) { return d; };
        env.breakpoints.push_back(0.0);
        return from_separable(std::move(s), "ou_t_eps", std::move(env), 1.0, 1.0,
                              1.0);
    }
    if (name == "ou") {
        Separable1D s;
        s.a1 = [](double) { return -1.0; };
        s.a3 = [](double) { return 0.0; };
        s.force = [](double) { return 0.0; };
        s.sig = [](double) { return 1.0; };
        DissipationEnvelope env;
        env.alpha = [](double) { return -1.0; };
        env.lambda = [](double) { return 0.0; };
        env.g = [](double d) { return d; };
        return from_separable(std::move(s), "ou", std::move(env), 1.0, 1.0, 1.0);
    }
    if (name == "quasi_double_well") {
        const double c1 = get(p, "c1", 1.0);
        const double c2 = get(p, "c2", 1.0);
        const double w1 = get(p, "w1", 1.0);
        const double w2 = get(p, "w2", std::sqrt(2.0));
        return make_quasi_double_well(c1, c2, w1, w2).diagonal();
    }
    throw std::invalid_argument("unknown example '" + name + "'");
}

std::vector<std::string> example_names() {
    return {"bpsv",       "sin_sqrt_double_well", "sin_double_well",
            "linear_f_eps", "ou_t_eps",           "ou",
            "quasi_double_well"};
}

QuasiPeriodicParent make_quasi_double_well(double c1, double c2, double w1,
                                           double w2) {
    QuasiPeriodicParent q;
    q.tau1 = 2.0 * M_PI / w1;
    q.tau2 = 2.0 * M_PI / w2;
    q.drift = [c1, c2, w1, w2](double t1, double t2, const Vec& x) {
        const double v = x[0];
        return Vec{v - v * v * v + c1 * std::cos(w1 * t1) + c2 * std::cos(w2 * t2)};
    };
    q.diffusion = [](double, double, const Vec&) { return Mat{{1.0}}; };
    q.alpha = [](double, double) { return -2.0; };
    const double lam = (std::abs(c1) + std::abs(c2)) * (std::abs(c1) + std::abs(c2)) + 4.0;
    q.lambda = [lam](double, double) { return lam; };
    SeparableQP sp;
    sp.a1 = [](double, double) { return 1.0; };
    sp.a3 = [](double, double) { return -1.0; };
    sp.force = [c1, c2, w1, w2](double t1, double t2) {
        return c1 * std::cos(w1 * t1) + c2 * std::cos(w2 * t2);
    };
    sp.sig = [](double, double) { return 1.0; };
    q.separable = std::move(sp);
    return q;
}

CoefficientSet QuasiPeriodicParent::diagonal() const { return slice(0.0, 0.0); }

CoefficientSet QuasiPeriodicParent::slice(double r1, double r2) const {
    CoefficientSet c;
    c.d = 1;
    c.name = "quasi_double_well";
    c.gamma1 = 1.0;
    c.gamma2 = 4.0;
    c.kappa = 3.0;
    auto b = drift;
    auto sg = diffusion;
    c.drift = [b, r1, r2](double t, const Vec& x) { return b(t + r1, t + r2, x); };
    c.diffusion = [sg, r1, r2](double t, const Vec& x) {
        return sg(t + r1, t + r2, x);
    };
    auto al = alpha;
    auto lm = lambda;
    c.envelope.alpha = [al, r1, r2](double t) { return al(t + r1, t + r2); };
    c.envelope.lambda = [lm, r1, r2](double t) { return lm(t + r1, t + r2); };
    auto env_alpha = c.envelope.alpha;
    auto env_lambda = c.envelope.lambda;
    c.envelope.g = [env_alpha, env_lambda](double d) {
        // crude but valid dominating function for bounded alpha/lambda
        double mx = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double t = d * i / 20.0;
            mx = std::max(mx, std::max(env_alpha(t), 0.0) + env_lambda(t));
        }
        return mx * d;
    };
    if (separable) {
        const SeparableQP sp = *separable;
        Separable1D s;
        s.a1 = [sp, r1, r2](double t) { return sp.a1(t + r1, t + r2); };
        s.a3 = [sp, r1, r2](double t) { return sp.a3(t + r1, t + r2); };
        s.force = [sp, r1, r2](double t) { return sp.force(t + r1, t + r2); };
        s.sig = [sp, r1, r2](double t) { return sp.sig(t + r1, t + r2); };
        c.separable = std::move(s);
    }
    return c;
}

CoefficientSet make_symbolic(const std::string& drift, const std::string& sigma,
                             const std::string& alpha, const std::string& lambda) {
    auto b = std::make_shared<expr::Expression>(drift,
                                                std::vector<std::string>{"t", "x"});
    auto sg = std::make_shared<expr::Expression>(sigma,
                                                 std::vector<std::string>{"t", "x"});
    auto al =
        std::make_shared<expr::Expression>(alpha, std::vector<std::string>{"t"});
    auto lm =
        std::make_shared<expr::Expression>(lambda, std::vector<std::string>{"t"});
    CoefficientSet c;
    c.d = 1;
    c.name = "symbolic";
    c.drift = [b](double t, const Vec& x) { return Vec{b->eval({t, x[0]})}; };
    c.diffusion = [sg](double t, const Vec& x) {
        return Mat{{sg->eval({t, x[0]})}};
    };
    c.envelope.alpha = [al](double t) { return al->eval({t}); };
    c.envelope.lambda = [lm](double t) { return lm->eval({t}); };
    auto ea = c.envelope.alpha;
    auto el = c.envelope.lambda;
    c.envelope.g = [ea, el](double d) {
        double mx = 0.0;
        for (int i = 0; i <= 50; ++i) {
            const double t = d * i / 50.0;
            mx = std::max(mx, std::max(ea(t), 0.0) + el(t));
        }
        return mx * d;
    };
    return c;
}

}  // namespace entlab
