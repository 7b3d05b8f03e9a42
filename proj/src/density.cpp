#include "entlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entlab/quadrature.hpp"
#include "entlab/simulator.hpp"

namespace entlab {

namespace {

double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace

Flow::Flow(const CoefficientSet& c, double substep) : c_(c), h_(substep) {
    if (!(substep > 0.0)) throw std::invalid_argument("Flow: substep <= 0");
}

Vec Flow::solve(double tau, const Vec& xi, double t) const {
    Vec x = xi;
    const double dir = t >= tau ? 1.0 : -1.0;
    const double total = std::abs(t - tau);
    const std::size_t n =
        total > 0.0 ? static_cast<std::size_t>(std::ceil(total / h_ - 1e-12)) : 0;
    double cur = tau;
    const int d = c_.d;
    for (std::size_t k = 0; k < n; ++k) {
        const double h = dir * std::min(h_, total - k * h_);
        const Vec k1 = c_.drift(cur, x);
        Vec tmp(d);
        for (int a = 0; a < d; ++a) tmp[a] = x[a] + 0.5 * h * k1[a];
        const Vec k2 = c_.drift(cur + 0.5 * h, tmp);
        for (int a = 0; a < d; ++a) tmp[a] = x[a] + 0.5 * h * k2[a];
        const Vec k3 = c_.drift(cur + 0.5 * h, tmp);
        for (int a = 0; a < d; ++a) tmp[a] = x[a] + h * k3[a];
        const Vec k4 = c_.drift(cur + h, tmp);
        for (int a = 0; a < d; ++a)
            x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        cur += h;
        if (norm2(x) > 1e8) throw BlowUpError(cur);
    }
    return x;
}

FrozenGaussianProxy build_frozen_proxy(const CoefficientSet& c, double tau,
                                       const Vec& xi, double s, double t,
                                       int quad_nodes) {
    if (!(t > s)) throw std::invalid_argument("build_frozen_proxy: s >= t");
    Flow flow(c, 1e-3);
    FrozenGaussianProxy proxy;
    proxy.tau = tau;
    proxy.xi = xi;
    const int d = c.d;
    proxy.theta_shift.assign(d, 0.0);
    proxy.covariance.assign(d, Vec(d, 0.0));
    const quad::Rule& rule = quad::gauss_legendre(quad_nodes);
    const double ctr = 0.5 * (s + t), half = 0.5 * (t - s);
    for (int i = 0; i < quad_nodes; ++i) {
        const double r = ctr + half * rule.nodes[i];
        const double w = half * rule.weights[i];
        const Vec th = flow.solve(tau, xi, r);
        const Vec b = c.drift(r, th);
        const Mat sg = c.diffusion(r, th);
        for (int a = 0; a < d; ++a) {
            proxy.theta_shift[a] += w * b[a];
            for (int q = 0; q < d; ++q) {
                double aa = 0.0;
                for (int m = 0; m < d; ++m) aa += sg[a][m] * sg[q][m];
                proxy.covariance[a][q] += w * aa;
            }
        }
    }
    return proxy;
}

double frozen_density(const CoefficientSet& c, double tau, const Vec& xi, double s,
                      double t, const Vec& x, const Vec& y) {
    const FrozenGaussianProxy proxy = build_frozen_proxy(c, tau, xi, s, t);
    const int d = c.d;
    if (d == 1) {
        const double var = proxy.covariance[0][0];
        if (!(var > 1e-14))
            throw std::runtime_error("frozen_density: singular covariance");
        return gaussian_density1d(x[0] + proxy.theta_shift[0], var, y[0]);
    }
    const double a = proxy.covariance[0][0], b = proxy.covariance[0][1],
                 cc = proxy.covariance[1][1];
    const double det = a * cc - b * b;
    if (!(det > 1e-14))
        throw std::runtime_error("frozen_density: singular covariance");
    const double dx = y[0] - x[0] - proxy.theta_shift[0];
    const double dy = y[1] - x[1] - proxy.theta_shift[1];
    const double quad_form = (cc * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
    return std::exp(-0.5 * quad_form) / (2.0 * M_PI * std::sqrt(det));
}

namespace {

// Precomputed frozen trajectory over [s,t]: cumulative drift and diffusion
// integrals along theta, so p~(t2,t1,x,y) comes from two lookups.
struct FrozenTable {
    double s, t;
    std::vector<double> theta, cum_b, cum_a;
    int n;

    FrozenTable(const CoefficientSet& c, double tau, double xi, double s_,
                double t_, int steps)
        : s(s_), t(t_), n(steps) {
        Flow flow(c, 1e-3);
        theta.resize(n + 1);
        cum_b.assign(n + 1, 0.0);
        cum_a.assign(n + 1, 0.0);
        const double h = (t - s) / n;
        Vec th = flow.solve(tau, Vec{xi}, s);
        theta[0] = th[0];
        double prev_b = c.drift(s, th)[0];
        double sg0 = c.diffusion(s, th)[0][0];
        double prev_a = sg0 * sg0;
        for (int k = 1; k <= n; ++k) {
            const double r = s + k * h;
            th = flow.solve(r - h, Vec{theta[k - 1]}, r);
            theta[k] = th[0];
            const double bk = c.drift(r, th)[0];
            const double sgk = c.diffusion(r, th)[0][0];
            const double ak = sgk * sgk;
            cum_b[k] = cum_b[k - 1] + 0.5 * h * (prev_b + bk);
            cum_a[k] = cum_a[k - 1] + 0.5 * h * (prev_a + ak);
            prev_b = bk;
            prev_a = ak;
        }
    }

    double interp(const std::vector<double>& v, double r) const {
        const double u = (r - s) / (t - s) * n;
        const int k = std::clamp(static_cast<int>(std::floor(u)), 0, n - 1);
        const double frac = u - k;
        return v[k] * (1.0 - frac) + v[k + 1] * frac;
    }

    double shift(double t1, double t2) const {
        return interp(cum_b, t2) - interp(cum_b, t1);
    }
    double var(double t1, double t2) const {
        return interp(cum_a, t2) - interp(cum_a, t1);
    }
    double theta_at(double r) const { return interp(theta, r); }
};

double ptilde(const FrozenTable& tab, double t1, double t2, double x, double y) {
    const double v = tab.var(t1, t2);
    if (!(v > 1e-14)) throw std::runtime_error("parametrix: singular proxy variance");
    return gaussian_density1d(x + tab.shift(t1, t2), v, y);
}

// One perturbation layer: int p~(t1,t0,x,z) H(t2,t1,z,y) dz with
//   H(t2,t1,z,y) = (b(t1,z) - b(t1,theta_{t1})) d/dz p~(t2,t1,z,y).
// The two proxy factors combine into a single Gaussian in z, so the drift
// mismatch is integrated against that product Gaussian by Gauss-Legendre.
// The (t2-t1)^{-1/2} blow-up of the gradient factor is left to the caller's
// singular time rule.
double ptilde_h_layer(const CoefficientSet& c, const FrozenTable& tab,
                      double t0, double t1, double t2, double x, double y) {
    const double v2 = tab.var(t1, t2);
    if (!(v2 > 1e-16)) return 0.0;
    const double w = y - tab.shift(t1, t2);
    const double theta1 = tab.theta_at(t1);
    const double b_theta = c.drift(t1, Vec{theta1})[0];
    const double v1 = std::max(tab.var(t0, t1), 0.0);
    const double m1 = x + tab.shift(t0, t1);
    if (v1 <= 1e-16) {
        const double diff = c.drift(t1, Vec{m1})[0] - b_theta;
        return diff * (w - m1) / v2 * gaussian_density1d(w, v2, m1);
    }
    const double vs = v1 + v2;
    const double vc = v1 * v2 / vs;
    const double mc = (m1 * v2 + w * v1) / vs;
    const double pref = gaussian_density1d(m1, vs, w);
    const auto& gl = quad::gauss_legendre(24);
    const double half = 8.0 * std::sqrt(vc);
    double acc = 0.0;
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
        const double z = mc + half * gl.nodes[j];
        const double diff = c.drift(t1, Vec{z})[0] - b_theta;
        acc += gl.weights[j] * half * gaussian_density1d(mc, vc, z) * diff *
               (w - z) / v2;
    }
    return pref * acc;
}

}  // namespace

double parametrix_iterate(const CoefficientSet& c, double tau, double xi, double s,
                          double t, double x, double y, int order) {
    if (c.d != 1) throw std::invalid_argument("parametrix_iterate: d must be 1");
    if (order < 0 || order > 2)
        throw std::invalid_argument("parametrix_iterate: order must be 0..2");
    if (!(t > s)) throw std::invalid_argument("parametrix_iterate: s >= t");
    const FrozenTable tab(c, tau, xi, s, t, 2048);
    double result = ptilde(tab, s, t, x, y);
    if (order == 0) return result;

    // the H gradient blows up like (t-r)^{-1/2} at the upper endpoint, so the
    // time integral uses a Gauss-Jacobi rule with that weight stripped off
    quad::Rule jac = quad::gauss_jacobi_sqrt_singular(s, t, 24);

    // order 1: int_s^t dr int dz p~(r, s, x, z) H(t, r, z, y)
    double corr1 = 0.0;
    for (std::size_t i = 0; i < jac.nodes.size(); ++i) {
        const double r = jac.nodes[i];
        const double sq = std::sqrt(std::max(t - r, 1e-300));
        corr1 += jac.weights[i] * sq * ptilde_h_layer(c, tab, s, r, t, x, y);
    }
    result += corr1;
    if (order == 1) return result;

    // order 2: int_s^t dr int dz A(r, z) H(t, r, z, y) where
    // A(r, z) = [p~ (x) H](r, s, x, z) reuses the order-1 layer on [s, r];
    // the z-integral rides the Gaussian weight carried by the outermost H
    double corr2 = 0.0;
    const auto& gl = quad::gauss_legendre(30);
    for (std::size_t i = 0; i < jac.nodes.size(); ++i) {
        const double r = jac.nodes[i];
        const double sq = std::sqrt(std::max(t - r, 1e-300));
        const double v2 = tab.var(r, t);
        if (!(v2 > 1e-16) || r - s < 1e-12) continue;
        const double w = y - tab.shift(r, t);
        const double theta_r = tab.theta_at(r);
        const double b_theta = c.drift(r, Vec{theta_r})[0];

        quad::Rule jac2 = quad::gauss_jacobi_sqrt_singular(s, r, 16);
        auto inner_layer = [&](double z) {
            double acc = 0.0;
            for (std::size_t i2 = 0; i2 < jac2.nodes.size(); ++i2) {
                const double u = jac2.nodes[i2];
                const double squ = std::sqrt(std::max(r - u, 1e-300));
                acc += jac2.weights[i2] * squ *
                       ptilde_h_layer(c, tab, s, u, r, x, z);
            }
            return acc;
        };

        const double half = 8.0 * std::sqrt(v2);
        double inner = 0.0;
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
            const double z = w + half * gl.nodes[j];
            const double diff = c.drift(r, Vec{z})[0] - b_theta;
            const double hval = diff * (w - z) / v2 * gaussian_density1d(w, v2, z);
            inner += gl.weights[j] * half * inner_layer(z) * hval;
        }
        corr2 += jac.weights[i] * sq * inner;
    }
    return result + corr2;
}

namespace {

double bernoulli(double x) {
    if (std::abs(x) < 1e-10) return 1.0 - 0.5 * x;
    return x / std::expm1(x);
}

}  // namespace

FPResult fp_solve(const CoefficientSet& c, double s, double x0, double t,
                  const FPGrid& grid) {
    if (c.d != 1) throw std::invalid_argument("fp_solve: d must be 1");
    if (!(t > s)) throw std::invalid_argument("fp_solve: s >= t");
    const int M = grid.cells;
    const double dy = (grid.hi - grid.lo) / M;
    std::vector<double> p(M, 0.0);
    {
        int k = static_cast<int>(std::floor((x0 - grid.lo) / dy));
        k = std::clamp(k, 0, M - 1);
        p[k] = 1.0 / dy;
    }
    const std::size_t nsteps =
        static_cast<std::size_t>(std::ceil((t - s) / grid.dt - 1e-12));
    std::vector<double> lower(M), diag(M), upper(M), rhs(M);
    std::vector<double> cp(M), dp(M);
    for (std::size_t step = 0; step < nsteps; ++step) {
        const double t0 = s + step * grid.dt;
        const double t1 = std::min(t0 + grid.dt, t);
        const double dt = t1 - t0;
        // Scharfetter-Gummel fluxes of the divergence form
        // dp/dt = d/dy (D dp/dy - b* p), D = a/2, b* = b - a'/2
        std::vector<double> Dh(M + 1, 0.0), bh(M + 1, 0.0);
        for (int i = 1; i < M; ++i) {
            const double yif = grid.lo + i * dy;
            const double sg = c.diffusion(t1, Vec{yif})[0][0];
            const double a = sg * sg;
            const double sgp = c.diffusion(t1, Vec{yif + 0.5 * dy})[0][0];
            const double sgm = c.diffusion(t1, Vec{yif - 0.5 * dy})[0][0];
            const double aprime = (sgp * sgp - sgm * sgm) / dy;
            Dh[i] = 0.5 * a;
            bh[i] = c.drift(t1, Vec{yif})[0] - 0.5 * aprime;
            if (!(Dh[i] > 1e-14))
                throw std::runtime_error("fp_solve: degenerate diffusion");
        }
        for (int i = 0; i < M; ++i) {
            double al = 0.0, au = 0.0, ad = 0.0;
            if (i > 0) {
                const double v = bh[i] * dy / Dh[i];
                const double f = Dh[i] / (dy * dy);
                // flux through the left face couples cells i-1 and i
                al = -f * bernoulli(-v);
                ad += f * bernoulli(v);
            } else if (grid.boundary == Boundary::Absorbing) {
                ad += Dh[1] / (dy * dy);
            }
            if (i < M - 1) {
                const double v = bh[i + 1] * dy / Dh[i + 1];
                const double f = Dh[i + 1] / (dy * dy);
                au = -f * bernoulli(v);
                ad += f * bernoulli(-v);
            } else if (grid.boundary == Boundary::Absorbing) {
                ad += Dh[M - 1] / (dy * dy);
            }
            lower[i] = dt * al;
            upper[i] = dt * au;
            diag[i] = 1.0 + dt * ad;
            rhs[i] = p[i];
        }
        // Thomas solve
        cp[0] = upper[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for (int i = 1; i < M; ++i) {
            const double m = diag[i] - lower[i] * cp[i - 1];
            cp[i] = upper[i] / m;
            dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m;
        }
        p[M - 1] = dp[M - 1];
        for (int i = M - 2; i >= 0; --i) p[i] = dp[i] - cp[i] * p[i + 1];
        for (double v : p)
            if (v < -1e-10)
                throw std::runtime_error("fp_solve: negative density, reduce dt");
        for (double& v : p) v = std::max(v, 0.0);
    }
    GridMeasure g({grid.lo}, {grid.hi}, {M});
    double mass = 0.0;
    for (int i = 0; i < M; ++i) {
        g.masses()[static_cast<std::size_t>(i)] = p[i] * dy;
        mass += p[i] * dy;
    }
    FPResult res{std::move(g), 1.0 - mass};
    res.density.normalize();
    return res;
}

double lower_bound_eval(const LowerBoundParams& p, double dt, const Vec& x,
                        const Vec& y) {
    if (!(dt > 0.0)) throw std::invalid_argument("lower_bound_eval: dt <= 0");
    const double ax = norm2(x);
    Vec diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
    const double axy = norm2(diff);
    const double e =
        -p.eta2 * (1.0 + std::pow(ax, 2.0 * (p.d + 1) * p.kappa)) *
            (1.0 + std::pow(axy, 2.0 * p.kappa)) -
        p.eta3 / dt * (1.0 + axy * axy);
    return p.eta1 * std::pow(dt, -0.5 * p.d) * std::exp(e);
}

LowerBoundParams calibrate_lower_bound(const CoefficientSet& c, double dt,
                                       double x_lo, double x_hi, double y_lo,
                                       double y_hi, const FPGrid& grid) {
    const int nx = 7, ny = 41;
    std::vector<std::vector<double>> dens(nx, std::vector<double>(ny));
    std::vector<double> xs(nx), ys(ny);
    for (int i = 0; i < nx; ++i) xs[i] = x_lo + (x_hi - x_lo) * i / (nx - 1.0);
    for (int j = 0; j < ny; ++j) ys[j] = y_lo + (y_hi - y_lo) * j / (ny - 1.0);
    const double dy = (grid.hi - grid.lo) / grid.cells;
    for (int i = 0; i < nx; ++i) {
        const FPResult res = fp_solve(c, 0.0, xs[i], dt, grid);
        for (int j = 0; j < ny; ++j) {
            int k = static_cast<int>(std::floor((ys[j] - grid.lo) / dy));
            k = std::clamp(k, 0, grid.cells - 1);
            dens[i][j] = res.density.masses()[static_cast<std::size_t>(k)] / dy;
            if (!(dens[i][j] > 0.0))
                throw std::runtime_error("calibrate_lower_bound: zero density");
        }
    }
    LowerBoundParams best;
    best.d = c.d;
    best.kappa = c.kappa;
    for (double eta2 : {0.005, 0.01, 0.05, 0.1, 0.5}) {
        for (double eta3 : {0.05, 0.1, 0.5, 1.0, 2.0}) {
            LowerBoundParams p;
            p.d = c.d;
            p.kappa = c.kappa;
            p.eta1 = 1.0;
            p.eta2 = eta2;
            p.eta3 = eta3;
            double eta1 = 1e300;
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j) {
                    const double form =
                        lower_bound_eval(p, dt, Vec{xs[i]}, Vec{ys[j]});
                    if (form > 0.0) eta1 = std::min(eta1, dens[i][j] / form);
                }
            eta1 *= 0.9;  // safety margin
            if (eta1 < 1e290 && eta1 > best.eta1) {
                best.eta1 = eta1;
                best.eta2 = eta2;
                best.eta3 = eta3;
            }
        }
    }
    best.calibrated = true;
    return best;
}

MinorizationResult minorization(const CoefficientSet& c, double s, double t,
                                double R, double rho_B, const FPGrid& grid,
                                int start_points) {
    if (c.d != 1) throw std::invalid_argument("minorization: d must be 1");
    for (int i = 0; i <= 10; ++i) {
        const double r = s + (t - s) * i / 10.0;
        const double sg = c.diffusion(r, Vec{0.0})[0][0];
        if (sg * sg < 1e-12)
            throw std::runtime_error("minorization: degenerate diffusion on [s,t]");
    }
    const double xmax = std::sqrt(R);
    const double dy = (grid.hi - grid.lo) / grid.cells;
    double min_density = 1e300;
    for (int i = 0; i < start_points; ++i) {
        const double x0 =
            start_points == 1 ? 0.0 : -xmax + 2.0 * xmax * i / (start_points - 1.0);
        const FPResult res = fp_solve(c, s, x0, t, grid);
        const int j_lo =
            std::max(0, static_cast<int>(std::floor((-rho_B - grid.lo) / dy)));
        const int j_hi = std::min(grid.cells - 1,
                                  static_cast<int>(std::floor((rho_B - grid.lo) / dy)));
        for (int j = j_lo; j <= j_hi; ++j)
            min_density = std::min(
                min_density, res.density.masses()[static_cast<std::size_t>(j)] / dy);
    }
    MinorizationResult out;
    out.ball_radius = rho_B;
    out.min_density = min_density;
    out.eta = 2.0 * rho_B * min_density;
    return out;
}

bool two_point_check(double p_ry0, double p_ty, double bigK, double kappa,
                     double s, double r, double t, double y0, double y) {
    if (!(s < r && r < t)) throw std::invalid_argument("two_point_check: need s<r<t");
    const double dy = std::abs(y - y0);
    const double expo = -bigK * (1.0 + (t - r) / (r - s) *
                                           (1.0 + std::pow(dy, 2.0 * kappa)) +
                                 dy * dy / (t - r));
    return p_ty >= p_ry0 * std::exp(expo);
}

}  // namespace entlab
