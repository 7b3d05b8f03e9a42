#include "entlab/quasiperiodic.hpp"

#include <cmath>
#include <stdexcept>

#include "entlab/rng.hpp"

namespace entlab {

namespace {

double wrap(double r, double tau) {
    double v = std::fmod(r, tau);
    if (v < 0.0) v += tau;
    return v;
}

}  // namespace

TorusPoint reduce(TorusPoint p, double tau1, double tau2) {
    return {wrap(p.r1, tau1), wrap(p.r2, tau2)};
}

TorusPoint torus_rotate(const TorusPoint& p, double t, double tau1, double tau2) {
    return {wrap(p.r1 + t, tau1), wrap(p.r2 + t, tau2)};
}

double torus_distance(const TorusPoint& a, const TorusPoint& b, double tau1,
                      double tau2) {
    const double d1 = std::abs(wrap(a.r1, tau1) - wrap(b.r1, tau1));
    const double d2 = std::abs(wrap(a.r2, tau2) - wrap(b.r2, tau2));
    return std::min(d1, tau1 - d1) + std::min(d2, tau2 - d2);
}

Ensemble k_simulate(const QuasiPeriodicParent& parent, double r1, double r2,
                    double s, const InitSampler& init, double t,
                    const SimConfig& cfg) {
    const CoefficientSet c = parent.slice(r1, r2);
    return push_ensemble(c, s, init, t, cfg);
}

GridMeasure mu_tilde(const QuasiPeriodicParent& parent, double r1, double r2,
                     double burn, const SimConfig& cfg, const MeasureConfig& mc,
                     int max_doublings) {
    if (!(burn > 0.0)) throw std::invalid_argument("mu_tilde: burn <= 0");
    // torus-average dissipation screen
    {
        double avg = 0.0;
        const int n = 16;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                avg += parent.alpha((i + 0.5) * parent.tau1 / n,
                                    (j + 0.5) * parent.tau2 / n);
        if (avg >= 0.0)
            throw std::runtime_error("mu_tilde: parent not dissipative on average");
    }
    const LyapunovSpec spec = LyapunovSpec::abs_squared(mc.beta);
    GridMeasure prev({mc.lo}, {mc.hi}, {mc.cells});
    bool have_prev = false;
    double b = burn;
    for (int k = 0; k <= max_doublings; ++k) {
        const Ensemble e =
            k_simulate(parent, r1, r2, -b, delta_sampler(Vec{0.0}), 0.0, cfg);
        GridMeasure g({mc.lo}, {mc.hi}, {mc.cells});
        g.deposit1d(e.coordinate(0));
        if (have_prev && rho_beta(prev, g, spec) < mc.tolerance) return g;
        prev = std::move(g);
        have_prev = true;
        b *= 2.0;
    }
    throw std::runtime_error("mu_tilde: not Cauchy after max burn doublings");
}

double CylinderMeasure::average(
    const std::function<double(double, double, double)>& f) const {
    double total = 0.0;
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            const double r1 = (i1 + 0.5) * tau1 / n1;
            const double r2 = (i2 + 0.5) * tau2 / n2;
            const GridMeasure& g = cell(i1, i2);
            double s = 0.0;
            for (std::size_t j = 0; j < g.cell_count(); ++j) {
                const double m = g.masses()[j];
                if (m > 0.0) s += m * f(r1, r2, g.cell_center(j)[0]);
            }
            // leaked mass contributes at the boundary radius
            s += g.leak() * f(r1, r2, g.boundary_radius());
            total += s;
        }
    return total / (n1 * n2);
}

CylinderMeasure cylinder_invariant(const QuasiPeriodicParent& parent, int n1,
                                   int n2, double burn, const SimConfig& cfg,
                                   const MeasureConfig& mc) {
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("cylinder_invariant: bad torus resolution");
    CylinderMeasure cm;
    cm.n1 = n1;
    cm.n2 = n2;
    cm.tau1 = parent.tau1;
    cm.tau2 = parent.tau2;
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            const double r1 = (i1 + 0.5) * parent.tau1 / n1;
            const double r2 = (i2 + 0.5) * parent.tau2 / n2;
            SimConfig c = cfg;
            c.seed = cfg.seed + 7919u * (i1 * n2 + i2);
            try {
                cm.cells.push_back(mu_tilde(parent, r1, r2, burn, c, mc));
            } catch (const std::exception& ex) {
                throw std::runtime_error("cylinder_invariant: cell (" +
                                         std::to_string(i1) + "," +
                                         std::to_string(i2) + "): " + ex.what());
            }
        }
    return cm;
}

double birkhoff_average(const QuasiPeriodicParent& parent,
                        const std::function<double(double, double, double)>& f,
                        const TorusPoint& start, double T, double h_avg,
                        const SimConfig& cfg) {
    // one lifted trajectory: torus rotation plus the K^{r1,r2} path driven by
    // the parent coefficients along the rotated slots
    const CoefficientSet c = parent.slice(start.r1, start.r2);
    double x = 0.0;
    const std::size_t nsteps =
        static_cast<std::size_t>(std::ceil(T / cfg.h - 1e-12));
    const std::size_t stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(h_avg / cfg.h)));
    double sum = 0.0;
    std::size_t count = 0;
    const Separable1D* sep = c.separable ? &*c.separable : nullptr;
    for (std::size_t k = 0; k < nsteps; ++k) {
        const double t0 = k * cfg.h;
        double b;
        double sg;
        if (sep) {
            b = sep->a1(t0) * x + sep->a3(t0) * x * x * x + sep->force(t0);
            sg = sep->sig(t0);
        } else {
            b = c.drift(t0, Vec{x})[0];
            sg = c.diffusion(t0, Vec{x})[0][0];
        }
        if (std::abs(x) > cfg.trunc_radius) {
            const double xt = x > 0.0 ? cfg.trunc_radius : -cfg.trunc_radius;
            if (sep)
                b = sep->a1(t0) * xt + sep->a3(t0) * xt * xt * xt + sep->force(t0);
            else
                b = c.drift(t0, Vec{xt})[0];
        }
        x += cfg.h * b + sg * std::sqrt(cfg.h) * rng::normal(cfg.seed, 0, k);
        if (!(std::abs(x) <= 1e8)) throw BlowUpError(t0);
        if ((k + 1) % stride == 0) {
            const double t1 = t0 + cfg.h;
            const TorusPoint p =
                torus_rotate(start, t1, parent.tau1, parent.tau2);
            sum += f(p.r1, p.r2, x);
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("birkhoff_average: no samples");
    return sum / count;
}

}  // namespace entlab
