#pragma once

#include <functional>
#include <vector>

#include "entlab/coefficients.hpp"
#include "entlab/entrance.hpp"
#include "entlab/measures.hpp"
#include "entlab/simulator.hpp"

namespace entlab {

struct TorusPoint {
    double r1 = 0.0, r2 = 0.0;
};

TorusPoint reduce(TorusPoint p, double tau1, double tau2);
TorusPoint torus_rotate(const TorusPoint& p, double t, double tau1, double tau2);
double torus_distance(const TorusPoint& a, const TorusPoint& b, double tau1,
                      double tau2);

// Ensemble push of the reparameterized semigroup K^{r1,r2}.
Ensemble k_simulate(const QuasiPeriodicParent& parent, double r1, double r2,
                    double s, const InitSampler& init, double t,
                    const SimConfig& cfg);

// Entrance-style estimate of the law of K^{r1,r2}(0, -burn, 0), doubling the
// burn-in until rho_beta-Cauchy.
GridMeasure mu_tilde(const QuasiPeriodicParent& parent, double r1, double r2,
                     double burn, const SimConfig& cfg, const MeasureConfig& mc,
                     int max_doublings = 6);

struct CylinderMeasure {
    int n1 = 0, n2 = 0;
    double tau1 = 0.0, tau2 = 0.0;
    std::vector<GridMeasure> cells;  // row-major (i1 * n2 + i2), uniform weights

    const GridMeasure& cell(int i1, int i2) const { return cells[i1 * n2 + i2]; }
    // space average of f(r1, r2, x) against the cylinder measure
    double average(const std::function<double(double, double, double)>& f) const;
};

CylinderMeasure cylinder_invariant(const QuasiPeriodicParent& parent, int n1,
                                   int n2, double burn, const SimConfig& cfg,
                                   const MeasureConfig& mc);

// Time average of f along one lifted trajectory started at (start, x0 = 0),
// sampled every h_avg over [0, T].
double birkhoff_average(const QuasiPeriodicParent& parent,
                        const std::function<double(double, double, double)>& f,
                        const TorusPoint& start, double T, double h_avg,
                        const SimConfig& cfg);

}  // namespace entlab
