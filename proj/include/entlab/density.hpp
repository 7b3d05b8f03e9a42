#pragma once

#include <vector>

#include "entlab/coefficients.hpp"
#include "entlab/measures.hpp"

namespace entlab {

// 4th-order one-step integration of the drift ODE d theta/dt = b(t, theta);
// supports backward time. Throws BlowUpError on |theta| > 1e8.
class Flow {
  public:
    Flow(const CoefficientSet& c, double substep = 1e-3);
    Vec solve(double tau, const Vec& xi, double t) const;

  private:
    const CoefficientSet& c_;
    double h_;
};

// Gaussian surrogate of the frozen-coefficient density: mean x + theta-shift,
// covariance integrated along the frozen flow.
struct FrozenGaussianProxy {
    double tau = 0.0;
    Vec xi;
    Vec theta_shift;   // int_s^t b(r, theta_{r,tau}(xi)) dr
    Mat covariance;    // int_s^t (sigma sigma^T)(r, theta_{r,tau}(xi)) dr
};

FrozenGaussianProxy build_frozen_proxy(const CoefficientSet& c, double tau,
                                       const Vec& xi, double s, double t,
                                       int quad_nodes = 64);

double frozen_density(const CoefficientSet& c, double tau, const Vec& xi, double s,
                      double t, const Vec& x, const Vec& y);

// Parametrix series p = p~ + sum_{j<=n} p~ (x) H^{(x) j}, d = 1, n <= 2.
double parametrix_iterate(const CoefficientSet& c, double tau, double xi, double s,
                          double t, double x, double y, int order);

enum class Boundary { Absorbing, Reflecting };

struct FPGrid {
    double lo = -8.0, hi = 8.0;
    int cells = 1600;
    double dt = 1e-3;
    Boundary boundary = Boundary::Reflecting;
};

struct FPResult {
    GridMeasure density;       // normalized
    double mass_deficit = 0.0; // 1 - raw mass before normalization
};

// Implicit-Euler divergence-form forward Kolmogorov solve from a point mass.
FPResult fp_solve(const CoefficientSet& c, double s, double x0, double t,
                  const FPGrid& grid);

struct LowerBoundParams {
    double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0;
    int d = 1;
    double kappa = 1.0;
    bool calibrated = false;
};

double lower_bound_eval(const LowerBoundParams& p, double dt, const Vec& x,
                        const Vec& y);

LowerBoundParams calibrate_lower_bound(const CoefficientSet& c, double dt,
                                       double x_lo, double x_hi, double y_lo,
                                       double y_hi, const FPGrid& grid);

struct MinorizationResult {
    double eta = 0.0;
    double ball_radius = 0.0;
    double min_density = 0.0;
};

// eta = 2 rho_B * inf_{V(x)<=R, |y|<=rho_B} p(t,s,x,y), nu = normalized
// Lebesgue on the ball. Sweep of FP solves over a grid of starting points.
MinorizationResult minorization(const CoefficientSet& c, double s, double t,
                                double R, double rho_B, const FPGrid& grid,
                                int start_points = 9);

// Two-point comparison inequality between densities at (r, y0) and (t, y).
bool two_point_check(double p_ry0, double p_ty, double bigK, double kappa,
                     double s, double r, double t, double y0, double y);

}  // namespace entlab
