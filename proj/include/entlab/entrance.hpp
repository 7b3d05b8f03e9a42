#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entlab/coefficients.hpp"
#include "entlab/measures.hpp"
#include "entlab/simulator.hpp"

namespace entlab {

struct MeasureConfig {
    double lo = -6.0, hi = 6.0;
    int cells = 240;
    double beta = 0.1;
    double tolerance = 0.05;  // consecutive-pair rho_beta threshold
};

struct EntranceEstimate {
    double t = 0.0;
    std::vector<double> starts;             // s_n, strictly decreasing
    std::vector<GridMeasure> estimates;     // one per start
    std::vector<double> consecutive_rho;    // rho_beta(est_n, est_{n+1})
    bool converged = false;
    std::optional<GridMeasure> final_estimate;
};

// Push delta_{x0} from each start to t and watch for rho_beta-Cauchy
// stabilization (two consecutive pairs below tolerance).
EntranceEstimate estimate_entrance(const CoefficientSet& c, double t,
                                   const std::vector<double>& starts, double x0,
                                   const SimConfig& sim, const MeasureConfig& mc);

// Default geometric start ladder s_n = t - 2^n * delta0.
std::vector<double> geometric_starts(double t, double delta0, int count);

// Exact entrance law of dX = f(t) X dt + sigma(t) dW: centered Gaussian with
// variance int_{-inf}^t e^{2 int_u^t f} sigma(u)^2 du (tail-truncated).
GaussianMeasure linear_entrance_exact(const std::function<double(double)>& f,
                                      const std::function<double(double)>& sigma,
                                      double t,
                                      const std::vector<double>& breakpoints = {});

// Exact antiderivative of the piecewise-constant subgeometric forcing f_eps;
// used to evaluate transitions and entrance variance without quadrature.
double linear_f_eps_antiderivative(double t, double eps);

// Exact transition law of the linear SDE started at (s, x).
GaussianMeasure linear_transition(const std::function<double(double)>& f_integral,
                                  const std::function<double(double)>& sigma,
                                  double s, double x, double t);

// (t - s_n, rho_beta) curve against the entrance measure; exact for linear
// SDEs via Gaussian quadrature, otherwise Monte Carlo histograms.
std::vector<std::pair<double, double>> convergence_curve_linear(
    const std::function<double(double)>& f_integral,
    const std::function<double(double)>& sigma, double t, double x,
    const std::vector<double>& starts, const LyapunovSpec& spec);

// m_t = int_{-inf}^t e^{2 int_u^t alpha}(2 Lambda_u + d Gamma1) du.
double m_t_integral(const DissipationEnvelope& env, double t, double gamma1, int d);

// alpha(Delta): sliding-window max of int_s^t alpha with |t-s| <= Delta over
// [t_hi - horizon, t_hi], floored at 0.
double alpha_delta(const DissipationEnvelope& env, double Delta, double horizon,
                   double t_hi = 0.0);

struct ExampleTruth {
    std::string name;
    double expected_alpha_lo = 0.0, expected_alpha_hi = 0.0;
    bool has_exact_invariant = false;
    double invariant_variance = 0.0;
};

std::vector<ExampleTruth> example_catalog();

}  // namespace entlab
