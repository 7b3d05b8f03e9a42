#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace entlab {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

// Dissipation envelope: <x, b(t,x)> <= alpha_t |x|^2 + Lambda_t, with a
// nondecreasing g dominating the running positive part.
struct DissipationEnvelope {
    std::function<double(double)> alpha;
    std::function<double(double)> lambda;
    std::function<double(double)> g;
    std::vector<double> breakpoints;  // kinks of alpha/lambda for quadrature

    // integral of alpha over [s,t] by adaptive quadrature (tol 1e-9)
    double alpha_integral(double s, double t) const;
};

// Drift is separable when b(t,x) = a1(t) x + a3(t) x^3 + f(t) and
// sigma(t,x) = s(t); every built-in 1D family has this shape, and the
// simulator exploits it for a per-step coefficient hoist.
struct Separable1D {
    std::function<double(double)> a1;
    std::function<double(double)> a3;
    std::function<double(double)> force;
    std::function<double(double)> sig;
};

struct CoefficientSet {
    int d = 1;
    std::function<Vec(double, const Vec&)> drift;
    std::function<Mat(double, const Vec&)> diffusion;
    double gamma1 = 1.0;  // diffusion bound / Lipschitz constant
    double gamma2 = 1.0;  // polynomial growth constant of b
    double kappa = 1.0;   // growth exponent
    DissipationEnvelope envelope;
    std::optional<Separable1D> separable;
    std::string name;
};

// Parent coefficients on two time slots, periodic in each; the diagonal
// restriction recovers the base SDE.
// Cubic-in-space structure of a two-slot drift, declared explicitly so the
// sliced coefficient sets can use the fast separable simulation loop. Must be
// kept consistent with `drift`; reset it when replacing the drift.
struct SeparableQP {
    std::function<double(double, double)> a1;
    std::function<double(double, double)> a3;
    std::function<double(double, double)> force;
    std::function<double(double, double)> sig;
};

struct QuasiPeriodicParent {
    double tau1 = 0.0, tau2 = 0.0;
    std::function<Vec(double, double, const Vec&)> drift;
    std::function<Mat(double, double, const Vec&)> diffusion;
    std::function<double(double, double)> alpha;
    std::function<double(double, double)> lambda;
    std::optional<SeparableQP> separable;

    CoefficientSet diagonal() const;
    // Coefficients of K^{r1,r2}: slot arguments advanced by (r1, r2).
    CoefficientSet slice(double r1, double r2) const;
};

struct TimeChange {
    std::function<double(double)> phi;
    std::function<double(double)> phi_inv;
    std::function<double(double)> phi_inv_prime;

    static TimeChange identity();
    // phi(t) = sign(t) |t|^{1+eps} (odd extension of the power map).
    static TimeChange power(double eps);
};

CoefficientSet truncate_drift(const CoefficientSet& c, double N);
CoefficientSet mollify(const CoefficientSet& c, double eps);
CoefficientSet reparameterize(const CoefficientSet& c, const TimeChange& tc);

double dissipation_integral(const DissipationEnvelope& env, double s, double t);

struct AssumptionReport {
    double max_sigma_bound_violation = 0.0;     // <sigma sigma^T xi,xi> <= G1|xi|^2
    double max_sigma_lipschitz_violation = 0.0; // |sigma(x)-sigma(y)| <= G1|x-y|
    double max_growth_violation = 0.0;          // |b| <= G2(1+|x|^kappa)
    double max_dissipation_violation = 0.0;     // <x,b> <= alpha|x|^2 + Lambda
    double min_diffusion_eigen = 0.0;           // nondegeneracy screen
    double average_alpha = 0.0;                 // (1/T) int_{-T}^0 alpha
    bool dissipative_on_average = false;
    std::vector<std::pair<double, double>> degenerate_intervals;
};

struct SamplingGrid {
    double t_lo = -20.0, t_hi = 0.0;
    int t_cells = 200;
    double x_lo = -5.0, x_hi = 5.0;
    int x_cells = 100;
};

AssumptionReport verify_assumptions(const CoefficientSet& c, const SamplingGrid& grid);

// Built-in families keyed by name; params are family-specific knobs
// (eps, c1, c2, w1, w2, ...). Throws std::invalid_argument for unknown names.
CoefficientSet make_example(const std::string& name,
                            const std::map<std::string, double>& params = {});
std::vector<std::string> example_names();

QuasiPeriodicParent make_quasi_double_well(double c1, double c2, double w1, double w2);

// 1D coefficients from expression strings in variables (t, x); alpha/lambda
// are envelope expressions in t only.
CoefficientSet make_symbolic(const std::string& drift, const std::string& sigma,
                             const std::string& alpha = "0",
                             const std::string& lambda = "0");

}  // namespace entlab
