#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace entlab {

struct ScheduleEntry {
    double t_hi = 0.0;  // t_{i-1}
    double t_lo = 0.0;  // t_i  (t_lo < t_hi, schedule decreasing)
    double gamma = 0.0;
    double bigK = 0.0;
    double eta = 0.0;
};

struct PartitionAnalysis {
    std::vector<ScheduleEntry> schedule;
    double gamma_max = 0.0;
    double k_max = 0.0;
    double delta = 0.0;
    std::vector<int> n_delta;          // n^delta for each horizon n = 1..N
    std::vector<double> gamma_bar;     // mean gamma over A_n^delta (0 if empty)
    double liminf_ratio = 0.0;         // min over tail of n^delta / n
    double limsup_gamma_bar = 0.0;     // max over tail of gamma_bar
};

struct ConditionReport {
    bool gamma_star_ok = false;   // gamma* < 1 - 2K/R
    bool varpi_ok = false;        // varpi > ((gamma-1)^+ R + 2K) / (... )
    bool ratio_ok = false;        // sampled liminf n^delta/n > varpi
    bool gamma_bar_ok = false;    // sampled limsup gamma_bar <= gamma*
    bool all_ok = false;
    std::string diagnostics;
};

struct ContractionCertificate {
    double beta = 0.0;
    double r = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double varpi = 0.0;
    double gamma_star = 0.0;
    double R = 0.0;
    double delta = 0.0;
};

struct RateFit {
    double alpha = 0.0;
    double lambda = 0.0;
    double prefactor = 0.0;
    double residual = 0.0;
};

// One-step contraction/expansion factor of the weighted-TV semigroup bound.
double one_step_zeta(double gamma, double K, double eta, double R, double beta);

// Discrete chain on n <= 20 states used as an exact oracle for the one-step
// inequality. Hypotheses (Lyapunov drift, minorization on {V <= R}) are
// derived from the kernel by enumeration, so they hold by construction.
struct FiniteChain {
    std::vector<std::vector<double>> P;  // row-stochastic
    std::vector<double> V;
    std::vector<double> nu;              // probability vector
    double gamma = 0.0, bigK = 0.0, eta = 0.0, R = 0.0;

    std::size_t size() const { return V.size(); }
    // max_i | PV(i) - gamma V(i) - K | positive part and minorization slack;
    // throws std::invalid_argument naming the violated inequality.
    void verify_hypotheses() const;
    std::vector<double> push(const std::vector<double>& mu) const;
    double rho(const std::vector<double>& mu1, const std::vector<double>& mu2,
               double beta) const;
};

FiniteChain random_valid_chain(std::size_t states, std::uint64_t seed);
// Same, but with a caller-supplied Lyapunov profile and small-set level, so
// inhomogeneous sequences can share one V (required for telescoping in a
// single rho_beta metric).
FiniteChain random_valid_chain(const std::vector<double>& V, double R,
                               std::uint64_t seed);

struct ChainLemmaReport {
    double zeta = 0.0;
    double max_ratio = 0.0;
    std::size_t violations = 0;
};

ChainLemmaReport verify_lemma_finite_chain(const FiniteChain& chain, double beta,
                                           std::size_t trials,
                                           std::uint64_t seed = 1);

PartitionAnalysis analyze_partition(const std::vector<ScheduleEntry>& schedule,
                                    double delta);

ConditionReport check_theorem_conditions(const PartitionAnalysis& a, double R,
                                         double varpi, double gamma_star);

// beta1 = min{delta/(2K), 2 delta/(R(2-delta))}; beta2 the largest feasible
// value of the linear inequality; beta minimizes phi on (0, beta2].
ContractionCertificate select_beta(double gamma, double K, double R, double delta,
                                   double varpi, double gamma_star);

double ct_constant(const ContractionCertificate& cert,
                   const PartitionAnalysis& a, double t);

struct UniformCertificate {
    double beta = 0.0;
    double zeta = 0.0;
    double zeta0 = 0.0;
    double lambda = 0.0;
    double C = 0.0;
};

UniformCertificate uniform_certificate(double Delta, double gamma_D, double h_D,
                                       double eta_D, double R);

RateFit fit_rate(const std::vector<std::pair<double, double>>& points,
                 const std::vector<double>& exponent_grid);

}  // namespace entlab
