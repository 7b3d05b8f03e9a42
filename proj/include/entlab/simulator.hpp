#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entlab/coefficients.hpp"

namespace entlab {

enum class Scheme { TruncatedEM, TamedEM };

struct SimConfig {
    double h = 1e-3;
    Scheme scheme = Scheme::TruncatedEM;
    double trunc_radius = 10.0;  // ignored by tamed-EM
    std::uint64_t seed = 0;
    std::size_t paths = 1;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
};

struct Ensemble {
    double t = 0.0;
    double s = 0.0;
    std::vector<Vec> samples;
    std::string initial_law;
    SimConfig config;

    std::vector<double> coordinate(int axis = 0) const;
    double second_moment() const;
};

struct BlowUpError : std::runtime_error {
    double time;
    explicit BlowUpError(double t)
        : std::runtime_error("state blow-up at t=" + std::to_string(t)), time(t) {}
};

// Single-path Euler-Maruyama with drift stabilization; records every step.
Trajectory simulate_path(const CoefficientSet& c, double s, const Vec& x, double t,
                         const SimConfig& cfg);

using InitSampler = std::function<Vec(std::uint64_t path, std::uint64_t seed)>;

InitSampler delta_sampler(Vec x);
InitSampler uniform_sampler1d(double lo, double hi);

// Push cfg.paths i.i.d. draws of init from s to t; only terminal states are
// kept. Separable 1D coefficients take a hoisted per-step fast path.
Ensemble push_ensemble(const CoefficientSet& c, double s, const InitSampler& init,
                       double t, const SimConfig& cfg);

double second_moment_bound(const DissipationEnvelope& env, double s, double t,
                           const Vec& x, double gamma1, int d);

struct MomentReport {
    double sample_mean = 0.0;
    double standard_error = 0.0;
    double bound = 0.0;
    bool pass = false;
};

MomentReport check_moment_bound(const Ensemble& e, double bound);

}  // namespace entlab
