#include "entlab/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "entlab/rng.hpp"

namespace entlab {

double one_step_zeta(double gamma, double K, double eta, double R, double beta) {
    if (beta < 0.0 || R <= 0.0 || eta < 0.0 || eta >= 1.0)
        throw std::invalid_argument("one_step_zeta: bad arguments");
    const double branch1 = 1.0 - eta + beta * K;
    const double branch2 = (2.0 + beta * (gamma * R + 2.0 * K)) / (2.0 + beta * R);
    return std::max(branch1, branch2);
}

void FiniteChain::verify_hypotheses() const {
    const std::size_t n = size();
    if (n == 0 || n > 20) throw std::invalid_argument("chain: bad state count");
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (double p : P[i]) {
            if (p < -1e-15) throw std::invalid_argument("chain: negative kernel entry");
            row += p;
        }
        if (std::abs(row - 1.0) > 1e-12)
            throw std::invalid_argument("chain: row not stochastic");
    }
    for (std::size_t i = 0; i < n; ++i) {
        double pv = 0.0;
        for (std::size_t j = 0; j < n; ++j) pv += P[i][j] * V[j];
        if (pv > gamma * V[i] + bigK + 1e-12)
            throw std::invalid_argument("chain: Lyapunov drift PV <= gamma V + K violated");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (V[i] > R) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (P[i][j] < eta * nu[j] - 1e-12)
                throw std::invalid_argument(
                    "chain: minorization P(x,.) >= eta nu violated on {V <= R}");
    }
}

std::vector<double> FiniteChain::push(const std::vector<double>& mu) const {
    const std::size_t n = size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j] += mu[i] * P[i][j];
    return out;
}

double FiniteChain::rho(const std::vector<double>& mu1,
                        const std::vector<double>& mu2, double beta) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        s += (1.0 + beta * V[i]) * std::abs(mu1[i] - mu2[i]);
    return s;
}

FiniteChain random_valid_chain(const std::vector<double>& V, double R,
                               std::uint64_t seed) {
    const std::size_t n = V.size();
    if (n == 0 || n > 20)
        throw std::invalid_argument("random_valid_chain: states must be 1..20");
    FiniteChain ch;
    ch.V = V;
    ch.R = R;
    ch.nu.assign(n, 1.0 / n);
    const double eta0 = 0.2 + 0.5 * rng::uniform(seed, 2, 0);
    ch.P.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> q(n);
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            q[j] = 0.05 + rng::uniform(seed, 3 + i, j);
            z += q[j];
        }
        const bool small = ch.V[i] <= ch.R;
        for (std::size_t j = 0; j < n; ++j) {
            const double base = small ? eta0 * ch.nu[j] : 0.0;
            ch.P[i][j] = base + (1.0 - (small ? eta0 : 0.0)) * q[j] / z;
        }
    }
    // derive (eta, K, gamma) from the kernel so the hypotheses hold exactly
    double eta = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ch.V[i] > ch.R) continue;
        for (std::size_t j = 0; j < n; ++j)
            eta = std::min(eta, ch.P[i][j] / ch.nu[j]);
    }
    ch.eta = std::min(eta, 0.999);
    double K = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ch.V[i] > ch.R) continue;
        double pv = 0.0;
        for (std::size_t j = 0; j < n; ++j) pv += ch.P[i][j] * ch.V[j];
        K = std::max(K, pv);
    }
    ch.bigK = K;
    double gamma = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ch.V[i] <= ch.R) continue;
        double pv = 0.0;
        for (std::size_t j = 0; j < n; ++j) pv += ch.P[i][j] * ch.V[j];
        gamma = std::max(gamma, std::max(0.0, pv - K) / ch.V[i]);
    }
    ch.gamma = gamma;
    ch.verify_hypotheses();
    return ch;
}

FiniteChain random_valid_chain(std::size_t states, std::uint64_t seed) {
    if (states == 0 || states > 20)
        throw std::invalid_argument("random_valid_chain: states must be 1..20");
    std::vector<double> V(states);
    for (std::size_t i = 0; i < states; ++i)
        V[i] = 10.0 * rng::uniform(seed, 1, i);
    std::sort(V.begin(), V.end());
    V[0] = 0.0;
    // small set: lower half of the V-range
    const double R = V[states / 2] + 0.1;
    return random_valid_chain(V, R, seed);
}

ChainLemmaReport verify_lemma_finite_chain(const FiniteChain& chain, double beta,
                                           std::size_t trials, std::uint64_t seed) {
    chain.verify_hypotheses();
    ChainLemmaReport rep;
    rep.zeta = one_step_zeta(chain.gamma, chain.bigK, chain.eta, chain.R, beta);
    const std::size_t n = chain.size();
    for (std::size_t trial = 0; trial < trials; ++trial) {
        std::vector<double> mu1(n), mu2(n);
        double z1 = 0.0, z2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mu1[i] = rng::uniform(seed, 100 + trial, i, 1);
            mu2[i] = rng::uniform(seed, 100 + trial, i, 2);
            z1 += mu1[i];
            z2 += mu2[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            mu1[i] /= z1;
            mu2[i] /= z2;
        }
        const double before = chain.rho(mu1, mu2, beta);
        if (before == 0.0) continue;
        const double after = chain.rho(chain.push(mu1), chain.push(mu2), beta);
        const double ratio = after / before;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (ratio > rep.zeta + 1e-12) ++rep.violations;
    }
    return rep;
}

PartitionAnalysis analyze_partition(const std::vector<ScheduleEntry>& schedule,
                                    double delta) {
    if (schedule.empty()) throw std::invalid_argument("analyze_partition: empty schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i].t_lo < schedule[i].t_hi))
            throw std::invalid_argument("analyze_partition: entry not ordered");
        if (i && std::abs(schedule[i].t_hi - schedule[i - 1].t_lo) > 1e-9)
            throw std::invalid_argument("analyze_partition: schedule not contiguous");
    }
    PartitionAnalysis a;
    a.schedule = schedule;
    a.delta = delta;
    const std::size_t N = schedule.size();
    a.n_delta.resize(N);
    a.gamma_bar.resize(N);
    int cnt = 0;
    double sum = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        a.gamma_max = std::max(a.gamma_max, schedule[n].gamma);
        a.k_max = std::max(a.k_max, schedule[n].bigK);
        if (schedule[n].eta >= delta) {
            ++cnt;
            sum += schedule[n].gamma;
        }
        a.n_delta[n] = cnt;
        a.gamma_bar[n] = cnt ? sum / cnt : 0.0;
    }
    // sample the asymptotic conditions over the second half of the horizon
    a.liminf_ratio = std::numeric_limits<double>::max();
    a.limsup_gamma_bar = 0.0;
    for (std::size_t n = N / 2; n < N; ++n) {
        a.liminf_ratio = std::min(a.liminf_ratio,
                                  static_cast<double>(a.n_delta[n]) / (n + 1.0));
        if (a.n_delta[n] > 0)
            a.limsup_gamma_bar = std::max(a.limsup_gamma_bar, a.gamma_bar[n]);
    }
    return a;
}

ConditionReport check_theorem_conditions(const PartitionAnalysis& a, double R,
                                         double varpi, double gamma_star) {
    ConditionReport rep;
    const double gamma = a.gamma_max, K = a.k_max;
    const double gm1 = std::max(gamma - 1.0, 0.0);
    rep.gamma_star_ok = gamma_star < 1.0 - 2.0 * K / R;
    const double rhs = (gm1 * R + 2.0 * K) / (gm1 * R + (1.0 - gamma_star) * R);
    rep.varpi_ok = varpi > rhs;
    rep.ratio_ok = a.liminf_ratio > varpi;
    // the example constructions attain gamma* exactly, so the sampled test
    // is non-strict
    rep.gamma_bar_ok = a.limsup_gamma_bar <= gamma_star + 1e-12;
    rep.all_ok = rep.gamma_star_ok && rep.varpi_ok && rep.ratio_ok && rep.gamma_bar_ok;
    rep.diagnostics =
        "gamma*<1-2K/R: " + std::string(rep.gamma_star_ok ? "ok" : "FAIL") +
        "; varpi>" + std::to_string(rhs) + ": " + (rep.varpi_ok ? "ok" : "FAIL") +
        "; liminf n^d/n=" + std::to_string(a.liminf_ratio) + ">" +
        std::to_string(varpi) + ": " + (rep.ratio_ok ? "ok" : "FAIL") +
        "; limsup gamma_bar=" + std::to_string(a.limsup_gamma_bar) +
        "<=gamma*: " + (rep.gamma_bar_ok ? "ok" : "FAIL");
    return rep;
}

ContractionCertificate select_beta(double gamma, double K, double R, double delta,
                                   double varpi, double gamma_star) {
    const double gm1 = std::max(gamma - 1.0, 0.0);
    if (!(gamma_star < 1.0 - 2.0 * K / R))
        throw std::invalid_argument("select_beta: gamma* < 1 - 2K/R fails");
    const double rhs = (gm1 * R + 2.0 * K) / (gm1 * R + (1.0 - gamma_star) * R);
    if (!(varpi > rhs))
        throw std::invalid_argument("select_beta: varpi condition fails");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("select_beta: delta must be in (0,1)");

    ContractionCertificate cert;
    cert.varpi = varpi;
    cert.gamma_star = gamma_star;
    cert.R = R;
    cert.delta = delta;
    cert.beta1 = K > 0.0
                     ? std::min(delta / (2.0 * K), 2.0 * delta / (R * (2.0 - delta)))
                     : 2.0 * delta / (R * (2.0 - delta));
    cert.c1 = 0.5 * (gm1 * R + 2.0 * K);

    const double num = varpi * ((1.0 - gamma_star) * R - 2.0 * K);
    if (cert.c1 > 0.0) {
        // (1111-2): c1 (1-varpi) (2 + beta2 R) < num, strict, so back off
        const double beta_max = (num / (cert.c1 * (1.0 - varpi)) - 2.0) / R;
        cert.beta2 = cert.beta1 < beta_max ? cert.beta1 : 0.9 * beta_max;
    } else {
        cert.beta2 = cert.beta1;
    }
    if (!(cert.beta2 > 0.0))
        throw std::invalid_argument("select_beta: no feasible beta2");
    cert.c2 = ((1.0 - gamma_star) * R - 2.0 * K) / (2.0 + cert.beta2 * R);

    const double c1 = cert.c1, c2 = cert.c2;
    if (!((1.0 - varpi) * c1 - varpi * c2 < 0.0))
        throw std::logic_error("select_beta: phi'(0) >= 0");
    auto phi = [&](double x) {
        return std::pow(1.0 + c1 * x, 1.0 - varpi) * std::pow(1.0 - c2 * x, varpi);
    };
    // golden-section minimization of the unimodal phi on (0, beta2]
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = cert.beta2;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = phi(x1), f2 = phi(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = phi(x2);
        }
    }
    cert.beta = 0.5 * (lo + hi);
    cert.r = phi(cert.beta);
    if (!(cert.r < 1.0)) throw std::logic_error("select_beta: phi >= 1 at minimum");
    return cert;
}

double ct_constant(const ContractionCertificate& cert, const PartitionAnalysis& a,
                   double t) {
    const auto& sched = a.schedule;
    if (t < sched.back().t_lo)
        throw std::invalid_argument("ct_constant: t below schedule horizon");
    // partition points: t_0 = sched[0].t_hi, t_i = sched[i-1].t_lo; i0 is the
    // 1-based index of the interval whose lower endpoint first falls below t
    std::size_t i0 = 1;
    for (std::size_t i = 0; i < sched.size(); ++i)
        if (t >= sched[i].t_lo) {
            i0 = i + 1;
            break;
        }
    const double ti0 = sched[i0 - 1].t_lo;
    double zeta = 1.0;
    if (t > ti0 + 1e-12)
        zeta = one_step_zeta(sched[i0 - 1].gamma, sched[i0 - 1].bigK, 0.0, cert.R,
                             cert.beta);
    const double n = static_cast<double>(sched.size());
    return zeta * std::pow(1.0 + cert.c1 * cert.beta, n - static_cast<double>(i0)) *
           std::pow(cert.r, -n);
}

UniformCertificate uniform_certificate(double Delta, double gamma_D, double h_D,
                                       double eta_D, double R) {
    if (!(gamma_D < 1.0))
        throw std::invalid_argument("uniform_certificate: gamma_Delta < 1 fails");
    if (!(R > 2.0 * h_D / (1.0 - gamma_D)))
        throw std::invalid_argument(
            "uniform_certificate: R > 2 h_Delta / (1 - gamma_Delta) fails");
    if (!(eta_D > 0.0))
        throw std::invalid_argument("uniform_certificate: eta_Delta > 0 fails");
    UniformCertificate u;
    u.beta = eta_D / (2.0 * h_D);
    u.zeta = std::max(1.0 - eta_D + u.beta * h_D,
                      (2.0 + u.beta * (gamma_D * R + 2.0 * h_D)) / (2.0 + u.beta * R));
    if (!(u.zeta < 1.0)) throw std::logic_error("uniform_certificate: zeta >= 1");
    u.zeta0 = std::max(1.0 + u.beta * h_D,
                       (2.0 + u.beta * h_D * (2.0 + R)) / (2.0 + u.beta * R));
    u.lambda = -std::log(u.zeta) / Delta;
    u.C = u.zeta0 / u.zeta;
    return u;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points,
                 const std::vector<double>& exponent_grid) {
    std::vector<std::pair<double, double>> use;
    for (const auto& [dt, rho] : points) {
        if (rho > 0.0)
            use.emplace_back(dt, rho);
        else
            std::cerr << "fit_rate: dropping nonpositive point at dt=" << dt << "\n";
    }
    if (use.size() < 5)
        throw std::invalid_argument("fit_rate: fewer than 5 usable points");
    RateFit best;
    best.residual = std::numeric_limits<double>::max();
    for (double alpha : exponent_grid) {
        // least squares: log rho = a - lambda dt^alpha
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(use.size());
        for (const auto& [dt, rho] : use) {
            const double x = std::pow(dt, alpha), y = std::log(rho);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = n * sxx - sx * sx;
        if (std::abs(denom) < 1e-300) continue;
        const double slope = (n * sxy - sx * sy) / denom;
        const double inter = (sy - slope * sx) / n;
        double sse = 0.0;
        for (const auto& [dt, rho] : use) {
            const double e = std::log(rho) - (inter + slope * std::pow(dt, alpha));
            sse += e * e;
        }
        if (sse < best.residual) {
            best.residual = sse;
            best.alpha = alpha;
            best.lambda = -slope;
            best.prefactor = std::exp(inter);
        }
    }
    return best;
}

}  // namespace entlab
