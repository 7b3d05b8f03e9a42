#include "entlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "entlab/quadrature.hpp"

namespace entlab {

LyapunovSpec LyapunovSpec::abs_squared(double beta) {
    LyapunovSpec s;
    s.V = [](const std::vector<double>& x) {
        double r = 0.0;
        for (double xi : x) r += xi * xi;
        return r;
    };
    s.beta = beta;
    s.id = "abs2";
    return s;
}

GridMeasure::GridMeasure(std::vector<double> lo, std::vector<double> hi,
                         std::vector<int> resolution)
    : lo_(std::move(lo)), hi_(std::move(hi)), res_(std::move(resolution)) {
    if (lo_.size() != hi_.size() || lo_.size() != res_.size() || lo_.empty() ||
        lo_.size() > 2)
        throw std::invalid_argument("GridMeasure: dimension must be 1 or 2");
    std::size_t n = 1;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!(hi_[i] > lo_[i]) || res_[i] < 1)
            throw std::invalid_argument("GridMeasure: degenerate box");
        n *= static_cast<std::size_t>(res_[i]);
    }
    mass_.assign(n, 0.0);
}

double GridMeasure::cell_width(int axis) const {
    return (hi_[axis] - lo_[axis]) / res_[axis];
}

std::vector<double> GridMeasure::cell_center(std::size_t idx) const {
    std::vector<double> c(lo_.size());
    for (std::size_t a = 0; a < lo_.size(); ++a) {
        const std::size_t k = idx % static_cast<std::size_t>(res_[a]);
        idx /= static_cast<std::size_t>(res_[a]);
        c[a] = lo_[a] + (k + 0.5) * cell_width(static_cast<int>(a));
    }
    return c;
}

double GridMeasure::boundary_radius() const {
    double r = 0.0;
    for (std::size_t a = 0; a < lo_.size(); ++a) {
        const double m = std::max(std::abs(lo_[a]), std::abs(hi_[a]));
        r += m * m;
    }
    return std::sqrt(r);
}

bool GridMeasure::same_grid(const GridMeasure& o) const {
    return lo_ == o.lo_ && hi_ == o.hi_ && res_ == o.res_;
}

double GridMeasure::total_mass() const {
    double s = leak_;
    for (double m : mass_) s += m;
    return s;
}

void GridMeasure::normalize() {
    const double s = total_mass();
    if (s <= 0.0) throw std::invalid_argument("GridMeasure: zero total mass");
    for (double& m : mass_) m /= s;
    leak_ /= s;
}

void GridMeasure::deposit(const std::vector<std::vector<double>>& samples) {
    if (samples.empty()) throw std::invalid_argument("deposit: empty samples");
    const double w = 1.0 / samples.size();
    for (const auto& x : samples) {
        std::size_t idx = 0, stride = 1;
        bool inside = true;
        for (std::size_t a = 0; a < lo_.size(); ++a) {
            const double u = (x[a] - lo_[a]) / cell_width(static_cast<int>(a));
            const long k = static_cast<long>(std::floor(u));
            if (k < 0 || k >= res_[a]) {
                inside = false;
                break;
            }
            idx += stride * static_cast<std::size_t>(k);
            stride *= static_cast<std::size_t>(res_[a]);
        }
        if (inside)
            mass_[idx] += w;
        else
            leak_ += w;
    }
}

void GridMeasure::deposit1d(const std::vector<double>& samples) {
    if (samples.empty()) throw std::invalid_argument("deposit1d: empty samples");
    const double w = 1.0 / samples.size();
    const double width = cell_width(0);
    for (double x : samples) {
        const long k = static_cast<long>(std::floor((x - lo_[0]) / width));
        if (k < 0 || k >= res_[0])
            leak_ += w;
        else
            mass_[static_cast<std::size_t>(k)] += w;
    }
}

double GridMeasure::second_moment() const {
    double s = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        if (mass_[i] == 0.0) continue;
        const auto c = cell_center(i);
        double r = 0.0;
        for (double ci : c) r += ci * ci;
        s += mass_[i] * r;
    }
    return s;
}

double GridMeasure::mean1d() const {
    if (dimension() != 1) throw std::invalid_argument("mean1d: not 1D");
    double s = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i)
        s += mass_[i] * (lo_[0] + (i + 0.5) * cell_width(0));
    return s;
}

GridMeasure density_estimate(const std::vector<std::vector<double>>& samples,
                             std::vector<double> lo, std::vector<double> hi,
                             std::vector<int> resolution) {
    GridMeasure g(std::move(lo), std::move(hi), std::move(resolution));
    g.deposit(samples);
    return g;
}

GridMeasure density_estimate1d(const std::vector<double>& samples, double lo,
                               double hi, int cells) {
    GridMeasure g({lo}, {hi}, {cells});
    g.deposit1d(samples);
    return g;
}

double total_variation(const GridMeasure& m1, const GridMeasure& m2) {
    if (!m1.same_grid(m2)) throw std::invalid_argument("total_variation: grid mismatch");
    double s = std::abs(m1.leak() - m2.leak());
    const auto& a = m1.masses();
    const auto& b = m2.masses();
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

namespace {

double wasserstein1_1d(const GridMeasure& m1, const GridMeasure& m2) {
    // integral of |CDF1 - CDF2|; leak is ignored (boxes must be chosen so
    // leak is negligible for this to be meaningful).
    const auto& a = m1.masses();
    const auto& b = m2.masses();
    const double w = m1.cell_width(0);
    double c1 = 0.0, c2 = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        c1 += a[i];
        c2 += b[i];
        s += std::abs(c1 - c2) * w;
    }
    return s;
}

double wasserstein1_sinkhorn(const GridMeasure& m1, const GridMeasure& m2) {
    const double eps_reg = 1e-2;
    const int iters = 500;
    std::vector<std::size_t> ia, ib;
    std::vector<double> wa, wb;
    for (std::size_t i = 0; i < m1.masses().size(); ++i)
        if (m1.masses()[i] > 0) { ia.push_back(i); wa.push_back(m1.masses()[i]); }
    for (std::size_t i = 0; i < m2.masses().size(); ++i)
        if (m2.masses()[i] > 0) { ib.push_back(i); wb.push_back(m2.masses()[i]); }
    if (ia.empty() || ib.empty()) return 0.0;
    double sa = 0.0, sb = 0.0;
    for (double v : wa) sa += v;
    for (double v : wb) sb += v;
    for (double& v : wa) v /= sa;
    for (double& v : wb) v /= sb;
    const std::size_t n = ia.size(), m = ib.size();
    std::vector<double> cost(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ci = m1.cell_center(ia[i]);
        for (std::size_t j = 0; j < m; ++j) {
            const auto cj = m2.cell_center(ib[j]);
            double d = 0.0;
            for (std::size_t a2 = 0; a2 < ci.size(); ++a2)
                d += (ci[a2] - cj[a2]) * (ci[a2] - cj[a2]);
            cost[i * m + j] = std::sqrt(d);
        }
    }
    std::vector<double> K(n * m);
    for (std::size_t k = 0; k < K.size(); ++k) K[k] = std::exp(-cost[k] / eps_reg);
    std::vector<double> u(n, 1.0), v(m, 1.0);
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += K[i * m + j] * v[j];
            u[i] = wa[i] / std::max(s, 1e-300);
        }
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += K[i * m + j] * u[i];
            v[j] = wb[j] / std::max(s, 1e-300);
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            total += u[i] * K[i * m + j] * v[j] * cost[i * m + j];
    return total;
}

}  // namespace

double wasserstein1(const GridMeasure& m1, const GridMeasure& m2) {
    if (!m1.same_grid(m2)) throw std::invalid_argument("wasserstein1: grid mismatch");
    if (m1.dimension() == 1) return wasserstein1_1d(m1, m2);
    if (m1.dimension() == 2) return wasserstein1_sinkhorn(m1, m2);
    throw std::invalid_argument("wasserstein1: unsupported dimension");
}

double rho_beta(const GridMeasure& m1, const GridMeasure& m2,
                const LyapunovSpec& spec) {
    if (!m1.same_grid(m2)) throw std::invalid_argument("rho_beta: grid mismatch");
    const auto& a = m1.masses();
    const auto& b = m2.masses();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (d == 0.0) continue;
        s += (1.0 + spec.beta * spec.V(m1.cell_center(i))) * d;
    }
    const double r = m1.boundary_radius();
    s += (1.0 + spec.beta * spec.V(std::vector<double>{r})) *
         std::abs(m1.leak() - m2.leak());
    return s;
}

double gaussian_density1d(double mean, double var, double x) {
    const double z = x - mean;
    return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * M_PI * var);
}

double gaussian_rho_beta(const GaussianMeasure& g1, const GaussianMeasure& g2,
                         const LyapunovSpec& spec) {
    if (g1.mean.size() != 1 || g2.mean.size() != 1)
        throw std::invalid_argument("gaussian_rho_beta: 1D only");
    const double m1 = g1.mean[0], v1 = g1.cov[0][0];
    const double m2 = g2.mean[0], v2 = g2.cov[0][0];
    if (!(v1 > 0.0) || !(v2 > 0.0))
        throw std::invalid_argument("gaussian_rho_beta: degenerate variance");
    if (spec.id != "abs2") {
        // general Lyapunov weight: adaptive quadrature over the joint support
        const double s1 = std::sqrt(v1), s2 = std::sqrt(v2);
        const double lo = std::min(m1 - 12.0 * s1, m2 - 12.0 * s2);
        const double hi = std::max(m1 + 12.0 * s1, m2 + 12.0 * s2);
        auto f = [&](double x) {
            const double d = std::abs(gaussian_density1d(m1, v1, x) -
                                      gaussian_density1d(m2, v2, x));
            return (1.0 + spec.beta * spec.V(std::vector<double>{x})) * d;
        };
        return quad::adaptive_simpson(f, lo, hi, 1e-10, {m1, m2, 0.5 * (m1 + m2)});
    }
    // the log-density difference is a quadratic, so the sign of p1 - p2 is
    // constant between its real roots; on each piece the weighted mass
    // integrates in closed form through the Gaussian cdf and second moment,
    // which keeps the result exact even when the distance is near underflow
    const double A = 0.5 / v1 - 0.5 / v2;
    const double B = -m1 / v1 + m2 / v2;
    const double C =
        0.5 * m1 * m1 / v1 - 0.5 * m2 * m2 / v2 + 0.5 * std::log(v1 / v2);
    std::vector<double> cuts;
    if (std::abs(A) < 1e-300) {
        if (std::abs(B) > 1e-300) cuts.push_back(-C / B);
    } else {
        const double disc = B * B - 4.0 * A * C;
        if (disc > 0.0) {
            const double rt = std::sqrt(disc);
            cuts.push_back((-B - rt) / (2.0 * A));
            cuts.push_back((-B + rt) / (2.0 * A));
            std::sort(cuts.begin(), cuts.end());
        }
    }
    const double inf = std::numeric_limits<double>::infinity();
    auto std_pdf = [](double z) {
        return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    };
    auto std_cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    // int_a^b (1 + beta x^2) N(m, v) dx
    auto piece = [&](double a, double b, double m, double v) {
        const double sd = std::sqrt(v);
        const double za = std::isinf(a) ? -40.0 : std::clamp((a - m) / sd, -40.0, 40.0);
        const double zb = std::isinf(b) ? 40.0 : std::clamp((b - m) / sd, -40.0, 40.0);
        const double dP = std_cdf(zb) - std_cdf(za);
        const double x2 = m * m * dP + 2.0 * m * sd * (std_pdf(za) - std_pdf(zb)) +
                          v * (dP + za * std_pdf(za) - zb * std_pdf(zb));
        return dP + spec.beta * x2;
    };
    std::vector<double> pts;
    pts.push_back(-inf);
    for (double c : cuts) pts.push_back(c);
    pts.push_back(inf);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += std::abs(piece(pts[i], pts[i + 1], m1, v1) -
                          piece(pts[i], pts[i + 1], m2, v2));
    return total;
}

}  // namespace entlab
