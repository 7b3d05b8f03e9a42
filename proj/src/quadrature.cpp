#include "entlab/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace entlab {
namespace quad {

namespace {

double simpson(const Fn& f, double a, double fa, double m, double fm, double b,
               double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const Fn& f, double a, double fa, double b, double fb,
                     double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, lm, flm, m, fm);
    const double right = simpson(f, m, fm, rm, frm, b, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double simpson_panel(const Fn& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(f, a, fa, m, fm, b, fb);
    return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace

double adaptive_simpson(const Fn& f, double a, double b, double abs_tol,
                        const std::vector<double>& breakpoints) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> pts{a, b};
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    const double panel_tol = abs_tol / static_cast<double>(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += simpson_panel(f, pts[i], pts[i + 1], panel_tol);
    return sign * total;
}

const Rule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    static std::map<int, Rule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

double gauss_legendre_integrate(const Fn& f, double a, double b, int n) {
    const Rule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
    return s * h;
}

Rule gauss_jacobi_sqrt_singular(double a, double b, int n) {
    if (!(b > a)) throw std::invalid_argument("gauss_jacobi: empty interval");
    // Jacobi weight (1-x)^{-1/2} on [-1,1]; recurrence coefficients for the
    // associated orthogonal polynomials, then Golub-Welsch.
    const double alpha = -0.5, beta = 0.0;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    auto ab2 = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double kk = k;
        double ak;
        if (k == 0 && ab2 + 2.0 != 0.0)
            ak = (beta - alpha) / (ab2 + 2.0);
        else
            ak = (beta * beta - alpha * alpha) /
                 ((2.0 * kk + ab2) * (2.0 * kk + ab2 + 2.0));
        J(k, k) = ak;
        if (k + 1 < n) {
            const double k1 = kk + 1.0;
            double bk;
            if (k == 0)
                bk = 4.0 * (1.0 + alpha) * (1.0 + beta) /
                     ((ab2 + 2.0) * (ab2 + 2.0) * (ab2 + 3.0));
            else
                bk = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab2) /
                     ((2.0 * k1 + ab2) * (2.0 * k1 + ab2) *
                      (2.0 * k1 + ab2 + 1.0) * (2.0 * k1 + ab2 - 1.0));
            J(k, k + 1) = J(k + 1, k) = std::sqrt(bk);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // total mass of (1-x)^{-1/2} on [-1,1] is 2*sqrt(2)
    const double mu0 = 2.0 * std::sqrt(2.0);
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    // Map x in [-1,1] -> r in [a,b] with b-r = (b-a)(1-x)/2; the weight
    // transforms with a factor ((b-a)/2)^{1/2}.
    const double h = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        const double x = es.eigenvalues()(i);
        r.nodes[i] = a + h * (x + 1.0);
        const double w = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        r.weights[i] = w * std::sqrt(h);
    }
    return r;
}

}  // namespace quad
}  // namespace entlab
