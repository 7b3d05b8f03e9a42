#pragma once

#include <functional>
#include <vector>

namespace entlab {
namespace quad {

using Fn = std::function<double(double)>;

// Adaptive Simpson with absolute tolerance. Optional breakpoints split the
// interval so that kinks (sin^+ etc.) sit on panel boundaries.
double adaptive_simpson(const Fn& f, double a, double b, double abs_tol = 1e-9,
                        const std::vector<double>& breakpoints = {});

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1,1], arbitrary n (Newton on Legendre roots).
const Rule& gauss_legendre(int n);

// Integrate f over [a,b] with an n-point Gauss-Legendre rule.
double gauss_legendre_integrate(const Fn& f, double a, double b, int n);

// Gauss-Jacobi rule for the weight (b-r)^{-1/2} on [a,b]:
// \int_a^b f(r)(b-r)^{-1/2} dr  ==  sum_i w_i f(r_i).
// Built by Golub-Welsch for the Jacobi(alpha=-1/2, beta=0) weight.
Rule gauss_jacobi_sqrt_singular(double a, double b, int n);

}  // namespace quad
}  // namespace entlab
