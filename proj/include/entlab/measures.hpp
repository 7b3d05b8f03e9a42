#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace entlab {

// Lyapunov weight for the rho_beta distance: integrate (1 + beta V) against
// the variation measure. Default V(x) = |x|^2.
struct LyapunovSpec {
    std::function<double(const std::vector<double>&)> V;
    double beta = 1.0;
    std::string id = "abs2";

    static LyapunovSpec abs_squared(double beta);
};

// Axis-aligned histogram measure on R^d, d in {1,2}. Mass that falls outside
// the box is accumulated in a single leak scalar so the total stays 1.
class GridMeasure {
  public:
    GridMeasure(std::vector<double> lo, std::vector<double> hi,
                std::vector<int> resolution);

    int dimension() const { return static_cast<int>(lo_.size()); }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    const std::vector<int>& resolution() const { return res_; }
    const std::vector<double>& masses() const { return mass_; }
    std::vector<double>& masses() { return mass_; }
    double leak() const { return leak_; }
    double& leak() { return leak_; }

    std::size_t cell_count() const { return mass_.size(); }
    std::vector<double> cell_center(std::size_t flat_index) const;
    double cell_width(int axis) const;
    // Largest |x| attainable on the box boundary; V-weight proxy for leaked mass.
    double boundary_radius() const;

    bool same_grid(const GridMeasure& other) const;
    double total_mass() const;
    void normalize();

    // Deposit samples with equal weight (half-open cells, left-closed).
    void deposit(const std::vector<std::vector<double>>& samples);
    void deposit1d(const std::vector<double>& samples);

    // Second moment of the grid part (cell centers), ignoring leak.
    double second_moment() const;
    double mean1d() const;

  private:
    std::vector<double> lo_, hi_;
    std::vector<int> res_;
    std::vector<double> mass_;
    double leak_ = 0.0;
};

struct GaussianMeasure {
    std::vector<double> mean;
    std::vector<std::vector<double>> cov;
};

GridMeasure density_estimate(const std::vector<std::vector<double>>& samples,
                             std::vector<double> lo, std::vector<double> hi,
                             std::vector<int> resolution);
GridMeasure density_estimate1d(const std::vector<double>& samples, double lo,
                               double hi, int cells);

// Half-sum convention: returns (1/2) sum |m1 - m2| including the leak cells,
// so values lie in [0,1]. The full Jordan variation mass is twice this.
double total_variation(const GridMeasure& m1, const GridMeasure& m2);

// 1D: exact, integral of |CDF1 - CDF2|. 2D: entropic regularization
// (eps_reg = 1e-2, 500 scaling iterations), diagnostic quality only.
double wasserstein1(const GridMeasure& m1, const GridMeasure& m2);

// Full-mass weighted variation: sum over cells of (1 + beta V(center))|dm|
// plus (1 + beta V_at_boundary_radius)|dleak|.
double rho_beta(const GridMeasure& m1, const GridMeasure& m2,
                const LyapunovSpec& spec);

// 1D semi-analytic rho_beta between Gaussians by adaptive quadrature of
// the weighted density difference (tolerance 1e-8).
double gaussian_rho_beta(const GaussianMeasure& g1, const GaussianMeasure& g2,
                         const LyapunovSpec& spec);

double gaussian_density1d(double mean, double var, double x);

}  // namespace entlab
