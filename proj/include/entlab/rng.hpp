#pragma once

#include <cmath>
#include <cstdint>

namespace entlab {

// Counter-based random numbers: every draw is a pure function of
// (seed, path, step, slot), so ensembles are reproducible no matter how
// work is scheduled across threads.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t path,
                                  std::uint64_t step, std::uint64_t slot = 0) {
    std::uint64_t k = seed;
    k = splitmix64(k ^ (path * 0xd1342543de82ef95ULL));
    k = splitmix64(k ^ (step * 0xaf251af3b0f025b5ULL));
    if (slot != 0) k = splitmix64(k ^ (slot * 0x9e3779b97f4a7c15ULL));
    return k;
}

// Uniform in (0,1), never exactly 0 or 1.
inline double to_uniform(std::uint64_t bits) {
    return (bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

inline double uniform(std::uint64_t seed, std::uint64_t path,
                      std::uint64_t step, std::uint64_t slot = 0) {
    return to_uniform(counter_hash(seed, path, step, slot));
}

// Acklam's rational approximation of the inverse normal CDF,
// relative error below 1.2e-9 over (0,1).
inline double inverse_normal_cdf(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    if (p < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double normal(std::uint64_t seed, std::uint64_t path,
                     std::uint64_t step, std::uint64_t slot = 0) {
    return inverse_normal_cdf(uniform(seed, path, step, slot));
}

}  // namespace rng
}  // namespace entlab
