#pragma once

// Closed-form envelope laws for zero-mean (Rayleigh) and non-zero-mean
// (Rician) Gaussian noise.

#include "cvegauss/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cvegauss {

/// Coefficient of variation shared by every Rayleigh distribution: sqrt((4 - pi) / pi).
/// Evaluated without std::sqrt so that it is usable in constant expressions.
consteval double motokawa_constant() {
    constexpr double ratio = (4.0 - std::numbers::pi) / std::numbers::pi;
    double x = 0.5;
    for (int i = 0; i < 64; ++i) x = 0.5 * (x + ratio / x);
    return x;
}

inline constexpr double kMotokawa = motokawa_constant();

constexpr double motokawa_m() noexcept { return kMotokawa; }

namespace special {

// Modified Bessel functions of the first kind scaled by exp(-x), x >= 0.
// Power series below the crossover, Hankel asymptotic series above it.
// Relative error of either branch stays below 1e-13.
namespace detail {

inline constexpr double kBesselCrossover = 20.0;

inline double scaled_series(int order, double x) {
    const double half = 0.5 * x;
    const double quarter_sq = half * half;
    double term = order == 0 ? 1.0 : half;  // (x/2)^order / order!
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= quarter_sq / (static_cast<double>(k) * static_cast<double>(k + order));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum * std::exp(-x);
}

inline double scaled_asymptotic(int order, double x) {
    const double mu = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    double previous = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
        const double magnitude = std::abs(term);
        if (magnitude > previous) break;  // series has started to diverge
        sum += term;
        previous = magnitude;
        if (magnitude < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace detail

inline double bessel_i0_scaled(double x) {
    x = std::abs(x);
    return x < detail::kBesselCrossover ? detail::scaled_series(0, x) : detail::scaled_asymptotic(0, x);
}

inline double bessel_i1_scaled(double x) {
    const double ax = std::abs(x);
    const double v = ax < detail::kBesselCrossover ? detail::scaled_series(1, ax) : detail::scaled_asymptotic(1, ax);
    return x < 0.0 ? -v : v;
}

/// Laguerre function L_{1/2}(x) for x <= 0, through the Bessel identity
/// L(x) = e^{x/2} [(1 - x) I0(-x/2) - x I1(-x/2)].
inline double laguerre_half(double x) {
    require(x <= 0.0, "laguerre_half is only defined here for x <= 0");
    const double y = -0.5 * x;
    return (1.0 - x) * bessel_i0_scaled(y) - x * bessel_i1_scaled(y);
}

}  // namespace special

struct RayleighParams {
    double sigma = 1.0;

    explicit RayleighParams(double s) : sigma(s) { require(s > 0.0 && std::isfinite(s), "sigma must be positive"); }
};

struct RicianParams {
    double nu = 0.0;
    double sigma = 1.0;

    RicianParams(double n, double s) : nu(n), sigma(s) {
        require(n >= 0.0 && std::isfinite(n), "nu must be non-negative");
        require(s > 0.0 && std::isfinite(s), "sigma must be positive");
    }
};

struct Moments {
    double mean = 0.0;
    double std = 0.0;
};

inline double rayleigh_pdf(double x, const RayleighParams& params) {
    require(x >= 0.0, "support violation");
    const double s2 = params.sigma * params.sigma;
    return x / s2 * std::exp(-x * x / (2.0 * s2));
}

inline Moments rayleigh_moments(const RayleighParams& params) {
    return {params.sigma * std::sqrt(std::numbers::pi / 2.0),
            params.sigma * std::sqrt((4.0 - std::numbers::pi) / 2.0)};
}

inline double rician_pdf(double x, const RicianParams& params) {
    require(x >= 0.0, "support violation");
    const double s2 = params.sigma * params.sigma;
    const double z = x * params.nu / s2;
    const double d = x - params.nu;
    // exp(-(x^2 + nu^2) / 2s^2) I0(z) == exp(-(x - nu)^2 / 2s^2) * [e^{-z} I0(z)]
    return x / s2 * std::exp(-d * d / (2.0 * s2)) * special::bessel_i0_scaled(z);
}

inline Moments rician_moments(const RicianParams& params) {
    const double s2 = params.sigma * params.sigma;
    const double lag = special::laguerre_half(-params.nu * params.nu / (2.0 * s2));
    const double mean = params.sigma * std::sqrt(std::numbers::pi / 2.0) * lag;
    const double variance = 2.0 * s2 + params.nu * params.nu - (std::numbers::pi * s2 / 2.0) * lag * lag;
    return {mean, std::sqrt(std::max(variance, 0.0))};
}

inline double rician_cv(const RicianParams& params) {
    const Moments m = rician_moments(params);
    return m.std / m.mean;
}

}  // namespace cvegauss
