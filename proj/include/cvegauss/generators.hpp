#pragma once

// Seeded stimulus generators. Every generator is a pure function of its
// parameters and seed.

#include "cvegauss/error.hpp"
#include "cvegauss/random.hpp"
#include "cvegauss/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace cvegauss {

inline Signal gaussian_noise(std::size_t n, double mean, double sigma, Seed seed) {
    require(n >= 2, "signal too short");
    require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
    require(std::isfinite(mean), "mean must be finite");
    Xoshiro256 rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = mean + sigma * standard_normal(rng);
    return Signal(std::move(out));
}

/// Fills `out` with iid standard normal draws; the allocation-free form of gaussian_noise.
inline void fill_standard_normal(std::span<double> out, Seed seed) {
    Xoshiro256 rng(seed);
    for (auto& v : out) v = standard_normal(rng);
}

/// Tone amplitude whose mean power A^2/2 sits `snr_db` above unit noise variance.
inline double tone_amplitude_for_snr(double snr_db) { return std::sqrt(2.0 * std::pow(10.0, snr_db / 10.0)); }

inline Signal noisy_sinusoid(std::size_t n, double freq_norm, double snr_db, Seed seed) {
    require(n >= 2, "signal too short");
    require(freq_norm > 0.0 && freq_norm < 0.5, "frequency must lie in (0, 0.5)");
    require(std::isfinite(snr_db), "snr must be finite");
    Xoshiro256 rng(seed);
    const double phase = uniform_phase(rng);
    const double amplitude = tone_amplitude_for_snr(snr_db);
    const double omega = 2.0 * std::numbers::pi * freq_norm;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = amplitude * std::sin(omega * static_cast<double>(k) + phase) + standard_normal(rng);
    }
    return Signal(std::move(out));
}

inline Signal two_tone(std::size_t n, double freq_norm, double a_sin, double a_cos) {
    require(n >= 2, "signal too short");
    require(freq_norm > 0.0 && freq_norm < 0.5, "frequency must lie in (0, 0.5)");
    require(std::isfinite(a_sin) && std::isfinite(a_cos), "amplitudes must be finite");
    const double omega = 2.0 * std::numbers::pi * freq_norm;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = omega * static_cast<double>(k);
        out[k] = a_sin * std::sin(x) + a_cos * std::cos(x);
    }
    return Signal(std::move(out));
}

struct PulseShape {
    enum class Kind { ExponentialDecay, GaussianBump };

    Kind kind = Kind::ExponentialDecay;
    double width = 8.0;  // decay constant tau, or bump standard deviation, in samples
    double amplitude = 1.0;

    static PulseShape exponential(double tau, double amplitude = 1.0) {
        return {Kind::ExponentialDecay, tau, amplitude};
    }
    static PulseShape gaussian(double width, double amplitude = 1.0) {
        return {Kind::GaussianBump, width, amplitude};
    }

    void validate() const {
        require(width > 0.0 && std::isfinite(width), "pulse width must be positive");
        require(std::isfinite(amplitude), "pulse amplitude must be finite");
    }

    /// Integral of one pulse over the real line.
    double area() const {
        return kind == Kind::ExponentialDecay ? amplitude * width
                                              : amplitude * width * std::sqrt(2.0 * std::numbers::pi);
    }

    /// Onsets this far before the epoch (or after it, for the symmetric bump)
    /// still contribute measurably and are simulated.
    double reach() const { return kind == Kind::ExponentialDecay ? 40.0 * width : 8.0 * width; }

    std::string name() const { return kind == Kind::ExponentialDecay ? "exponential" : "gaussian"; }
};

/// Event times of a homogeneous Poisson process with `rate` events per sample
/// on [begin, end), drawn as cumulative exponential gaps.
inline std::vector<double> poisson_onsets(double begin, double end, double rate, Xoshiro256& rng) {
    require(rate > 0.0 && std::isfinite(rate), "rate must be positive");
    std::vector<double> onsets;
    double t = begin;
    for (;;) {
        t += -std::log(uniform_open(rng)) / rate;
        if (t >= end) break;
        onsets.push_back(t);
    }
    return onsets;
}

struct PoissonRealization {
    Signal signal;
    std::vector<double> onsets;  // every simulated onset, including those outside [0, n)
};

/// Shot noise: pulses at Poisson onsets, centred by subtracting the
/// stationary mean rate * area so the process is zero-mean.
inline PoissonRealization filtered_poisson_realization(std::size_t n, double rate, const PulseShape& shape,
                                                       Seed seed) {
    require(n >= 2, "signal too short");
    shape.validate();
    Xoshiro256 rng(seed);
    const double reach = shape.reach();
    const bool symmetric = shape.kind == PulseShape::Kind::GaussianBump;
    const double end = static_cast<double>(n) + (symmetric ? reach : 0.0);
    auto onsets = poisson_onsets(-reach, end, rate, rng);

    std::vector<double> out(n, -rate * shape.area());
    if (shape.kind == PulseShape::Kind::ExponentialDecay) {
        // Accumulate impulses on a grid that starts `lead` samples early, then
        // run the one-pole recursion exp(-1/tau).
        const auto lead = static_cast<std::size_t>(std::ceil(reach));
        std::vector<double> grid(n + lead, 0.0);
        for (double t : onsets) {
            const double first = std::ceil(t);
            const auto idx = static_cast<std::ptrdiff_t>(first) + static_cast<std::ptrdiff_t>(lead);
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(grid.size())) continue;
            grid[static_cast<std::size_t>(idx)] += shape.amplitude * std::exp(-(first - t) / shape.width);
        }
        const double decay = std::exp(-1.0 / shape.width);
        double state = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            state = state * decay + grid[i];
            if (i >= lead) out[i - lead] += state;
        }
    } else {
        const double inv = 1.0 / (2.0 * shape.width * shape.width);
        for (double t : onsets) {
            const auto lo = static_cast<std::ptrdiff_t>(std::max(0.0, std::ceil(t - reach)));
            const auto hi = static_cast<std::ptrdiff_t>(std::min(static_cast<double>(n) - 1.0, std::floor(t + reach)));
            for (std::ptrdiff_t k = lo; k <= hi; ++k) {
                const double d = static_cast<double>(k) - t;
                out[static_cast<std::size_t>(k)] += shape.amplitude * std::exp(-d * d * inv);
            }
        }
    }
    return {Signal(std::move(out)), std::move(onsets)};
}

inline Signal filtered_poisson(std::size_t n, double rate, const PulseShape& shape, Seed seed) {
    return filtered_poisson_realization(n, rate, shape, seed).signal;
}

}  // namespace cvegauss
