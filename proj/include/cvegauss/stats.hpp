#pragma once

#include "cvegauss/error.hpp"
#include "cvegauss/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cvegauss {

inline constexpr const char* kStdDivisor = "n-1";

struct EnvelopeStats {
    double mean = 0.0;
    double std = 0.0;
    double cve = 0.0;
    std::size_t n = 0;
};

/// Options shared by every CVE evaluation; calibration tables record them so
/// that a table is only ever applied through the pipeline that built it.
struct PipelineOptions {
    std::optional<FilterSpec> filter;
    bool demean = false;
};

inline EnvelopeStats cve_of_samples(std::span<const double> env) {
    require(env.size() >= 2, "envelope too short");
    const double n = static_cast<double>(env.size());
    double mean = 0.0;
    for (double v : env) mean += v;
    mean /= n;
    require(mean > 0.0, "undefined CVE (zero-mean envelope)");
    double ss = 0.0;
    for (double v : env) ss += (v - mean) * (v - mean);
    const double std = std::sqrt(ss / (n - 1.0));
    return {mean, std, std / mean, env.size()};
}

inline EnvelopeStats cve_of_envelope(const Envelope& env) { return cve_of_samples(env.samples); }

/// Epoch-length-bound CVE evaluator reusing one FFT plan and its buffers.
/// Not thread-safe; give each worker its own instance.
class CveEvaluator {
public:
    CveEvaluator(std::size_t n, PipelineOptions options)
        : extractor_(n), options_(std::move(options)), env_(n) {}

    std::size_t size() const noexcept { return extractor_.size(); }
    const PipelineOptions& options() const noexcept { return options_; }

    EnvelopeStats operator()(std::span<const double> samples) {
        extractor_.envelope(samples, options_.filter, options_.demean, env_);
        return cve_of_samples(env_);
    }

private:
    EnvelopeExtractor extractor_;
    PipelineOptions options_;
    std::vector<double> env_;
};

inline EnvelopeStats cve_of_signal(const Signal& signal, const std::optional<FilterSpec>& filter = std::nullopt,
                                   bool demean = false) {
    if (!filter && !demean) {
        return cve_of_envelope(envelope(signal));
    }
    CveEvaluator eval(signal.size(), {filter, demean});
    return eval(signal.samples());
}

struct MomentStats {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    std::size_t n = 0;
};

namespace detail {

struct CentralMoments {
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

inline CentralMoments central_moments(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    CentralMoments m;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    m.m2 /= n;
    m.m3 /= n;
    m.m4 /= n;
    // Relative threshold: a sample of identical values can leave rounding residue.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    require(m.m2 > 1e-28 * scale * scale && m.m2 > 0.0, "degenerate sample");
    return m;
}

}  // namespace detail

/// Moment-form skewness m3 / m2^(3/2).
inline double skewness(std::span<const double> samples) {
    require(samples.size() >= 3, "skewness needs at least 3 samples");
    const auto m = detail::central_moments(samples);
    return m.m3 / std::pow(m.m2, 1.5);
}

/// Moment-form excess kurtosis m4 / m2^2 - 3.
inline double excess_kurtosis(std::span<const double> samples) {
    require(samples.size() >= 4, "kurtosis needs at least 4 samples");
    const auto m = detail::central_moments(samples);
    return m.m4 / (m.m2 * m.m2) - 3.0;
}

inline MomentStats moment_stats(std::span<const double> samples) {
    require(samples.size() >= 4, "moment statistics need at least 4 samples");
    const auto m = detail::central_moments(samples);
    return {m.m3 / std::pow(m.m2, 1.5), m.m4 / (m.m2 * m.m2) - 3.0, samples.size()};
}

}  // namespace cvegauss
