#pragma once

// Signal containers and the frequency-domain DSP kernel: analytic signal,
// envelope, and brick-wall zero-phase band limiting. Epochs are treated as
// circular; no taper or padding is applied.

#include "cvegauss/error.hpp"
#include "cvegauss/fft.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cvegauss {

inline constexpr const char* kHilbertMethod = "fft-onesided";

class Signal {
public:
    explicit Signal(std::vector<double> samples, double sample_rate_hz = 1.0)
        : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
        require(samples_.size() >= 2, "signal too short");
        require(sample_rate_hz_ > 0.0 && std::isfinite(sample_rate_hz_), "sample rate must be positive");
        for (double v : samples_) {
            require(std::isfinite(v), "signal contains non-finite samples");
        }
    }

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
};

struct AnalyticSignal {
    std::vector<Complex> samples;
    double sample_rate_hz = 1.0;
};

struct Envelope {
    std::vector<double> samples;
    double sample_rate_hz = 1.0;
};

/// Pass band in normalized frequency (cycles per sample).
class FilterSpec {
public:
    FilterSpec(double low_cut, double high_cut) : low_(low_cut), high_(high_cut) {
        require(std::isfinite(low_) && std::isfinite(high_), "filter edges must be finite");
        require(high_ > low_, "empty passband");
        require(low_ >= 0.0 && high_ <= 0.5, "filter edges must lie in [0, 0.5]");
    }

    static FilterSpec full_band() { return {0.0, 0.5}; }

    double low_cut() const noexcept { return low_; }
    double high_cut() const noexcept { return high_; }
    bool is_full_band() const noexcept { return low_ == 0.0 && high_ == 0.5; }

    /// True when DFT bin k of an n-point transform lies in the pass band.
    bool passes(std::size_t k, std::size_t n) const noexcept {
        const std::size_t folded = k <= n / 2 ? k : n - k;
        const double f = static_cast<double>(folded) / static_cast<double>(n);
        return f >= low_ && f <= high_;
    }

    friend bool operator==(const FilterSpec&, const FilterSpec&) = default;

private:
    double low_;
    double high_;
};

/// One-sided spectral weight that turns a real spectrum into an analytic one.
inline double analytic_weight(std::size_t k, std::size_t n) noexcept {
    if (k == 0) return 1.0;
    if (2 * k < n) return 2.0;
    if (2 * k == n) return 1.0;
    return 0.0;
}

/// Reusable envelope pipeline for a fixed epoch length: optional demeaning and
/// band limiting folded into the same spectral pass as the Hilbert transform.
/// Holds scratch buffers, so one instance must not be shared between threads.
class EnvelopeExtractor {
public:
    explicit EnvelopeExtractor(std::size_t n) : fft_(n), work_(n), scratch_(n) {
        require(n >= 2, "signal too short");
    }

    std::size_t size() const noexcept { return fft_.size(); }

    void envelope(std::span<const double> samples, const std::optional<FilterSpec>& filter, bool demean,
                  std::span<double> out) {
        analytic(samples, filter, demean);
        for (std::size_t i = 0; i < work_.size(); ++i) {
            out[i] = std::sqrt(std::norm(work_[i]));
        }
    }

    /// Leaves the analytic signal in the internal buffer and returns a view of it.
    std::span<const Complex> analytic(std::span<const double> samples, const std::optional<FilterSpec>& filter,
                                      bool demean) {
        const std::size_t n = size();
        require(samples.size() == n, "epoch length mismatch");
        double offset = 0.0;
        if (demean) {
            for (double v : samples) offset += v;
            offset /= static_cast<double>(n);
        }
        for (std::size_t i = 0; i < n; ++i) {
            work_[i] = Complex(samples[i] - offset, 0.0);
        }
        fft_.forward(work_, scratch_);
        for (std::size_t k = 0; k < n; ++k) {
            double w = analytic_weight(k, n);
            if (filter && !filter->passes(k, n)) w = 0.0;
            work_[k] *= w;
        }
        fft_.inverse(work_, scratch_);
        return work_;
    }

private:
    Fft fft_;
    std::vector<Complex> work_;
    std::vector<Complex> scratch_;
};

inline AnalyticSignal analytic_signal(const Signal& signal) {
    EnvelopeExtractor extractor(signal.size());
    const auto view = extractor.analytic(signal.samples(), std::nullopt, false);
    return {std::vector<Complex>(view.begin(), view.end()), signal.sample_rate_hz()};
}

inline Envelope envelope(const Signal& signal) {
    EnvelopeExtractor extractor(signal.size());
    std::vector<double> out(signal.size());
    extractor.envelope(signal.samples(), std::nullopt, false, out);
    return {std::move(out), signal.sample_rate_hz()};
}

inline Signal zero_phase_bandlimit(const Signal& signal, const FilterSpec& filter) {
    const std::size_t n = signal.size();
    std::vector<Complex> spectrum(n);
    for (std::size_t i = 0; i < n; ++i) spectrum[i] = {signal[i], 0.0};
    const Fft fft(n);
    fft.forward(spectrum);
    for (std::size_t k = 0; k < n; ++k) {
        if (!filter.passes(k, n)) spectrum[k] = 0.0;
    }
    fft.inverse(spectrum);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = spectrum[i].real();
    return Signal(std::move(out), signal.sample_rate_hz());
}

}  // namespace cvegauss
