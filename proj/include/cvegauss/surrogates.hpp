#pragma once

// Fourier-transform phase randomization: surrogates with the power spectrum of
// the original signal and independent uniform phases.

#include "cvegauss/error.hpp"
#include "cvegauss/fft.hpp"
#include "cvegauss/parallel.hpp"
#include "cvegauss/random.hpp"
#include "cvegauss/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace cvegauss {

struct SurrogateBatch {
    Signal original;
    std::vector<Signal> surrogates;
    Seed seed;
    /// Largest |imag| left by any inverse transform before it was discarded.
    double max_imag_residue = 0.0;
};

inline SurrogateBatch ftpr(const Signal& signal, std::size_t count, Seed seed,
                           std::size_t workers = default_workers()) {
    const std::size_t n = signal.size();
    require(n >= 4, "surrogates need at least 4 samples");

    const Fft fft(n);
    std::vector<Complex> spectrum(n);
    for (std::size_t i = 0; i < n; ++i) spectrum[i] = {signal[i], 0.0};
    fft.forward(spectrum);

    std::vector<double> magnitude(n);
    for (std::size_t k = 0; k < n; ++k) magnitude[k] = std::abs(spectrum[k]);
    // DC and Nyquist stay real with their original sign.
    auto real_bin = [&](std::size_t k) { return Complex(std::copysign(magnitude[k], spectrum[k].real()), 0.0); };

    std::vector<std::vector<double>> outputs(count);
    std::vector<double> residues(count, 0.0);
    struct Worker {
        std::vector<Complex> work;
        std::vector<Complex> scratch;
    };
    parallel_for(
        count, workers, [&] { return Worker{std::vector<Complex>(n), std::vector<Complex>(n)}; },
        [&](Worker& w, std::size_t index) {
            Xoshiro256 rng(derive_seed(seed, index));
            w.work[0] = real_bin(0);
            for (std::size_t k = 1; 2 * k < n; ++k) {
                const double phase = uniform_phase(rng);
                w.work[k] = std::polar(magnitude[k], phase);
                w.work[n - k] = std::conj(w.work[k]);
            }
            if (n % 2 == 0) w.work[n / 2] = real_bin(n / 2);
            fft.inverse(w.work, w.scratch);
            std::vector<double> out(n);
            double residue = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                out[i] = w.work[i].real();
                residue = std::max(residue, std::abs(w.work[i].imag()));
            }
            outputs[index] = std::move(out);
            residues[index] = residue;
        });

    SurrogateBatch batch{signal, {}, seed, 0.0};
    batch.surrogates.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        batch.surrogates.emplace_back(std::move(outputs[i]), signal.sample_rate_hz());
        batch.max_imag_residue = std::max(batch.max_imag_residue, residues[i]);
    }
    return batch;
}

}  // namespace cvegauss
