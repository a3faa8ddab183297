#pragma once

// Mixed-radix Stockham FFT with a Bluestein fallback for lengths that carry a
// large prime factor. Transforms are unnormalized in the forward direction and
// scaled by 1/n in the inverse direction.

#include "cvegauss/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace cvegauss {

using Complex = std::complex<double>;

namespace detail {

// Plain complex product; operator* on std::complex carries C99 Annex G
// NaN/infinity recovery that dominates the inner loops.
inline Complex cmul(const Complex& a, const Complex& b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

/// Precomputed plan for one transform length. Immutable after construction,
/// so a single plan can be shared between threads; each call allocates its own
/// scratch unless the caller passes one in.
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        require(n >= 1, "empty signal");
        radices_ = factorize(n);
        const bool needs_bluestein =
            std::any_of(radices_.begin(), radices_.end(), [](std::size_t p) { return p > kMaxDirectRadix; });
        if (needs_bluestein) {
            radices_.clear();
            init_bluestein();
        } else {
            twiddles_.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                twiddles_[k] = unit_root(k, n);
            }
        }
    }

    std::size_t size() const noexcept { return n_; }

    void forward(std::span<Complex> data) const {
        std::vector<Complex> scratch(n_);
        forward(data, scratch);
    }

    /// In-place forward transform using caller-provided scratch of length size().
    void forward(std::span<Complex> data, std::span<Complex> scratch) const {
        require(data.size() == n_ && scratch.size() >= n_, "fft length mismatch");
        if (bluestein_) {
            run_bluestein(data);
        } else {
            run_stockham(data, scratch.first(n_));
        }
    }

    void inverse(std::span<Complex> data) const {
        std::vector<Complex> scratch(n_);
        inverse(data, scratch);
    }

    void inverse(std::span<Complex> data, std::span<Complex> scratch) const {
        for (auto& v : data) v = std::conj(v);
        forward(data, scratch);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : data) v = std::conj(v) * scale;
    }

private:
    static constexpr std::size_t kMaxDirectRadix = 61;

    static Complex unit_root(std::size_t k, std::size_t n) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        return {std::cos(angle), std::sin(angle)};
    }

    static std::vector<std::size_t> factorize(std::size_t n) {
        std::vector<std::size_t> out;
        while (n % 4 == 0) { out.push_back(4); n /= 4; }
        while (n % 2 == 0) { out.push_back(2); n /= 2; }
        for (std::size_t p = 3; p * p <= n; p += 2) {
            while (n % p == 0) { out.push_back(p); n /= p; }
        }
        if (n > 1) out.push_back(n);
        return out;
    }

    void run_stockham(std::span<Complex> data, std::span<Complex> scratch) const {
        Complex* x = data.data();
        Complex* y = scratch.data();
        std::size_t len = n_;
        std::size_t stride = 1;
        for (std::size_t radix : radices_) {
            stage(len, stride, radix, x, y);
            std::swap(x, y);
            len /= radix;
            stride *= radix;
        }
        if (x != data.data()) {
            std::copy(x, x + n_, data.data());
        }
    }

    // One decimation-in-frequency pass: len = remaining sub-transform length,
    // stride = number of interleaved sub-transforms.
    void stage(std::size_t len, std::size_t stride, std::size_t radix, const Complex* x, Complex* y) const {
        const std::size_t m = len / radix;
        const std::size_t step = n_ / len;      // twiddle index step for exp(-2 pi i / len)
        const std::size_t root_step = n_ / radix;  // index step for exp(-2 pi i / radix)
        Complex a[kMaxDirectRadix];
        Complex b[kMaxDirectRadix];
        Complex w[kMaxDirectRadix];

        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t k = 0; k < radix; ++k) {
                w[k] = twiddles_[p * k * step];  // p * k < len, so the index stays below n
            }
            for (std::size_t q = 0; q < stride; ++q) {
                for (std::size_t j = 0; j < radix; ++j) {
                    a[j] = x[q + stride * (p + m * j)];
                }
                butterfly(radix, root_step, a, b);
                for (std::size_t k = 0; k < radix; ++k) {
                    y[q + stride * (radix * p + k)] = detail::cmul(b[k], w[k]);
                }
            }
        }
    }

    void butterfly(std::size_t radix, std::size_t root_step, const Complex* a, Complex* b) const {
        switch (radix) {
            case 2:
                b[0] = a[0] + a[1];
                b[1] = a[0] - a[1];
                return;
            case 3: {
                constexpr double s60 = 0.86602540378443864676;
                const Complex t1 = a[1] + a[2];
                const Complex t2 = a[0] - 0.5 * t1;
                const Complex d = a[1] - a[2];
                const Complex rot{s60 * d.imag(), -s60 * d.real()};  // -i sin(2pi/3) d
                b[0] = a[0] + t1;
                b[1] = t2 + rot;
                b[2] = t2 - rot;
                return;
            }
            case 5: {
                constexpr double c1 = 0.30901699437494742410;   // cos(2pi/5)
                constexpr double c2 = -0.80901699437494742410;  // cos(4pi/5)
                constexpr double s1 = 0.95105651629515357212;   // sin(2pi/5)
                constexpr double s2 = 0.58778525229247312917;   // sin(4pi/5)
                const Complex t1 = a[1] + a[4];
                const Complex t2 = a[2] + a[3];
                const Complex t3 = a[1] - a[4];
                const Complex t4 = a[2] - a[3];
                const Complex r1 = a[0] + c1 * t1 + c2 * t2;
                const Complex r2 = a[0] + c2 * t1 + c1 * t2;
                const Complex i1 = s1 * t3 + s2 * t4;
                const Complex i2 = s2 * t3 - s1 * t4;
                const Complex j1{i1.imag(), -i1.real()};  // -i * i1
                const Complex j2{i2.imag(), -i2.real()};
                b[0] = a[0] + t1 + t2;
                b[1] = r1 + j1;
                b[4] = r1 - j1;
                b[2] = r2 + j2;
                b[3] = r2 - j2;
                return;
            }
            case 4: {
                const Complex s02 = a[0] + a[2];
                const Complex d02 = a[0] - a[2];
                const Complex s13 = a[1] + a[3];
                const Complex d13 = a[1] - a[3];
                const Complex rot{d13.imag(), -d13.real()};  // -i * d13
                b[0] = s02 + s13;
                b[1] = d02 + rot;
                b[2] = s02 - s13;
                b[3] = d02 - rot;
                return;
            }
            default:
                for (std::size_t k = 0; k < radix; ++k) {
                    Complex acc = a[0];
                    for (std::size_t j = 1; j < radix; ++j) {
                        acc += detail::cmul(a[j], twiddles_[((j * k) % radix) * root_step]);
                    }
                    b[k] = acc;
                }
        }
    }

    // Bluestein: express the length-n DFT as a circular convolution of
    // power-of-two length, evaluated with a nested plan.
    void init_bluestein() {
        std::size_t m = 1;
        while (m < 2 * n_ - 1) m <<= 1;
        bluestein_ = std::make_shared<Fft>(m);
        chirp_.resize(n_);
        const std::size_t two_n = 2 * n_;
        for (std::size_t k = 0; k < n_; ++k) {
            // exp(-i pi k^2 / n), reduced modulo 2n to keep the angle small
            const std::size_t k2 = (k * k) % two_n;
            const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n_);
            chirp_[k] = {std::cos(angle), std::sin(angle)};
        }
        kernel_spectrum_.assign(m, Complex{});
        kernel_spectrum_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            kernel_spectrum_[k] = std::conj(chirp_[k]);
            kernel_spectrum_[m - k] = std::conj(chirp_[k]);
        }
        bluestein_->forward(kernel_spectrum_);
    }

    void run_bluestein(std::span<Complex> data) const {
        const std::size_t m = bluestein_->size();
        std::vector<Complex> work(m, Complex{});
        std::vector<Complex> scratch(m);
        for (std::size_t k = 0; k < n_; ++k) {
            work[k] = detail::cmul(data[k], chirp_[k]);
        }
        bluestein_->forward(work, scratch);
        for (std::size_t k = 0; k < m; ++k) {
            work[k] = detail::cmul(work[k], kernel_spectrum_[k]);
        }
        bluestein_->inverse(work, scratch);
        for (std::size_t k = 0; k < n_; ++k) {
            data[k] = detail::cmul(work[k], chirp_[k]);
        }
    }

    std::size_t n_;
    std::vector<std::size_t> radices_;
    std::vector<Complex> twiddles_;
    std::shared_ptr<const Fft> bluestein_;
    std::vector<Complex> chirp_;
    std::vector<Complex> kernel_spectrum_;
};

inline std::vector<Complex> fft_forward(std::span<const Complex> samples) {
    require(!samples.empty(), "empty signal");
    std::vector<Complex> out(samples.begin(), samples.end());
    Fft(out.size()).forward(out);
    return out;
}

inline std::vector<Complex> fft_inverse(std::span<const Complex> spectrum) {
    require(!spectrum.empty(), "empty signal");
    std::vector<Complex> out(spectrum.begin(), spectrum.end());
    Fft(out.size()).inverse(out);
    return out;
}

}  // namespace cvegauss
