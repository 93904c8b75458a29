#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "herzlab/common.hpp"

namespace herzlab {
namespace fft {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Iterative radix-2 Cooley-Tukey; size must be a power of two.
/// inverse = true applies the conjugate transform and divides by N.
inline void transform(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a nonzero power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    // precomputed twiddle table w_n^k, k < n/2
    static thread_local std::vector<std::complex<double>> twiddle;
    static thread_local std::size_t twiddle_n = 0;
    if (twiddle_n != n) {
        twiddle.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
            twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * double(k) / double(n));
        twiddle_n = n;
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = twiddle[k * step];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / double(n);
        for (auto& z : a) z *= scale;
    }
}

/// Row-column 2-d transform of row-major data (rows x cols, both powers of two).
inline void transform_2d(std::vector<std::complex<double>>& a, std::size_t rows,
                         std::size_t cols, bool inverse) {
    if (a.size() != rows * cols) throw std::invalid_argument("fft: bad 2-d buffer size");
    std::vector<std::complex<double>> line;
    for (std::size_t r = 0; r < rows; ++r) {
        line.assign(a.begin() + r * cols, a.begin() + (r + 1) * cols);
        transform(line, inverse);
        std::copy(line.begin(), line.end(), a.begin() + r * cols);
    }
    line.resize(rows);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) line[r] = a[r * cols + c];
        transform(line, inverse);
        for (std::size_t r = 0; r < rows; ++r) a[r * cols + c] = line[r];
    }
}

/// Circular convolution of two complex buffers of equal power-of-two size.
inline std::vector<std::complex<double>> convolve(std::vector<std::complex<double>> a,
                                                  std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) throw std::invalid_argument("fft convolve: size mismatch");
    transform(a, false);
    transform(b, false);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    transform(a, true);
    return a;
}

} // namespace fft
} // namespace herzlab
