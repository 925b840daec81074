#include "structembed/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "structembed/fwht.hpp"

namespace structembed {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t base = 0; base < n; base += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[base + j];
                const std::complex<double> v = a[base + j + len / 2] * w;
                a[base + j] = u + v;
                a[base + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv;
    }
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& a) {
    std::vector<std::complex<double>> z(a.begin(), a.end());
    fft(z, /*inverse=*/false);
    return z;
}

std::vector<double> circular_convolve_spectrum(
    const std::vector<double>& a, const std::vector<std::complex<double>>& b_spectrum) {
    const std::size_t n = a.size();
    if (b_spectrum.size() != n)
        throw std::invalid_argument("circular_convolve: operand lengths must match");
    std::vector<std::complex<double>> za(a.begin(), a.end());
    fft(za, /*inverse=*/false);
    for (std::size_t i = 0; i < n; ++i) za[i] *= b_spectrum[i];
    fft(za, /*inverse=*/true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = za[i].real();
    return out;
}

std::vector<double> circular_convolve(const std::vector<double>& a,
                                      const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("circular_convolve: operand lengths must match");
    if (!is_pow2(a.size()))
        throw std::invalid_argument("circular_convolve: length must be a power of two");
    return circular_convolve_spectrum(a, fft_real(b));
}

std::vector<double> circular_convolve_direct(const std::vector<double>& a,
                                             const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n == 0 || b.size() != n)
        throw std::invalid_argument("circular_convolve_direct: operand lengths must match");
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += a[j] * b[(k + n - j) % n];
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace structembed
