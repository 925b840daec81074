#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace structembed {

/// In-place radix-2 complex transform; length must be a power of two.
/// inverse=true applies the conjugate transform and the 1/n scale.
void fft(std::vector<std::complex<double>>& a, bool inverse);

/// Spectrum of a real vector (power-of-two length), for reuse across many
/// convolutions against the same symbol.
std::vector<std::complex<double>> fft_real(const std::vector<double>& a);

/// Circular convolution out[k] = sum_j a[j] * b[(k - j) mod n] in
/// O(n log n).  Both inputs must share one power-of-two length.
std::vector<double> circular_convolve(const std::vector<double>& a,
                                      const std::vector<double>& b);

/// Same, with the second operand already transformed.
std::vector<double> circular_convolve_spectrum(const std::vector<double>& a,
                                               const std::vector<std::complex<double>>& b_spectrum);

/// O(n^2) direct-sum reference; the oracle the fast path is tested against,
/// and the serial baseline in benchmarks.  Any equal lengths >= 1.
std::vector<double> circular_convolve_direct(const std::vector<double>& a,
                                             const std::vector<double>& b);

}  // namespace structembed
