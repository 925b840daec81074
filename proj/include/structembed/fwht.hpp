#pragma once

#include <cstddef>
#include <vector>

#include "structembed/rng.hpp"

namespace structembed {

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Smallest power of two >= n.  n must be >= 1.
std::size_t pad_pow2(std::size_t n);

/// In-place orthonormal Walsh-Hadamard transform (Sylvester ordering,
/// scaled by 1/sqrt(n); applying it twice returns the input).
/// Length must be a power of two.
void fwht(std::vector<double>& x);

/// The randomness-recycling preconditioner: v -> D1 * H * (D0 * v) with H
/// the orthonormal Walsh-Hadamard matrix.  An exact isometry built from two
/// sign flips and one transform; spreads any fixed vector's mass across all
/// coordinates with high probability.
std::vector<double> preprocess(const std::vector<double>& v, const SignDiagonal& d0,
                               const SignDiagonal& d1);

}  // namespace structembed
