#pragma once

#include <cstdint>
#include <vector>

namespace structembed {

// Counter-based generator: output i is a stateless mix of (key, i), so any
// index can be generated without stepping through its predecessors.  That is
// what makes chunked parallel sampling reproducible at any thread count.

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Stable key for an independent substream of a seed.  Used to split one
/// user-facing seed into budget / sign-diagonal / h-vector streams.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t k = detail::mix64(seed + detail::kGolden * (stream + 1));
    return detail::mix64(k ^ (stream * 0xBF58476D1CE4E5B9ull + 0x94D049BB133111EBull));
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(derive_stream(seed, stream)) {}

    std::uint64_t u64_at(std::uint64_t index) const {
        return detail::mix64(key_ + (index + 1) * detail::kGolden);
    }

    /// Uniform on (0, 1]; never returns 0, so log() is always safe.
    double uniform_at(std::uint64_t index) const {
        return static_cast<double>((u64_at(index) >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normals via Box-Muller on the counter pair (2k, 2k+1).
    /// normal_pair_at(k) yields outputs 2k and 2k+1 of the stream.
    void normal_pair_at(std::uint64_t pair_index, double& z0, double& z1) const;

    double normal_at(std::uint64_t index) const;

    /// +1.0 or -1.0 with equal probability.
    double sign_at(std::uint64_t index) const {
        return (u64_at(index) >> 63) ? -1.0 : 1.0;
    }

    /// Uniform integer in [0, bound) by rejection; bound >= 1.
    std::uint64_t below(std::uint64_t index, std::uint64_t bound) const;

private:
    std::uint64_t key_;
};

/// The t-length Gaussian budget of randomness a structured matrix is built
/// from.  Deterministic in (seed, t).
struct RandomnessBudget {
    std::uint64_t seed = 0;
    std::vector<double> g;

    std::size_t t() const noexcept { return g.size(); }
};

/// Random +/-1 diagonal, deterministic in (seed, n).
struct SignDiagonal {
    std::uint64_t seed = 0;
    std::vector<double> d;

    std::size_t n() const noexcept { return d.size(); }
};

/// t i.i.d. N(0,1) draws; same (seed, t) always yields the same vector, and
/// a longer draw from the same seed extends the shorter one.
RandomnessBudget sample_gaussian(std::uint64_t seed, std::size_t t);

/// n i.i.d. uniform signs.
SignDiagonal sample_signs(std::uint64_t seed, std::size_t n);

}  // namespace structembed
