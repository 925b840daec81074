#include "structembed/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace structembed {

void CounterRng::normal_pair_at(std::uint64_t pair_index, double& z0, double& z1) const {
    const double u1 = uniform_at(2 * pair_index);
    const double u2 = uniform_at(2 * pair_index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
}

double CounterRng::normal_at(std::uint64_t index) const {
    double z0, z1;
    normal_pair_at(index / 2, z0, z1);
    return (index % 2 == 0) ? z0 : z1;
}

std::uint64_t CounterRng::below(std::uint64_t index, std::uint64_t bound) const {
    if (bound == 0) throw std::invalid_argument("CounterRng::below: bound must be >= 1");
    // Rejection from the top of the range keeps the draw exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    std::uint64_t sub = 0;
    for (;;) {
        const std::uint64_t x = detail::mix64(u64_at(index) + sub * 0x94D049BB133111EBull);
        if (x <= limit || limit == ~std::uint64_t{0}) return x % bound;
        ++sub;
    }
}

RandomnessBudget sample_gaussian(std::uint64_t seed, std::size_t t) {
    CounterRng rng(seed, /*stream=*/0x67617573);  // "gaus"
    RandomnessBudget b;
    b.seed = seed;
    b.g.resize(t);
    for (std::size_t k = 0; 2 * k < t; ++k) {
        double z0, z1;
        rng.normal_pair_at(k, z0, z1);
        b.g[2 * k] = z0;
        if (2 * k + 1 < t) b.g[2 * k + 1] = z1;
    }
    return b;
}

SignDiagonal sample_signs(std::uint64_t seed, std::size_t n) {
    CounterRng rng(seed, /*stream=*/0x7369676E);  // "sign"
    SignDiagonal s;
    s.seed = seed;
    s.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.d[i] = rng.sign_at(i);
    return s;
}

}  // namespace structembed
