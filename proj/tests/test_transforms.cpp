#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "structembed/fft.hpp"
#include "structembed/fwht.hpp"
#include "structembed/rng.hpp"

using namespace structembed;

TEST_CASE("pad_pow2 rounds up and rejects zero") {
    CHECK(pad_pow2(1) == 1);
    CHECK(pad_pow2(2) == 2);
    CHECK(pad_pow2(3) == 4);
    CHECK(pad_pow2(5) == 8);
    CHECK(pad_pow2(64) == 64);
    CHECK(pad_pow2(65) == 128);
    CHECK_THROWS_AS(pad_pow2(0), std::invalid_argument);
}

TEST_CASE("fwht matches the explicit Hadamard matrix") {
    // H[i][j] = (-1)^popcount(i & j) / sqrt(n), Sylvester ordering.
    for (std::size_t n : {1u, 2u, 4u, 8u, 32u}) {
        const double scale = 1.0 / std::sqrt(double(n));
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> e(n, 0.0);
            e[j] = 1.0;
            fwht(e);
            for (std::size_t i = 0; i < n; ++i) {
                const double expect =
                    (std::popcount(i & j) % 2 ? -1.0 : 1.0) * scale;
                CHECK(e[i] == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("fwht is an involution and an isometry") {
    const CounterRng rng(123);
    for (std::size_t p = 0; p <= 14; ++p) {
        const std::size_t n = std::size_t{1} << p;
        std::vector<double> x(n), orig(n);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.normal_at(p * 100000 + i);
            orig[i] = x[i];
            norm2 += x[i] * x[i];
        }
        fwht(x);
        double norm2_after = 0.0;
        for (double v : x) norm2_after += v * v;
        CHECK(norm2_after == doctest::Approx(norm2).epsilon(1e-12));
        fwht(x);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::fabs(x[i] - orig[i]));
        CHECK(worst <= 1e-12 * std::max(1.0, std::sqrt(norm2)));
    }
    CHECK_THROWS_AS(
        [] {
            std::vector<double> bad(3, 1.0);
            fwht(bad);
        }(),
        std::invalid_argument);
}

TEST_CASE("preprocess is D1 H D0 and an exact isometry") {
    const std::size_t n = 16;
    const SignDiagonal d0 = sample_signs(11, n);
    const SignDiagonal d1 = sample_signs(12, n);
    const CounterRng rng(5);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal_at(i);

    std::vector<double> manual(n);
    for (std::size_t i = 0; i < n; ++i) manual[i] = d0.d[i] * v[i];
    fwht(manual);
    for (std::size_t i = 0; i < n; ++i) manual[i] *= d1.d[i];

    const std::vector<double> got = preprocess(v, d0, d1);
    REQUIRE(got.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == manual[i]);  // bitwise identical

    double in2 = 0.0, out2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        in2 += v[i] * v[i];
        out2 += got[i] * got[i];
    }
    CHECK(out2 == doctest::Approx(in2).epsilon(1e-14));
}

TEST_CASE("fft round-trips and convolution matches the direct sum") {
    const CounterRng rng(42);
    for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.normal_at(2 * n + i);
            b[i] = rng.normal_at(5 * n + i);
        }
        const std::vector<double> fast = circular_convolve(a, b);
        const std::vector<double> slow = circular_convolve_direct(a, b);
        REQUIRE(fast.size() == n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-10));

        const std::vector<double> fast2 = circular_convolve_spectrum(a, fft_real(b));
        for (std::size_t i = 0; i < n; ++i)
            CHECK(fast2[i] == doctest::Approx(slow[i]).epsilon(1e-10));
    }
}

TEST_CASE("circular_convolve_direct handles non-power-of-two lengths") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    const std::vector<double> b = {4.0, 5.0, 6.0};
    // out[k] = sum_j a[j] b[(k - j) mod 3]
    const std::vector<double> expect = {1 * 4 + 2 * 6 + 3 * 5, 1 * 5 + 2 * 4 + 3 * 6,
                                        1 * 6 + 2 * 5 + 3 * 4};
    const std::vector<double> got = circular_convolve_direct(a, b);
    REQUIRE(got.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(expect[i]));
}

TEST_CASE("counter rng: reproducible, extendable, statistically sane") {
    const RandomnessBudget b10 = sample_gaussian(7, 10);
    const RandomnessBudget b100 = sample_gaussian(7, 100);
    REQUIRE(b10.t() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(b10.g[i] == b100.g[i]);  // prefix property

    const std::size_t t = 100000;
    const RandomnessBudget big = sample_gaussian(7, t);
    double mean = 0.0, var = 0.0;
    for (double g : big.g) mean += g;
    mean /= t;
    for (double g : big.g) var += (g - mean) * (g - mean);
    var /= t;
    CHECK(mean > -0.016);
    CHECK(mean < 0.016);
    CHECK(var > 0.95);
    CHECK(var < 1.05);

    const SignDiagonal s = sample_signs(7, t);
    std::size_t plus = 0;
    for (double d : s.d) {
        CHECK((d == 1.0 || d == -1.0));
        if (d == 1.0) ++plus;
    }
    const double frac = double(plus) / t;
    CHECK(frac > 0.492);
    CHECK(frac < 0.508);
}

TEST_CASE("derive_stream separates substreams") {
    CHECK(derive_stream(1, 0) != derive_stream(1, 1));
    CHECK(derive_stream(1, 0) != derive_stream(2, 0));
    const CounterRng a(9, 0), b(9, 1);
    bool all_equal = true;
    for (std::uint64_t i = 0; i < 64; ++i) all_equal = all_equal && a.u64_at(i) == b.u64_at(i);
    CHECK_FALSE(all_equal);
}

TEST_CASE("uniform_at stays in (0, 1] and below() respects its bound") {
    const CounterRng rng(3);
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = rng.uniform_at(i);
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
        CHECK(rng.below(i, 7) < 7);
    }
}
