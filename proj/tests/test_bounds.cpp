#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "structembed/bounds.hpp"
#include "structembed/rng.hpp"
#include "structembed/verify.hpp"

using namespace structembed;

namespace {

Theorem1Params small_params() {
    Theorem1Params p;
    p.N = 10;
    p.k = 2;
    p.m = 4;
    p.n = 16;
    p.chi = 1.0;
    p.mu = 1.0;
    p.eps = 0.1;
    p.K = 0.5;
    p.m_bar = 2;
    p.p_lambda_eps = 0.1;
    p.rho.assign(8, 0.1);
    p.delta_M = 0.01;
    p.delta_lambda = 0.02;
    return p;
}

}  // namespace

TEST_CASE("closed-form evaluators match frozen hand values") {
    // 2*sqrt(2)*m*eps/pi + 2/(pi m^2) at m=10, eps=0.01
    CHECK(p0_eps_angular(10, 0.01) == doctest::Approx(0.0963979).epsilon(1e-5));
    // m^-tau + 1/ln m
    CHECK(cor1_threshold(256, 0.25) == doctest::Approx(0.43033688011112).epsilon(1e-10));
    CHECK(cor1_threshold(64, 0.25) == doctest::Approx(0.59400256407477).epsilon(1e-10));
    // N^2 e^{-m^{1-2 tau}}
    CHECK(cor1_tail(100, 256, 0.25) == doctest::Approx(1e4 * std::exp(-16.0)).epsilon(1e-12));
    // m^-tau + 2 f_max rho + rho^2
    CHECK(cor2_threshold(256, 0.25, 1.0, 0.02) == doctest::Approx(0.2904).epsilon(1e-10));
    // N^2 e^{-m^{1-2 tau} / f_max^2}
    CHECK(cor2_tail(100, 256, 0.25, 2.0) == doctest::Approx(1e4 * std::exp(-4.0)).epsilon(1e-12));
    // 2 e^{-a^2 / (2 sum (alpha+beta)^2)}
    CHECK(azuma_bound(1.0, std::vector<double>(4, 0.1), std::vector<double>(4, 0.1)) ==
          doctest::Approx(2.0 * std::exp(-1.0 / 0.32)).epsilon(1e-12));
    // 2 e^{-2 a^2 / sum rho^2}
    CHECK(mcdiarmid_bound(0.5, {0.1, 0.2, 0.3}) ==
          doctest::Approx(2.0 * std::exp(-0.5 / 0.14)).epsilon(1e-12));
    CHECK(delta_psi_mean(0.3, 10) == doctest::Approx(0.03));
    CHECK(lipschitz_lambda(2.0, 0.1) == doctest::Approx(0.41));
    CHECK(theorem1_err_unbounded(0.2, 256, 1.0) == doctest::Approx(0.2 + 1.0 / 16.0));
}

TEST_CASE("theorem1_bound matches an inline direct evaluation") {
    const Theorem1Params p = small_params();
    const Theorem1Result r = theorem1_bound(p);

    CHECK(r.err == doctest::Approx(0.5 + 2 * 0.01 + 2 * 0.02).epsilon(1e-14));

    // direct double-precision evaluation of the same formula
    const double pi = std::acos(-1.0);
    const double ln_n = std::log(16.0);
    const double t1 = 2.0 * 2 * 4 * 1.0 * std::exp(-16.0 / (8.0 * std::pow(ln_n, 6)));
    const double t2 =
        4.0 * 16.0 * 1.0 * std::exp(-0.01 * 4.0 / (8.0 * std::pow(ln_n, 4)));
    const double b1 = 2.0 * 16 * 2 * std::exp(-ln_n * ln_n / 8.0);
    const double b2 = std::sqrt(2.0 * 4 * 2 / pi) * std::exp(-4.0 * 2 / 2.0);
    double fsum = 0.0;
    const double pm = 0.1 * 4;
    double factj = 1.0;
    for (std::size_t j = 1; j <= 4; ++j) {
        factj *= double(j);
        if (j >= 3) fsum += std::pow(pm, double(j)) / factj;
    }
    const double b4 = 2.0 * std::exp(-2.0 * 0.25 / 0.08);
    const double direct = 45.0 * (t1 + t2 + b1 + b2 + fsum + b4);
    CHECK(r.probability_bound == doctest::Approx(direct).epsilon(1e-10));
    CHECK(r.log_probability_bound == doctest::Approx(std::log(direct)).epsilon(1e-10));
}

TEST_CASE("theorem1_bound agrees with the long double reference") {
    const CounterRng rng(0xB0B0);
    for (std::size_t g = 0; g < 25; ++g) {
        Theorem1Params p;
        const std::uint64_t base = g * 8192;
        p.k = 2 + rng.below(base, 3);
        p.N = double(p.k) + double(rng.below(base + 1, 5000));
        p.m = 8 + rng.below(base + 2, 200);
        p.n = 16 + rng.below(base + 3, 2000);
        p.chi = 0.5 + 2.0 * rng.uniform_at(base + 4);
        p.mu = 0.2 + 1.5 * rng.uniform_at(base + 5);
        p.eps = 0.05 + 0.3 * rng.uniform_at(base + 6);
        p.K = 0.1 + 0.9 * rng.uniform_at(base + 7);
        p.m_bar = rng.below(base + 8, p.m + 1);
        p.p_lambda_eps = g % 3 == 0 ? 0.0 : 0.4 * rng.uniform_at(base + 9);
        p.rho.resize(p.m * p.k);
        for (std::size_t i = 0; i < p.rho.size(); ++i)
            p.rho[i] = 0.01 + 0.1 * rng.uniform_at(base + 16 + i);
        p.delta_M = 0.05 * rng.uniform_at(base + 10);
        p.delta_lambda = 0.05 * rng.uniform_at(base + 11);

        const Theorem1Result r = theorem1_bound(p);
        const long double ref = verify::theorem1_reference_log(p);
        CHECK(std::fabs(std::expm1(r.log_probability_bound - double(ref))) <= 1e-6);
    }
}

TEST_CASE("theorem1_bound is not clamped to one") {
    Theorem1Params p = small_params();
    p.N = 10000;  // binomial factor alone exceeds 1
    const Theorem1Result r = theorem1_bound(p);
    CHECK(r.probability_bound > 1.0);
}

TEST_CASE("theorem1_bound validates its domain") {
    const Theorem1Params good = small_params();
    CHECK_NOTHROW(theorem1_bound(good));

    Theorem1Params p = good;
    p.chi = 0.0;
    CHECK_THROWS_AS(theorem1_bound(p), std::domain_error);
    p = good;
    p.mu = 0.0;
    CHECK_THROWS_AS(theorem1_bound(p), std::domain_error);
    p = good;
    p.eps = 0.0;
    CHECK_THROWS_AS(theorem1_bound(p), std::invalid_argument);
    p = good;
    p.K = -1.0;
    CHECK_THROWS_AS(theorem1_bound(p), std::invalid_argument);
    p = good;
    p.m_bar = 5;  // > m
    CHECK_THROWS_AS(theorem1_bound(p), std::invalid_argument);
    p = good;
    p.p_lambda_eps = 1.5;
    CHECK_THROWS_AS(theorem1_bound(p), std::invalid_argument);
    p = good;
    p.rho.pop_back();
    CHECK_THROWS_AS(theorem1_bound(p), std::invalid_argument);
    p = good;
    p.rho[0] = 0.0;
    CHECK_THROWS_AS(theorem1_bound(p), std::invalid_argument);
    p = good;
    p.N = 1.0;  // < k
    CHECK_THROWS_AS(theorem1_bound(p), std::invalid_argument);
    p = good;
    p.n = 1;
    CHECK_THROWS_AS(theorem1_bound(p), std::invalid_argument);
}

TEST_CASE("bound monotonicities") {
    const Theorem1Params p = small_params();
    const double base = theorem1_bound(p).log_probability_bound;

    Theorem1Params q = p;
    q.N *= 2;
    CHECK(theorem1_bound(q).log_probability_bound >= base);
    q = p;
    q.chi *= 2;
    CHECK(theorem1_bound(q).log_probability_bound > base);
    q = p;
    q.mu *= 2;
    CHECK(theorem1_bound(q).log_probability_bound >= base);
    CHECK(mcdiarmid_bound(1.0, p.rho) <= mcdiarmid_bound(0.5, p.rho));
    CHECK(azuma_bound(2.0, {0.1}, {0.1}) <= azuma_bound(1.0, {0.1}, {0.1}));
}

TEST_CASE("threshold evaluators validate tau and sizes") {
    CHECK_THROWS_AS(cor1_threshold(1, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(cor1_threshold(10, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(cor1_threshold(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cor1_tail(0.5, 10, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(cor2_threshold(10, 0.25, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(cor2_tail(10, 10, 0.25, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(azuma_bound(1.0, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(azuma_bound(1.0, {0.1}, {0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(mcdiarmid_bound(1.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(mcdiarmid_bound(1.0, {-0.1}), std::invalid_argument);
    CHECK_THROWS_AS(p0_eps_angular(0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(p0_eps_angular(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(delta_psi_mean(1.0, 0), std::invalid_argument);
}
