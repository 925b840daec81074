#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "structembed/kernels.hpp"

using namespace structembed;

namespace {

const double kPi = std::acos(-1.0);

std::vector<double> unit(std::uint64_t seed, std::size_t n) {
    const CounterRng rng(seed);
    std::vector<double> v(n);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = rng.normal_at(i);
        norm2 += v[i] * v[i];
    }
    for (double& x : v) x /= std::sqrt(norm2);
    return v;
}

}  // namespace

TEST_CASE("nonlinearity parsing round-trips") {
    for (const char* name : {"identity", "heaviside", "relu", "sine", "cosine", "sincos",
                             "arccos_power:0", "arccos_power:2", "arccos_power:3"}) {
        const Nonlinearity f = parse_nonlinearity(name);
        CHECK(nonlinearity_name(f) == name);
    }
    CHECK_THROWS_AS(parse_nonlinearity("gaussian"), std::invalid_argument);
}

TEST_CASE("pointwise nonlinearities") {
    CHECK(apply_nonlinearity({NonlinearityKind::heaviside, 1}, 0.0) == 1.0);
    CHECK(apply_nonlinearity({NonlinearityKind::heaviside, 1}, -0.1) == 0.0);
    CHECK(apply_nonlinearity({NonlinearityKind::relu, 1}, -2.0) == 0.0);
    CHECK(apply_nonlinearity({NonlinearityKind::relu, 1}, 2.0) == 2.0);
    // step-times-power hierarchy: order 0 is heaviside, order 1 is relu
    CHECK(apply_nonlinearity({NonlinearityKind::arccos_power, 0}, 3.0) == 1.0);
    CHECK(apply_nonlinearity({NonlinearityKind::arccos_power, 1}, 3.0) == 3.0);
    CHECK(apply_nonlinearity({NonlinearityKind::arccos_power, 2}, 3.0) == 9.0);
    CHECK(apply_nonlinearity({NonlinearityKind::arccos_power, 2}, -3.0) == 0.0);
    CHECK(apply_nonlinearity({NonlinearityKind::sine, 1}, 0.5) == std::sin(0.5));
    CHECK(apply_nonlinearity({NonlinearityKind::cosine, 1}, 0.5) == std::cos(0.5));
    CHECK_THROWS_AS(apply_nonlinearity({NonlinearityKind::sincos, 1}, 0.5),
                    std::invalid_argument);
}

TEST_CASE("exact kernels at hand-checked angles") {
    const std::vector<double> e1 = {1.0, 0.0, 0.0};
    const std::vector<double> e2 = {0.0, 1.0, 0.0};
    const std::vector<double> mid = {0.5, std::sqrt(3.0) / 2.0, 0.0};  // 60 degrees from e1

    const Nonlinearity id{NonlinearityKind::identity, 1};
    const Nonlinearity hs{NonlinearityKind::heaviside, 1};
    const Nonlinearity rl{NonlinearityKind::relu, 1};
    const Nonlinearity sc{NonlinearityKind::sincos, 1};

    CHECK(exact_kernel(id, e1, e2) == doctest::Approx(0.0));
    CHECK(exact_kernel(id, e1, mid) == doctest::Approx(0.5));

    // orthant probabilities: (pi - theta) / (2 pi)
    CHECK(exact_kernel(hs, e1, e1) == doctest::Approx(0.5));
    CHECK(exact_kernel(hs, e1, e2) == doctest::Approx(0.25));
    CHECK(exact_kernel(hs, e1, mid) == doctest::Approx((kPi - kPi / 3) / (2 * kPi)));
    std::vector<double> neg = e1;
    for (double& x : neg) x = -x;
    CHECK(exact_kernel(hs, e1, neg) == doctest::Approx(0.0));

    // relu arc-cosine form at theta = pi/2: (sin + 0) ... = 1/(2 pi)
    CHECK(exact_kernel(rl, e1, e2) == doctest::Approx(1.0 / (2 * kPi)));
    CHECK(exact_kernel(rl, e1, e1) == doctest::Approx(0.5));

    // Gaussian kernel from paired features
    CHECK(exact_kernel(sc, e1, e1) == doctest::Approx(1.0));
    CHECK(exact_kernel(sc, e1, e2) == doctest::Approx(std::exp(-1.0)));

    CHECK_THROWS_AS(exact_kernel({NonlinearityKind::sine, 1}, e1, e2), std::invalid_argument);
    CHECK_THROWS_AS(exact_kernel({NonlinearityKind::arccos_power, 2}, e1, e2),
                    std::invalid_argument);
    const std::vector<double> zero(3, 0.0);
    CHECK_THROWS_AS(exact_kernel(hs, e1, zero), std::invalid_argument);
}

TEST_CASE("monte-carlo oracle arbitrates the heaviside constant") {
    // At 60 degrees the two candidate orthant forms differ: (pi-theta)/(2pi)
    // = 1/3 versus theta/(2pi) = 1/6.  The brute-force oracle settles it.
    const std::vector<double> e1 = {1.0, 0.0};
    const std::vector<double> mid = {0.5, std::sqrt(3.0) / 2.0};
    const Nonlinearity hs{NonlinearityKind::heaviside, 1};
    const OracleResult o = mc_oracle(hs, e1, mid, 200000, 424242);
    CHECK(std::fabs(o.mean - 1.0 / 3.0) < 5 * o.se);
    CHECK(std::fabs(o.mean - 1.0 / 3.0) < 0.01);
    CHECK(std::fabs(o.mean - 1.0 / 6.0) > 0.1);  // the rejected constant
    CHECK(o.se > 0.0);
    CHECK(o.se < 0.005);
}

TEST_CASE("monte-carlo oracle matches every closed form") {
    const std::vector<double> v1 = unit(501, 6);
    const std::vector<double> v2 = unit(502, 6);
    for (const char* name : {"identity", "heaviside", "relu", "sincos"}) {
        const Nonlinearity f = parse_nonlinearity(name);
        REQUIRE(has_exact_kernel(f));
        const double exact = exact_kernel(f, v1, v2);
        const OracleResult o = mc_oracle(f, v1, v2, 400000, 77);
        CHECK(std::fabs(o.mean - exact) < 5 * o.se);
    }
    CHECK_THROWS_AS(mc_oracle({NonlinearityKind::identity, 1}, v1, v2, 50, 1),
                    std::invalid_argument);  // trials >= 100
    // determinism
    const OracleResult a = mc_oracle({NonlinearityKind::relu, 1}, v1, v2, 1000, 5);
    const OracleResult b = mc_oracle({NonlinearityKind::relu, 1}, v1, v2, 1000, 5);
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
}

TEST_CASE("pipeline shapes, padding, and determinism") {
    const EmbeddingPipeline P = EmbeddingPipeline::make(
        FamilySpec{Family::circulant}, 8, 20, {NonlinearityKind::relu, 1}, 42);
    CHECK(P.padded_n() == 32);  // 20 rounded up
    CHECK(P.m() == 8);
    const std::vector<double> v = unit(600, 20);  // shorter inputs are zero-padded
    const std::vector<double> y = P.linear_part(v);
    CHECK(y.size() == 8);
    CHECK(P.embed(v).size() == 8);

    const EmbeddingPipeline Q = EmbeddingPipeline::make(
        FamilySpec{Family::circulant}, 8, 20, {NonlinearityKind::relu, 1}, 42);
    CHECK(Q.linear_part(v) == y);

    const EmbeddingPipeline S = EmbeddingPipeline::make(
        FamilySpec{Family::circulant}, 8, 20, {NonlinearityKind::sincos, 1}, 42);
    CHECK(S.embed(v).size() == 16);  // interleaved sin/cos pairs
    CHECK(S.linear_part(v) == y);    // same seed, same linear stage

    CHECK_THROWS_AS(P.linear_part(std::vector<double>(33, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(P.linear_part(std::vector<double>{1.0, std::nan("")}),
                    std::invalid_argument);
}

TEST_CASE("linear part equals the materialized chain") {
    const std::size_t n = 16, m = 4;
    const EmbeddingPipeline P = EmbeddingPipeline::make(
        FamilySpec{Family::toeplitz}, m, n, {NonlinearityKind::identity, 1}, 7);
    const std::vector<double> v = unit(601, n);
    const std::vector<double> pre = preprocess(v, P.d0(), P.d1());
    const std::vector<double> want =
        dense_matvec_serial(P.matrix().materialize(), m, n, pre);
    const std::vector<double> got = P.linear_part(v);
    for (std::size_t i = 0; i < m; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("sincos self-similarity is exactly one") {
    const EmbeddingPipeline P = EmbeddingPipeline::make(
        FamilySpec{Family::circulant}, 16, 32, {NonlinearityKind::sincos, 1}, 9);
    const std::vector<double> v = unit(700, 32);
    CHECK(estimate_pair(P, v, v) == 1.0);
}

TEST_CASE("estimate_tuple(product, mean) is bit-identical to estimate_pair") {
    for (const char* name : {"identity", "heaviside", "relu", "sine"}) {
        const Nonlinearity f = parse_nonlinearity(name);
        const EmbeddingPipeline P =
            EmbeddingPipeline::make(FamilySpec{Family::toeplitz}, 12, 32, f, 13);
        const std::vector<double> v1 = unit(800, 32);
        const std::vector<double> v2 = unit(801, 32);
        const auto beta = [](const std::vector<double>& xs) {
            double p = 1.0;
            for (double x : xs) p *= x;
            return p;
        };
        const auto psi = [](const std::vector<double>& xs) {
            double s = 0.0;
            for (double x : xs) s += x;
            return s / double(xs.size());
        };
        CHECK(estimate_tuple(P, beta, psi, {v1, v2}) == estimate_pair(P, v1, v2));
    }
    const EmbeddingPipeline S = EmbeddingPipeline::make(
        FamilySpec{Family::circulant}, 8, 16, {NonlinearityKind::sincos, 1}, 3);
    const auto id1 = [](const std::vector<double>& xs) { return xs[0]; };
    CHECK_THROWS_AS(estimate_tuple(S, id1, id1, {unit(1, 16), unit(2, 16)}),
                    std::invalid_argument);
}

TEST_CASE("recursive embedding chains pipelines") {
    const EmbeddingPipeline s1 = EmbeddingPipeline::make(
        FamilySpec{Family::circulant}, 8, 16, {NonlinearityKind::relu, 1}, 21);
    const EmbeddingPipeline s2 = EmbeddingPipeline::make(
        FamilySpec{Family::circulant}, 4, 8, {NonlinearityKind::relu, 1}, 22);
    const std::vector<double> v = unit(900, 16);
    const std::vector<double> chained = embed_recursive({s1, s2}, v);
    const std::vector<double> manual = s2.embed(s1.embed(v));
    CHECK(chained == manual);
    CHECK(chained.size() == 4);
}

TEST_CASE("error sweep shrinks with m and is thread-count independent") {
    std::vector<std::vector<double>> data;
    for (std::size_t i = 0; i < 8; ++i) data.push_back(unit(1000 + i, 32));
    const Nonlinearity id{NonlinearityKind::identity, 1};
    const FamilySpec fam{Family::circulant};

    const auto rows = error_sweep(data, fam, id, {4, 16, 32}, 4, 99);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].m == 4);
    CHECK(rows[2].m == 32);
    CHECK(rows[2].rmse < rows[0].rmse);
    CHECK(rows[0].pair_count == 28);  // C(8,2)
    CHECK(rows[0].reps == 4);
    for (const auto& r : rows) CHECK(r.max_abs_error >= r.rmse - 1e-15);

#ifdef _OPENMP
    omp_set_num_threads(4);
    const auto rows4 = error_sweep(data, fam, id, {4, 16, 32}, 4, 99);
    omp_set_num_threads(1);
    const auto rows1 = error_sweep(data, fam, id, {4, 16, 32}, 4, 99);
    omp_set_num_threads(omp_get_num_procs());
    REQUIRE(rows4.size() == rows1.size());
    for (std::size_t i = 0; i < rows4.size(); ++i) {
        CHECK(rows4[i].rmse == rows1[i].rmse);  // bit-identical reduction
        CHECK(rows4[i].max_abs_error == rows1[i].max_abs_error);
        CHECK(rows4[i].rmse == rows[i].rmse);
    }
#endif
}

TEST_CASE("error sweep validates its inputs") {
    std::vector<std::vector<double>> data = {unit(1, 8), unit(2, 8)};
    const Nonlinearity id{NonlinearityKind::identity, 1};
    const FamilySpec fam{Family::circulant};
    CHECK_THROWS_AS(error_sweep({}, fam, id, {4}, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(error_sweep({unit(1, 8)}, fam, id, {4}, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(error_sweep(data, fam, id, {}, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(error_sweep(data, fam, id, {4}, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(error_sweep(data, fam, {NonlinearityKind::sine, 1}, {4}, 1, 0),
                    std::invalid_argument);  // no closed form to compare against
    std::vector<std::vector<double>> ragged = {unit(1, 8), unit(2, 4)};
    CHECK_THROWS_AS(error_sweep(ragged, fam, id, {4}, 1, 0), std::invalid_argument);
    std::vector<std::vector<double>> bad = data;
    bad[0][0] = std::nan("");
    CHECK_THROWS_AS(error_sweep(bad, fam, id, {4}, 1, 0), std::invalid_argument);
    // m larger than the padded dimension cannot be built for shift families
    CHECK_THROWS_AS(error_sweep(data, fam, id, {16}, 1, 0), std::invalid_argument);
}
