#include "structembed/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <new>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "structembed/diagnostics.hpp"
#include "structembed/fwht.hpp"
#include "structembed/kernels.hpp"
#include "structembed/parallel.hpp"
#include "structembed/rng.hpp"
#include "structembed/structured.hpp"

namespace structembed::verify {

namespace {

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

std::vector<double> gaussian_vector(const CounterRng& rng, std::uint64_t base, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal_at(base + i);
    return v;
}

std::vector<double> unit_vector(const CounterRng& rng, std::uint64_t base, std::size_t n) {
    std::vector<double> v = gaussian_vector(rng, base, n);
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= norm;
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t k = xs.size();
    return k % 2 ? xs[k / 2] : 0.5 * (xs[k / 2 - 1] + xs[k / 2]);
}

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. matvec-equivalence: fast product == materialized product, every family.
// ---------------------------------------------------------------------------

CriterionResult c_matvec_equivalence() {
    CriterionResult res{"matvec-equivalence", false, false, "", 0.0};
    const Family families[] = {Family::unstructured, Family::circulant,
                               Family::skew_circulant, Family::toeplitz, Family::hankel,
                               Family::ldr};
    const CounterRng rng(0x5EEDC001ull);
    double worst = 0.0;
    std::string worst_case = "none";
    std::size_t trials_run = 0;
    for (std::size_t fi = 0; fi < 6; ++fi) {
        for (std::size_t trial = 0; trial < 100; ++trial) {
            const std::uint64_t base = (fi * 100 + trial) * 16;
            const std::size_t n = 1 + rng.below(base + 0, 256);
            const std::size_t m_cap =
                families[fi] == Family::unstructured ? 64 : std::min<std::size_t>(n, 64);
            const std::size_t m = 1 + rng.below(base + 1, m_cap);
            const std::uint64_t seed = rng.u64_at(base + 2);
            FamilySpec spec{families[fi], 2, 2};
            if (spec.family == Family::ldr) {
                spec.r = static_cast<int>(1 + rng.below(base + 3, 3));
                spec.a = static_cast<int>(1 + rng.below(base + 4, std::min<std::size_t>(n, 4)));
            }
            const StructuredMatrix M = StructuredMatrix::build(spec, m, n, seed);
            const std::vector<double> v =
                gaussian_vector(CounterRng(seed ^ 0xFEEDull), 0, n);
            const std::vector<double> y = M.matvec(v);
            const std::vector<double> ref = dense_matvec_serial(M.materialize(), m, n, v);
            for (std::size_t i = 0; i < m; ++i) {
                const double gap = std::fabs(y[i] - ref[i]);
                if (gap > worst) {
                    worst = gap;
                    worst_case = family_name(spec.family) + " m=" + std::to_string(m) +
                                 " n=" + std::to_string(n);
                }
            }
            ++trials_run;
        }
    }
    res.pass = worst <= 1e-9;
    res.detail = std::to_string(trials_run) +
                 " random (family, m<=64, n<=256, seed) triples; max coordinate gap " +
                 fmt(worst) + " (worst: " + worst_case + "), tolerance 1e-9";
    return res;
}

// ---------------------------------------------------------------------------
// 2. sigma-closed-forms: closed-form coherence == explicit selector oracle,
//    exactly, for every index quadruple at small sizes; plus the circulant
//    shift rule and the Toeplitz zero pattern.
// ---------------------------------------------------------------------------

CriterionResult c_sigma_closed_forms() {
    CriterionResult res{"sigma-closed-forms", false, false, "", 0.0};
    std::size_t quadruples = 0, mismatches = 0;
    std::string first_bad;
    for (Family fam : {Family::circulant, Family::toeplitz}) {
        for (std::size_t n = 1; n <= 16; ++n) {
            for (std::size_t m = 1; m <= std::min<std::size_t>(n, 8); ++m) {
                const StructuredMatrix M = StructuredMatrix::build(
                    FamilySpec{fam}, m, n, 0x5EEDC002ull + n * 31 + m);
                const std::size_t t = M.t();
                std::vector<std::vector<double>> P(m);
                for (std::size_t i = 0; i < m; ++i) P[i] = M.p_matrix(i);
                for (std::size_t i1 = 0; i1 < m; ++i1)
                    for (std::size_t i2 = 0; i2 < m; ++i2)
                        for (std::size_t n1 = 0; n1 < n; ++n1)
                            for (std::size_t n2 = 0; n2 < n; ++n2) {
                                const double s = sigma(M, i1, i2, n1, n2);
                                double oracle = 0.0;
                                for (std::size_t l = 0; l < t; ++l)
                                    oracle += P[i1][l * n + n1] * P[i2][l * n + n2];
                                bool ok = (s == oracle);  // exact integer equality
                                if (ok && fam == Family::circulant) {
                                    const double shift_rule =
                                        ((n1 + n - n2) % n == (i1 + n - i2) % n) ? 1.0 : 0.0;
                                    ok = (s == shift_rule);
                                }
                                if (ok && fam == Family::toeplitz &&
                                    (n1 + n - n2) % n != (i1 + n - i2) % n) {
                                    ok = (s == 0.0);  // off-shift entries vanish
                                }
                                ++quadruples;
                                if (!ok) {
                                    ++mismatches;
                                    if (first_bad.empty()) {
                                        first_bad = family_name(fam) + " n=" + std::to_string(n) +
                                                    " m=" + std::to_string(m) + " (" +
                                                    std::to_string(i1) + "," + std::to_string(i2) +
                                                    "," + std::to_string(n1) + "," +
                                                    std::to_string(n2) + ") got " + fmt(s) +
                                                    " want " + fmt(oracle);
                                    }
                                }
                            }
            }
        }
    }
    res.pass = mismatches == 0;
    res.detail = std::to_string(quadruples) +
                 " quadruples over circulant+toeplitz, n<=16, m<=8; mismatches " +
                 std::to_string(mismatches) +
                 (first_bad.empty() ? std::string() : "; first: " + first_bad);
    return res;
}

// ---------------------------------------------------------------------------
// 3. chromatic-reproductions: the n=5 adjacent-row 5-cycle with chromatic
//    number exactly 3; Toeplitz chi[P] exactly 2 at small sizes; circulant
//    chi[P] <= 3 with unicoherence exactly zero.
// ---------------------------------------------------------------------------

CriterionResult c_chromatic_reproductions() {
    CriterionResult res{"chromatic-reproductions", false, false, "", 0.0};
    std::ostringstream why;

    // (a) pentagon: circulant n=5, adjacent rows.
    const StructuredMatrix M5 =
        StructuredMatrix::build(FamilySpec{Family::circulant}, 2, 5, 0x5EEDC003ull);
    const CoherenceGraph G = coherence_graph(M5, 0, 1);
    const std::vector<std::pair<std::size_t, std::size_t>> expect = {
        {0, 1}, {0, 4}, {1, 2}, {2, 3}, {3, 4}};
    bool cycle_ok = (G.vertices == expect) && G.edge_count == 5;
    for (const auto& adj : G.adjacency) cycle_ok = cycle_ok && adj.size() == 2;
    const std::size_t chi5 = exact_chromatic(G);
    cycle_ok = cycle_ok && chi5 == 3;
    if (!cycle_ok)
        why << "n=5 adjacent rows: got " << G.vertices.size() << " vertices, "
            << G.edge_count << " edges, chi " << chi5 << " (want 5-cycle, chi 3); ";

    // (b) Toeplitz exact chi == 2 across the small grid.
    bool toep_ok = true;
    for (std::size_t n = 3; n <= 16 && toep_ok; ++n)
        for (std::size_t m = 2; m <= std::min<std::size_t>(n, 8) && toep_ok; ++m) {
            const StructuredMatrix M =
                StructuredMatrix::build(FamilySpec{Family::toeplitz}, m, n, 0x70E0ull + n * 8 + m);
            const PModelStats st = model_stats(M);
            if (!(st.chi == 2 && st.chi_is_exact)) {
                toep_ok = false;
                why << "toeplitz n=" << n << " m=" << m << ": chi " << st.chi << " (want exact 2); ";
            }
        }

    // (c) circulant chi <= 3 and unicoherence exactly zero.
    bool circ_ok = true;
    for (std::size_t n = 2; n <= 16 && circ_ok; ++n)
        for (std::size_t m = 1; m <= std::min<std::size_t>(n, 8) && circ_ok; ++m) {
            const StructuredMatrix M =
                StructuredMatrix::build(FamilySpec{Family::circulant}, m, n, 0xC14Cull + n * 8 + m);
            const PModelStats st = model_stats(M);
            if (!(st.chi <= 3 && st.mu_tilde == 0.0)) {
                circ_ok = false;
                why << "circulant n=" << n << " m=" << m << ": chi " << st.chi << " mu~ "
                    << st.mu_tilde << " (want chi<=3, mu~ == 0); ";
            }
        }

    res.pass = cycle_ok && toep_ok && circ_ok;
    res.detail = res.pass
                     ? "5-cycle with exact chi 3 at n=5; toeplitz chi == 2 and circulant "
                       "chi <= 3, unicoherence == 0, over n<=16, m<=8"
                     : why.str();
    return res;
}

// ---------------------------------------------------------------------------
// 4. normalization-orthogonality: one-hot selector columns are exactly
//    orthonormal; ldr columns are unit within 1e-12.
// ---------------------------------------------------------------------------

CriterionResult c_normalization_orthogonality() {
    CriterionResult res{"normalization-orthogonality", false, false, "", 0.0};
    std::ostringstream why;
    bool ok = true;
    for (Family fam :
         {Family::circulant, Family::skew_circulant, Family::toeplitz, Family::hankel}) {
        for (std::size_t n : {8u, 16u, 64u}) {
            for (std::size_t m : {n / 2, n}) {
                const StructuredMatrix M =
                    StructuredMatrix::build(FamilySpec{fam}, m, n, 0x5EEDC004ull + n + m);
                if (!check_normalized(M, 0.0) || !check_orthogonality(M, 0.0)) {
                    ok = false;
                    why << family_name(fam) << " n=" << n << " m=" << m
                        << ": selector columns not exactly orthonormal; ";
                }
            }
        }
    }
    for (std::size_t n : {16u, 64u}) {
        for (int r : {1, 3}) {
            for (int a : {2, 4}) {
                const StructuredMatrix M = StructuredMatrix::build(
                    FamilySpec{Family::ldr, r, a}, n / 2, n, 0x5EEDC014ull + n + r);
                if (!check_normalized(M, 1e-12)) {
                    ok = false;
                    why << "ldr n=" << n << " r=" << r << " a=" << a
                        << ": column norms deviate from 1 by more than 1e-12; ";
                }
            }
        }
    }
    res.pass = ok;
    res.detail = ok ? "one-hot families exactly orthonormal at n in {8,16,64}; ldr column "
                      "norms within 1e-12 of 1"
                    : why.str();
    return res;
}

// ---------------------------------------------------------------------------
// 5. unbiasedness: estimator means over 2e4 pipeline seeds agree with a 1e6
//    trial dense Monte-Carlo oracle within 4 combined standard errors for at
//    least 9 of 10 fixed pairs, for each family x nonlinearity combination.
// ---------------------------------------------------------------------------

CriterionResult c_unbiasedness() {
    CriterionResult res{"unbiasedness", false, false, "", 0.0};
    constexpr std::size_t kPairs = 10, kSeeds = 20000, kM = 8, kN = 64;
    constexpr std::size_t kOracleTrials = 1000000;

    const CounterRng pair_rng(0xACC5ull);
    std::vector<std::vector<double>> v1(kPairs), v2(kPairs);
    for (std::size_t p = 0; p < kPairs; ++p) {
        v1[p] = unit_vector(pair_rng, (2 * p) * kN, kN);
        v2[p] = unit_vector(pair_rng, (2 * p + 1) * kN, kN);
    }

    const Nonlinearity kF[2] = {{NonlinearityKind::identity, 1},
                                {NonlinearityKind::heaviside, 1}};

    // Oracle means are family-independent: one per (pair, f).
    OracleResult oracle[2][kPairs];
    for (int fi = 0; fi < 2; ++fi)
        for (std::size_t p = 0; p < kPairs; ++p)
            oracle[fi][p] =
                mc_oracle(kF[fi], v1[p], v2[p], kOracleTrials, 0xACC50000ull + p * 2 + fi);

    std::ostringstream why;
    bool ok = true;
    std::size_t worst_hits = kPairs;
    for (Family fam : {Family::circulant, Family::toeplitz}) {
        // Accumulate per-seed estimates chunk by chunk (deterministic order).
        constexpr std::size_t kChunk = 500;
        const std::size_t num_chunks = (kSeeds + kChunk - 1) / kChunk;
        std::vector<std::vector<double>> sum(num_chunks,
                                             std::vector<double>(2 * kPairs, 0.0));
        std::vector<std::vector<double>> sumsq(num_chunks,
                                               std::vector<double>(2 * kPairs, 0.0));
        parallel_chunks(kSeeds, kChunk, [&](std::size_t first, std::size_t last,
                                            std::size_t slot) {
            for (std::size_t s = first; s < last; ++s) {
                const EmbeddingPipeline P = EmbeddingPipeline::make(
                    FamilySpec{fam}, kM, kN, kF[0], derive_stream(0xACC5EEDull, s));
                for (std::size_t p = 0; p < kPairs; ++p) {
                    const std::vector<double> y1 = P.linear_part(v1[p]);
                    const std::vector<double> y2 = P.linear_part(v2[p]);
                    double est_id = 0.0, est_hs = 0.0;
                    for (std::size_t i = 0; i < kM; ++i) {
                        est_id += y1[i] * y2[i];
                        est_hs += (y1[i] >= 0.0 && y2[i] >= 0.0) ? 1.0 : 0.0;
                    }
                    est_id /= kM;
                    est_hs /= kM;
                    sum[slot][p] += est_id;
                    sumsq[slot][p] += est_id * est_id;
                    sum[slot][kPairs + p] += est_hs;
                    sumsq[slot][kPairs + p] += est_hs * est_hs;
                }
            }
        });
        for (int fi = 0; fi < 2; ++fi) {
            std::size_t hits = 0;
            double worst_z = 0.0;
            for (std::size_t p = 0; p < kPairs; ++p) {
                double s1 = 0.0, s2 = 0.0;
                for (std::size_t c = 0; c < num_chunks; ++c) {
                    s1 += sum[c][fi * kPairs + p];
                    s2 += sumsq[c][fi * kPairs + p];
                }
                const double mean = s1 / kSeeds;
                const double var = std::max(0.0, (s2 / kSeeds - mean * mean)) *
                                   (double(kSeeds) / double(kSeeds - 1));
                const double se = std::sqrt(var / kSeeds);
                const double comb =
                    std::sqrt(se * se + oracle[fi][p].se * oracle[fi][p].se);
                const double z = std::fabs(mean - oracle[fi][p].mean) / comb;
                worst_z = std::max(worst_z, z);
                if (z <= 4.0) ++hits;
            }
            worst_hits = std::min(worst_hits, hits);
            if (hits < 9) {
                ok = false;
                why << family_name(fam) << "/" << nonlinearity_name(kF[fi]) << ": only "
                    << hits << "/10 pairs within 4 combined se (worst z " << fmt(worst_z)
                    << "); ";
            }
        }
    }
    res.pass = ok;
    res.detail = ok ? "circulant+toeplitz x identity+heaviside, 10 pairs, 2e4 seeds vs 1e6 "
                      "trial oracle: >= " +
                          std::to_string(worst_hits) + "/10 pairs within 4 combined se"
                    : why.str();
    return res;
}

// ---------------------------------------------------------------------------
// 6. s-vector-identities: the budget-space rewrite of <a^i D1, x> and both
//    dot-product expansions hold to 1e-9 on random orthonormal pairs.
// ---------------------------------------------------------------------------

CriterionResult c_s_vector_identities() {
    CriterionResult res{"s-vector-identities", false, false, "", 0.0};
    constexpr std::size_t kN = 16, kM = 4;
    const CounterRng rng(0x5EEDC006ull);
    double worst = 0.0;
    for (Family fam : {Family::circulant, Family::toeplitz}) {
        const StructuredMatrix M = StructuredMatrix::build(FamilySpec{fam}, kM, kN, 0xC006ull);
        const SignDiagonal d1 = sample_signs(0xD1C006ull, kN);
        for (std::size_t trial = 0; trial < 20; ++trial) {
            const std::uint64_t base = (fam == Family::circulant ? 0 : 40 + trial) * 2 * kN +
                                       trial * 2 * kN;
            std::vector<double> a = gaussian_vector(rng, base, kN);
            std::vector<double> b = gaussian_vector(rng, base + kN, kN);
            double na = std::sqrt(dot(a, a));
            for (double& x : a) x /= na;
            const double proj = dot(b, a);
            for (std::size_t i = 0; i < kN; ++i) b[i] -= proj * a[i];
            double nb = std::sqrt(dot(b, b));
            for (double& x : b) x /= nb;
            const SIdentityReport rep = verify_s_identities(M, d1, {a, b});
            worst = std::max({worst, rep.max_linear_gap, rep.max_same_row_gap,
                              rep.max_cross_row_gap});
        }
    }
    res.pass = worst <= 1e-9;
    res.detail = "circulant+toeplitz n=16 m=4, 20 orthonormal pairs each; max identity gap " +
                 fmt(worst) + ", tolerance 1e-9";
    return res;
}

// ---------------------------------------------------------------------------
// 7. balancedness: the sign-flip + Walsh-Hadamard preconditioner flattens at
//    least 99% of random unit vectors at n=1024 to the log(n)/sqrt(n) level.
// ---------------------------------------------------------------------------

CriterionResult c_balancedness() {
    CriterionResult res{"balancedness", false, false, "", 0.0};
    constexpr std::size_t kN = 1024, kTrials = 1000;
    const double theta = std::log(double(kN));
    const CounterRng rng(0x5EEDC007ull);
    SignDiagonal ones;
    ones.seed = 0;
    ones.d.assign(kN, 1.0);
    std::size_t balanced = 0;
    for (std::size_t t = 0; t < kTrials; ++t) {
        const std::vector<double> v = unit_vector(rng, t * kN, kN);
        const SignDiagonal d0 = sample_signs(derive_stream(0xBA1Aull, t), kN);
        const std::vector<double> x = preprocess(v, d0, ones);
        if (is_balanced(x, theta)) ++balanced;
    }
    res.pass = balanced * 100 >= kTrials * 99;
    res.detail = std::to_string(balanced) + "/" + std::to_string(kTrials) +
                 " random unit vectors log(n)-balanced after H D0 at n=1024 (need >= 990)";
    return res;
}

// ---------------------------------------------------------------------------
// 8. concentration-shape: pointwise error stays under the m^-tau + 1/ln(m)
//    threshold for the bounded nonlinearity, and identity rmse scales like
//    1/sqrt(m).
// ---------------------------------------------------------------------------

CriterionResult c_concentration_shape() {
    CriterionResult res{"concentration-shape", false, false, "", 0.0};
    constexpr std::size_t kN = 256, kPairs = 100;
    const CounterRng rng(0xACC8ull);
    std::vector<std::vector<double>> v1(kPairs), v2(kPairs);
    for (std::size_t p = 0; p < kPairs; ++p) {
        v1[p] = unit_vector(rng, (2 * p) * kN, kN);
        v2[p] = unit_vector(rng, (2 * p + 1) * kN, kN);
    }

    // (a) bounded f: max pointwise error under the fixed threshold in >= 19/20 runs.
    const Nonlinearity heaviside{NonlinearityKind::heaviside, 1};
    const double threshold = 0.4303;  // m^-tau + 1/ln(m) at m=256, tau=0.25
    std::vector<double> exact_hs(kPairs);
    for (std::size_t p = 0; p < kPairs; ++p) exact_hs[p] = exact_kernel(heaviside, v1[p], v2[p]);
    std::size_t good_runs = 0;
    double worst_max_err = 0.0;
    for (std::size_t run = 0; run < 20; ++run) {
        const EmbeddingPipeline P = EmbeddingPipeline::make(
            FamilySpec{Family::toeplitz}, 64, kN, heaviside, derive_stream(0xACC8EEDull, run));
        double max_err = 0.0;
        for (std::size_t p = 0; p < kPairs; ++p)
            max_err = std::max(max_err, std::fabs(estimate_pair(P, v1[p], v2[p]) - exact_hs[p]));
        worst_max_err = std::max(worst_max_err, max_err);
        if (max_err < threshold) ++good_runs;
    }
    const bool part_a = good_runs >= 19;

    // (b) identity rmse halves (+-40%) when m goes 64 -> 256, median over 50 seeds.
    const Nonlinearity identity{NonlinearityKind::identity, 1};
    std::vector<double> exact_id(kPairs);
    for (std::size_t p = 0; p < kPairs; ++p) exact_id[p] = dot(v1[p], v2[p]);
    std::vector<double> ratios(50);
    for (std::size_t s = 0; s < 50; ++s) {
        double rmse[2] = {0.0, 0.0};
        const std::size_t ms[2] = {64, 256};
        for (int k = 0; k < 2; ++k) {
            const EmbeddingPipeline P = EmbeddingPipeline::make(
                FamilySpec{Family::circulant}, ms[k], kN, identity,
                derive_stream(0xACC81Dull, s * 2 + k));
            double acc = 0.0;
            for (std::size_t p = 0; p < kPairs; ++p) {
                const double e = estimate_pair(P, v1[p], v2[p]) - exact_id[p];
                acc += e * e;
            }
            rmse[k] = std::sqrt(acc / kPairs);
        }
        ratios[s] = rmse[0] / rmse[1];
    }
    const double med_ratio = median(ratios);
    const bool part_b = med_ratio >= 1.2 && med_ratio <= 2.8;

    res.pass = part_a && part_b;
    res.detail = "heaviside/toeplitz m=64: max err < " + fmt(threshold) + " in " +
                 std::to_string(good_runs) + "/20 runs (worst " + fmt(worst_max_err) +
                 ", need >= 19); identity rmse ratio m=64/m=256 median " + fmt(med_ratio) +
                 " (want in [1.2, 2.8])";
    return res;
}

// ---------------------------------------------------------------------------
// 9. gaussian-kernel-fidelity: the paired sin/cos estimator reproduces
//    exp(-||v1-v2||^2 / 2) on unit-ball pairs.
// ---------------------------------------------------------------------------

CriterionResult c_gaussian_kernel_fidelity() {
    CriterionResult res{"gaussian-kernel-fidelity", false, false, "", 0.0};
    constexpr std::size_t kN = 256, kRows = 256, kPairs = 50;  // 2*kRows = 512 features
    const Nonlinearity sincos{NonlinearityKind::sincos, 1};
    const EmbeddingPipeline P =
        EmbeddingPipeline::make(FamilySpec{Family::circulant}, kRows, kN, sincos, 0x5EEDC009ull);
    const CounterRng rng(0x5EEDC109ull);
    double acc = 0.0;
    for (std::size_t p = 0; p < kPairs; ++p) {
        std::vector<double> a = unit_vector(rng, (2 * p) * kN, kN);
        std::vector<double> b = unit_vector(rng, (2 * p + 1) * kN, kN);
        const double ra = rng.uniform_at(0x900000ull + 2 * p);
        const double rb = rng.uniform_at(0x900000ull + 2 * p + 1);
        for (double& x : a) x *= ra;
        for (double& x : b) x *= rb;
        double d2 = 0.0;
        for (std::size_t i = 0; i < kN; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
        const double err = estimate_pair(P, a, b) - std::exp(-0.5 * d2);
        acc += err * err;
    }
    const double rmse = std::sqrt(acc / kPairs);
    res.pass = rmse < 0.05;
    res.detail = "sincos/circulant n=256, 512 features, 50 unit-ball pairs: rmse vs "
                 "exp(-||d||^2/2) = " +
                 fmt(rmse) + " (need < 0.05)";
    return res;
}

// ---------------------------------------------------------------------------
// 10. perturbation-flip-probability: Monte-Carlo flip rate of the heaviside
//     pair under eps-bounded planar perturbations stays under the closed-form
//     angular bound (plus 3 binomial standard errors).
// ---------------------------------------------------------------------------

CriterionResult c_perturbation_flip_probability() {
    CriterionResult res{"perturbation-flip-probability", false, false, "", 0.0};
    constexpr std::size_t kN = 64, kTrials = 100000;
    const double eps = 0.01;
    const double bound = p0_eps_angular(10, eps);
    const CounterRng rng(0x5EEDC00Aull);
    const std::vector<double> v1 = unit_vector(rng, 0, kN);
    const std::vector<double> v2 = unit_vector(rng, kN, kN);
    const double flips = parallel_sum(kTrials, 2048, [&](std::size_t trial) {
        const CounterRng r(derive_stream(0xACCAull, trial));
        double y1 = 0.0, y2 = 0.0;
        for (std::size_t j = 0; j < kN; ++j) {
            const double g = r.normal_at(j);
            y1 += g * v1[j];
            y2 += g * v2[j];
        }
        // A perturbation zeta in [-eps, eps]^2 of (y1, y2) can flip the
        // heaviside product iff the point sits within eps of the quadrant
        // boundary on the relevant side.
        const bool on = (y1 >= 0.0 && y2 >= 0.0);
        const bool flip = on ? (y1 < eps || y2 < eps) : (y1 >= -eps && y2 >= -eps);
        return flip ? 1.0 : 0.0;
    });
    const double p_hat = flips / kTrials;
    const double se = std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / kTrials);
    res.pass = p_hat <= bound + 3.0 * se;
    res.detail = "flip rate " + fmt(p_hat) + " over 1e5 trials (n=64, eps=0.01) vs bound " +
                 fmt(bound) + " + 3se = " + fmt(bound + 3.0 * se);
    return res;
}

// ---------------------------------------------------------------------------
// 11. bound-evaluator: log-space closed-form bound matches an independent
//     long double direct evaluation to 6 significant digits, and respects the
//     documented monotonicities.
// ---------------------------------------------------------------------------

Theorem1Params random_params(const CounterRng& rng, std::uint64_t base, bool tame) {
    Theorem1Params p;
    p.k = 2 + rng.below(base + 0, 3);                      // 2..4
    p.N = double(p.k) + double(rng.below(base + 1, 10000));
    p.m = 8 + rng.below(base + 2, tame ? 128 : 505);       // 8..512
    p.n = 16 + rng.below(base + 3, tame ? 240 : 4081);     // 16..4096
    p.chi = tame ? 1.0 + rng.uniform_at(base + 4) : 0.5 + 3.5 * rng.uniform_at(base + 4);
    p.mu = tame ? 0.5 + rng.uniform_at(base + 5) : 0.1 + 1.9 * rng.uniform_at(base + 5);
    p.mu_tilde = rng.uniform_at(base + 6);
    p.eps = 0.01 + 0.49 * rng.uniform_at(base + 7);
    p.K = tame ? 0.5 + 0.5 * rng.uniform_at(base + 8) : 0.01 + 0.99 * rng.uniform_at(base + 8);
    p.m_bar = rng.below(base + 9, p.m + 1);
    p.p_lambda_eps = tame ? 0.0 : 0.5 * rng.uniform_at(base + 10);
    p.rho.resize(p.m * p.k);
    for (std::size_t i = 0; i < p.rho.size(); ++i)
        p.rho[i] = (tame ? 0.001 : 0.001 + 0.099 * rng.uniform_at(base + 16 + i));
    p.delta_M = 0.1 * rng.uniform_at(base + 11);
    p.delta_lambda = 0.1 * rng.uniform_at(base + 12);
    return p;
}

CriterionResult c_bound_evaluator() {
    CriterionResult res{"bound-evaluator", false, false, "", 0.0};
    const CounterRng rng(0x5EEDC00Bull);
    double worst_rel = 0.0;
    std::size_t grids = 0;
    for (std::size_t g = 0; g < 100; ++g) {
        const Theorem1Params p = random_params(rng, g * 4096, false);
        const Theorem1Result r = theorem1_bound(p);
        const long double ref = theorem1_reference_log(p);
        const double rel = std::fabs(std::expm1(r.log_probability_bound - double(ref)));
        worst_rel = std::max(worst_rel, rel);
        const double err_ref =
            p.K + double(p.m_bar) * p.delta_M + double(p.m - p.m_bar) * p.delta_lambda;
        if (std::fabs(r.err - err_ref) > 1e-12 * std::max(1.0, std::fabs(err_ref)))
            worst_rel = std::max(worst_rel, 1.0);
        ++grids;
    }
    const bool agree = worst_rel <= 1e-6;

    bool mono = true;
    std::ostringstream why;
    for (std::size_t g = 0; g < 20 && mono; ++g) {
        Theorem1Params p = random_params(rng, 0x800000ull + g * 4096, true);
        const double base = theorem1_bound(p).log_probability_bound;
        Theorem1Params pN = p;
        pN.N *= 2;
        if (theorem1_bound(pN).log_probability_bound < base - 1e-9) {
            mono = false;
            why << "bound decreased when N doubled at grid " << g << "; ";
        }
        Theorem1Params pc = p;
        pc.chi *= 2;
        if (!(theorem1_bound(pc).log_probability_bound > base)) {
            mono = false;
            why << "bound did not strictly increase when chi doubled at grid " << g << "; ";
        }
        Theorem1Params pm = p;
        pm.mu *= 1.5;
        if (theorem1_bound(pm).log_probability_bound < base - 1e-9) {
            mono = false;
            why << "bound decreased when mu grew at grid " << g << "; ";
        }
        if (mcdiarmid_bound(2 * p.K, p.rho) > mcdiarmid_bound(p.K, p.rho)) {
            mono = false;
            why << "raising K raised the e^{-2K^2/sum rho^2} term at grid " << g << "; ";
        }
    }

    res.pass = agree && mono;
    res.detail = std::to_string(grids) + " random grids vs long double direct reference: max "
                 "relative gap " +
                 fmt(worst_rel) + " (need <= 1e-6); monotonicity " +
                 (mono ? "held on 20 grids" : "FAILED: " + why.str());
    return res;
}

// ---------------------------------------------------------------------------
// 12. performance: the convolution matvec beats the dense product by >= 5x at
//     n = m = 2^14 (median of 20; construction excluded).
// ---------------------------------------------------------------------------

CriterionResult c_performance() {
    CriterionResult res{"performance", false, true, "", 0.0};
    constexpr std::size_t kDim = std::size_t{1} << 14;
    using clock = std::chrono::steady_clock;
    try {
        const StructuredMatrix M =
            StructuredMatrix::build(FamilySpec{Family::circulant}, kDim, kDim, 0x5EEDC00Cull);
        const std::vector<double> v = gaussian_vector(CounterRng(0xBE7Cull), 0, kDim);
        const std::vector<double> dense = M.materialize();

        volatile double sink = 0.0;
        std::vector<double> warm = M.matvec(v);
        sink = sink + warm[0];
        warm = dense_matvec(dense, kDim, kDim, v);
        sink = sink + warm[0];

        std::vector<double> ts, td;
        for (int rep = 0; rep < 20; ++rep) {
            auto t0 = clock::now();
            std::vector<double> y1 = M.matvec(v);
            auto t1 = clock::now();
            std::vector<double> y2 = dense_matvec(dense, kDim, kDim, v);
            auto t2 = clock::now();
            sink = sink + y1[rep] + y2[rep];
            ts.push_back(std::chrono::duration<double>(t1 - t0).count());
            td.push_back(std::chrono::duration<double>(t2 - t1).count());
        }
        (void)sink;
        const double med_s = median(ts), med_d = median(td);
        const double speedup = med_d / med_s;
        res.pass = speedup >= 5.0;
        res.detail = "n=m=2^14: structured median " + fmt(med_s * 1e3) + " ms, dense median " +
                     fmt(med_d * 1e3) + " ms, speedup " + fmt(speedup) + "x (need >= 5x)";
    } catch (const std::bad_alloc&) {
        res.pass = false;
        res.detail = "allocation failed for the 2^14 x 2^14 dense baseline";
    }
    return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reference bound evaluation (long double, direct).
// ---------------------------------------------------------------------------

long double theorem1_reference_log(const Theorem1Params& p) {
    const long double pi = 3.14159265358979323846264338327950288L;
    const long double n = static_cast<long double>(p.n);
    const long double m = static_cast<long double>(p.m);
    const long double k = static_cast<long double>(p.k);
    const long double chi = p.chi, mu = p.mu;
    const long double ln_n = std::log(n);
    const long double t1 =
        2.0L * k * m * chi *
        std::exp(-n / (8.0L * chi * chi * mu * mu * std::pow(ln_n, 6.0L)));
    const long double t2 =
        k * k * m * m * chi *
        std::exp(-static_cast<long double>(p.eps) * p.eps * std::sqrt(n) /
                 (8.0L * chi * chi * mu * mu * std::pow(ln_n, 4.0L)));
    const long double b1 = 2.0L * n * k * std::exp(-ln_n * ln_n / 8.0L);
    const long double b2 = std::sqrt(2.0L * m * k / pi) * std::exp(-m * k / 2.0L);
    long double fsum = 0.0L;
    const long double pm = static_cast<long double>(p.p_lambda_eps) * m;
    if (pm > 0.0L) {
        for (std::size_t j = p.m_bar + 1; j <= p.m; ++j) {
            const long double lj = static_cast<long double>(j);
            fsum += std::exp(lj * std::log(pm) - std::lgamma(lj + 1.0L));
        }
    }
    long double srho = 0.0L;
    for (double r : p.rho) srho += static_cast<long double>(r) * r;
    const long double b4 =
        2.0L * std::exp(-2.0L * static_cast<long double>(p.K) * p.K / srho);
    const long double N = static_cast<long double>(p.N);
    const long double log_binom =
        std::lgamma(N + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(N - k + 1.0L);
    return log_binom + std::log(t1 + t2 + b1 + b2 + fsum + b4);
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

std::vector<std::string> criterion_names() {
    return {"matvec-equivalence",      "sigma-closed-forms",
            "chromatic-reproductions", "normalization-orthogonality",
            "unbiasedness",            "s-vector-identities",
            "balancedness",            "concentration-shape",
            "gaussian-kernel-fidelity","perturbation-flip-probability",
            "bound-evaluator",         "performance"};
}

std::vector<CriterionResult> run(const VerifyOptions& opts, std::ostream& out) {
    using Fn = CriterionResult (*)();
    const std::pair<const char*, Fn> table[] = {
        {"matvec-equivalence", c_matvec_equivalence},
        {"sigma-closed-forms", c_sigma_closed_forms},
        {"chromatic-reproductions", c_chromatic_reproductions},
        {"normalization-orthogonality", c_normalization_orthogonality},
        {"unbiasedness", c_unbiasedness},
        {"s-vector-identities", c_s_vector_identities},
        {"balancedness", c_balancedness},
        {"concentration-shape", c_concentration_shape},
        {"gaussian-kernel-fidelity", c_gaussian_kernel_fidelity},
        {"perturbation-flip-probability", c_perturbation_flip_probability},
        {"bound-evaluator", c_bound_evaluator},
        {"performance", c_performance},
    };
    for (const std::string& name : opts.only) {
        bool known = false;
        for (const auto& [slug, fn] : table) known = known || name == slug;
        if (!known) throw std::invalid_argument("unknown criterion '" + name + "'");
    }
    std::vector<CriterionResult> results;
    for (const auto& [slug, fn] : table) {
        if (!opts.only.empty() &&
            std::find(opts.only.begin(), opts.only.end(), slug) == opts.only.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.name = slug;
            r.pass = false;
            r.detail = std::string("unexpected exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool soft = r.perf && opts.perf_soft && !r.pass;
        out << (r.pass ? "[PASS] " : (soft ? "[WARN] " : "[FAIL] ")) << r.name << ": "
            << r.detail << " (" << fmt(r.seconds) << "s)\n";
        out.flush();
        results.push_back(std::move(r));
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results, bool perf_soft) {
    for (const auto& r : results)
        if (!r.pass && !(perf_soft && r.perf)) return false;
    return true;
}

}  // namespace structembed::verify
