// structembed: structured Gaussian embeddings, coherence diagnostics, kernel
// estimation, and closed-form concentration bounds from one command line.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
// cap exceeded, 4 malformed input data.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "structembed/bounds.hpp"
#include "structembed/dataset.hpp"
#include "structembed/diagnostics.hpp"
#include "structembed/errors.hpp"
#include "structembed/fwht.hpp"
#include "structembed/kernels.hpp"
#include "structembed/parallel.hpp"
#include "structembed/structured.hpp"
#include "structembed/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace se = structembed;

namespace {

constexpr std::uint64_t kDefaultSeed = 0x5EED;  // 24301

struct Options {
    std::vector<std::string> families{"circulant"};
    std::size_t n = 0;  // 0: take the dataset dimension (or the bench default)
    std::size_t m = 64;
    std::string f = "identity";
    std::string dataset;
    std::vector<std::size_t> m_values;
    std::size_t reps = 5;
    double tau = 0.25;
    double eps = 0.01;
    std::uint64_t seed = kDefaultSeed;
    std::size_t oracle_trials = 0;
    std::string output;
    bool exact_chi = false;
    std::size_t max_pairs = 1000;
    int ldr_r = 2;
    int ldr_a = 2;
    std::vector<std::size_t> export_graph;  // two row indices
    std::vector<std::string> only;
    bool perf_soft = false;
    bool corrupt_sigma = false;
    int threads = 0;
    bool m_set = false;
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open output file '" + path + "'");
    return file;
}

se::FamilySpec family_spec(const Options& opt, std::size_t which = 0) {
    se::FamilySpec spec;
    spec.family = se::parse_family(opt.families.at(which));
    spec.r = opt.ldr_r;
    spec.a = opt.ldr_a;
    return spec;
}

void require_single_family(const Options& opt) {
    if (opt.families.size() != 1)
        throw std::invalid_argument("this command takes exactly one --family");
}

// ---------------------------------------------------------------------------
// diagnose: build one model and report its coherence statistics.
// ---------------------------------------------------------------------------

int cmd_diagnose(const Options& opt) {
    require_single_family(opt);
    if (opt.n == 0) throw std::invalid_argument("diagnose requires --n");
    const std::size_t n_eff = se::pad_pow2(opt.n);
    const se::FamilySpec spec = family_spec(opt);
    const se::StructuredMatrix M = se::StructuredMatrix::build(spec, opt.m, n_eff, opt.seed);

    se::StatsOptions stats_opts;
    stats_opts.exact_chi = opt.exact_chi;
    const se::PModelStats stats = se::model_stats(M, stats_opts);

    std::ofstream file;
    std::ostream& out = open_output(opt.output, file);
    out << "family=" << se::family_name(spec.family) << "\n";
    out << "requested_n=" << opt.n << "\n";
    out << "n=" << n_eff << "\n";
    out << "m=" << opt.m << "\n";
    out << "t=" << M.t() << "\n";
    out << "seed=" << opt.seed << "\n";
    out << "chi=" << stats.chi << "\n";
    out << "chi_exact=" << (stats.chi_is_exact ? 1 : 0) << "\n";
    out << "mu=" << se::format_float(stats.mu) << "\n";
    out << "mu_tilde=" << se::format_float(stats.mu_tilde) << "\n";
    out << "normalized=" << (stats.normalized ? 1 : 0) << "\n";
    out << "orthogonal=" << (stats.orthogonal ? 1 : 0) << "\n";

    if (!opt.export_graph.empty()) {
        if (opt.export_graph.size() != 2)
            throw std::invalid_argument("--export-graph takes exactly two row indices");
        const se::CoherenceGraph G =
            se::coherence_graph(M, opt.export_graph[0], opt.export_graph[1]);
        out << "graph_vertices=" << G.vertices.size() << "\n";
        out << "graph_edges=" << G.edge_count << "\n";
        se::write_graph_edges(out, G);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// estimate: one CSV row per dataset pair.
// ---------------------------------------------------------------------------

// Deterministic even-stride selection of `cap` of the C(c,2) pairs, in
// lexicographic order.
std::vector<std::pair<std::size_t, std::size_t>> select_pairs(std::size_t c, std::size_t cap) {
    const std::size_t total = c * (c - 1) / 2;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t take = std::min(total, cap);
    out.reserve(take);
    for (std::size_t q = 0; q < take; ++q) {
        std::size_t linear = total <= cap ? q : (q * total) / cap;
        std::size_t i = 0;
        std::size_t row = c - 1;  // pairs that start with i
        while (linear >= row) {
            linear -= row;
            ++i;
            --row;
        }
        out.emplace_back(i, i + 1 + linear);
    }
    return out;
}

int cmd_estimate(const Options& opt) {
    require_single_family(opt);
    if (opt.dataset.empty()) throw std::invalid_argument("estimate requires --dataset");
    const auto data = se::load_dataset(opt.dataset);
    if (data.size() < 2) throw se::data_error("dataset needs at least two vectors", 0);

    const std::size_t dim = data[0].size();
    const std::size_t n_eff = se::pad_pow2(std::max(opt.n, dim));
    const se::FamilySpec spec = family_spec(opt);
    const se::Nonlinearity f = se::parse_nonlinearity(opt.f);
    const se::EmbeddingPipeline P =
        se::EmbeddingPipeline::make(spec, opt.m, n_eff, f, opt.seed);
    const bool closed_form = se::has_exact_kernel(f);

    std::ofstream file;
    std::ostream& out = open_output(opt.output, file);
    out << "# n=" << n_eff << " (requested " << std::max(opt.n, dim) << ")\n";
    out << "m,family,f,pair_id,estimate,exact,abs_error,seed";
    if (opt.oracle_trials > 0) out << ",oracle_mean,oracle_stderr";
    out << "\n";

    const auto pairs = select_pairs(data.size(), opt.max_pairs);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        const auto [i, j] = pairs[q];
        const double est = se::estimate_pair(P, data[i], data[j]);
        out << opt.m << ',' << se::family_name(spec.family) << ','
            << se::nonlinearity_name(f) << ',' << i << '-' << j << ','
            << se::format_float(est) << ',';
        if (closed_form) {
            const double exact = se::exact_kernel(f, data[i], data[j]);
            out << se::format_float(exact) << ',' << se::format_float(std::fabs(est - exact));
        } else {
            out << ',';
        }
        out << ',' << opt.seed;
        if (opt.oracle_trials > 0) {
            const se::OracleResult o = se::mc_oracle(f, data[i], data[j], opt.oracle_trials,
                                                     se::derive_stream(opt.seed, 0xFACE + q));
            out << ',' << se::format_float(o.mean) << ',' << se::format_float(o.se);
        }
        out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep: estimation error against the closed-form kernel as m grows, with
// the matching concentration thresholds alongside.
// ---------------------------------------------------------------------------

int cmd_sweep(const Options& opt) {
    require_single_family(opt);
    if (opt.dataset.empty()) throw std::invalid_argument("sweep requires --dataset");
    if (opt.m_values.empty()) throw std::invalid_argument("sweep requires --m-values");
    const auto data = se::load_dataset(opt.dataset);
    if (data.size() < 2) throw se::data_error("dataset needs at least two vectors", 0);

    const se::FamilySpec spec = family_spec(opt);
    const se::Nonlinearity f = se::parse_nonlinearity(opt.f);
    const auto rows =
        se::error_sweep(data, spec, f, opt.m_values, opt.reps, opt.seed, opt.max_pairs);

    const double N = static_cast<double>(data.size());
    const auto f_max = se::bounded_f_max(f);
    const bool lipschitz = f.kind == se::NonlinearityKind::sine ||
                           f.kind == se::NonlinearityKind::cosine ||
                           f.kind == se::NonlinearityKind::sincos;

    std::ofstream file;
    std::ostream& out = open_output(opt.output, file);
    out << "# n=" << se::pad_pow2(data[0].size()) << " (requested " << data[0].size() << ")\n";
    out << "m,family,f,pair_count,reps,rmse,max_abs_error,cor1_threshold,cor1_tail,"
           "cor2_threshold,cor2_tail,seed\n";
    for (const auto& row : rows) {
        out << row.m << ',' << se::family_name(row.family) << ','
            << se::nonlinearity_name(row.f) << ',' << row.pair_count << ',' << row.reps << ','
            << se::format_float(row.rmse) << ',' << se::format_float(row.max_abs_error) << ',';
        if (row.m >= 2) {
            out << se::format_float(se::cor1_threshold(row.m, opt.tau)) << ','
                << se::format_float(se::cor1_tail(N, row.m, opt.tau)) << ',';
        } else {
            out << ",,";
        }
        if (row.m >= 2 && lipschitz && f_max) {
            // Two coordinates each move at most eps; slope of sin/cos is at most 1.
            const double rho = 2.0 * opt.eps;
            out << se::format_float(se::cor2_threshold(row.m, opt.tau, *f_max, rho)) << ','
                << se::format_float(se::cor2_tail(N, row.m, opt.tau, *f_max));
        } else {
            out << ',';
        }
        out << ',' << opt.seed << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bench: wall-clock medians for the structured matvec against the dense
// product, plus the parallel-vs-serial dense comparison.
// ---------------------------------------------------------------------------

double time_median(std::size_t reps, const std::function<void()>& fn) {
    using clock = std::chrono::steady_clock;
    std::vector<double> ts;
    ts.reserve(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        const auto t0 = clock::now();
        fn();
        ts.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }
    std::sort(ts.begin(), ts.end());
    const std::size_t k = ts.size();
    return k % 2 ? ts[k / 2] : 0.5 * (ts[k / 2 - 1] + ts[k / 2]);
}

int cmd_bench(const Options& opt) {
    const std::size_t n_eff = se::pad_pow2(opt.n == 0 ? (std::size_t{1} << 14) : opt.n);
    const std::size_t m_eff = opt.m_set ? std::min(opt.m, n_eff) : n_eff;
    const std::size_t reps = std::max<std::size_t>(opt.reps, 1);

    std::ofstream file;
    std::ostream& out = open_output(opt.output, file);
    out << "benchmark,family,n,m,reps,median_seconds,baseline_median_seconds,speedup\n";

    // One dense baseline per run; skipped (with a warning) if it cannot fit.
    std::vector<double> dense;
    double dense_median = 0.0;
    bool have_dense = false;

    for (std::size_t which = 0; which < opt.families.size(); ++which) {
        const se::FamilySpec spec = family_spec(opt, which);
        const se::StructuredMatrix M =
            se::StructuredMatrix::build(spec, m_eff, n_eff, opt.seed);
        std::vector<double> v(n_eff);
        const se::CounterRng rng(opt.seed ^ 0xBE7Cull);
        for (std::size_t i = 0; i < n_eff; ++i) v[i] = rng.normal_at(i);

        volatile double sink = 0.0;
        std::vector<double> y = M.matvec(v);  // warm-up
        sink = sink + y[0];
        const double struct_median =
            time_median(reps, [&] { sink = sink + M.matvec(v)[0]; });

        if (!have_dense && dense.empty()) {
            try {
                dense = M.materialize(std::size_t{1} << 29);
                y = se::dense_matvec(dense, m_eff, n_eff, v);
                sink = sink + y[0];
                dense_median = time_median(
                    reps, [&] { sink = sink + se::dense_matvec(dense, m_eff, n_eff, v)[0]; });
                have_dense = true;
            } catch (const std::bad_alloc&) {
                std::cerr << "warning: dense baseline skipped (allocation failed at " << m_eff
                          << "x" << n_eff << ")\n";
                dense.clear();
            } catch (const se::resource_limit_error& e) {
                std::cerr << "warning: dense baseline skipped (" << e.what() << ")\n";
                dense.clear();
            }
        }
        (void)sink;

        out << "matvec_structured_vs_dense," << se::family_name(spec.family) << ',' << n_eff
            << ',' << m_eff << ',' << reps << ',' << se::format_float(struct_median) << ',';
        if (have_dense)
            out << se::format_float(dense_median) << ','
                << se::format_float(dense_median / struct_median);
        else
            out << ',';
        out << "\n";
    }

    if (have_dense) {
        volatile double sink = 0.0;
        const std::vector<double> v = [&] {
            std::vector<double> w(n_eff);
            const se::CounterRng rng(opt.seed ^ 0xBE7Cull);
            for (std::size_t i = 0; i < n_eff; ++i) w[i] = rng.normal_at(i);
            return w;
        }();
        const double par = time_median(
            reps, [&] { sink = sink + se::dense_matvec(dense, m_eff, n_eff, v)[0]; });
        const double ser = time_median(
            reps, [&] { sink = sink + se::dense_matvec_serial(dense, m_eff, n_eff, v)[0]; });
        (void)sink;
        out << "dense_omp_vs_serial,dense," << n_eff << ',' << m_eff << ',' << reps << ','
            << se::format_float(par) << ',' << se::format_float(ser) << ','
            << se::format_float(ser / par) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify: the self-acceptance suite.
// ---------------------------------------------------------------------------

int cmd_verify(const Options& opt) {
    se::testhooks::corrupt_sigma = opt.corrupt_sigma;
    se::verify::VerifyOptions vopts;
    vopts.only = opt.only;
    vopts.perf_soft = opt.perf_soft;
    const auto results = se::verify::run(vopts, std::cout);
    return se::verify::all_passed(results, vopts.perf_soft) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"structured Gaussian embeddings: subquadratic kernel estimation,\n"
                 "coherence diagnostics, and closed-form concentration bounds"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value file; command-line flags win");

    app.add_option("--family", opt.families,
                   "matrix family: unstructured, circulant, skew_circulant, toeplitz, "
                   "hankel, ldr (bench accepts several)")
        ->delimiter(',');
    app.add_option("--n", opt.n, "ambient dimension; rounded up to a power of two");
    auto* m_opt = app.add_option("--m", opt.m, "number of embedding rows (default 64)");
    app.add_option("--f", opt.f,
                   "nonlinearity: identity, heaviside, relu, arccos_power:B, sine, cosine, "
                   "sincos");
    app.add_option("--dataset", opt.dataset, "input vectors, one per line");
    app.add_option("--m-values", opt.m_values, "comma-separated row counts for sweep")
        ->delimiter(',');
    app.add_option("--reps", opt.reps, "repetitions per measurement (default 5)");
    app.add_option("--tau", opt.tau, "threshold exponent in (0, 0.5) (default 0.25)");
    app.add_option("--eps", opt.eps, "perturbation radius (default 0.01)");
    app.add_option("--seed", opt.seed, "RNG seed (default 24301)");
    app.add_option("--oracle", opt.oracle_trials,
                   "append Monte-Carlo oracle columns using this many trials");
    app.add_option("--output", opt.output, "write results here instead of stdout");
    app.add_flag("--exact", opt.exact_chi, "exact chromatic number instead of greedy bound");
    app.add_option("--max-pairs", opt.max_pairs, "cap on dataset pairs (default 1000)");
    app.add_option("--ldr-r", opt.ldr_r, "ldr: displacement rank (default 2)");
    app.add_option("--ldr-a", opt.ldr_a, "ldr: nonzeros per displacement vector (default 2)");
    app.add_option("--export-graph", opt.export_graph,
                   "diagnose: emit the coherence graph of this row pair, e.g. 0,1")
        ->delimiter(',');
    app.add_option("--only", opt.only, "verify: run only these criteria")->delimiter(',');
    app.add_flag("--perf-soft", opt.perf_soft,
                 "verify: report performance failures without failing the run");
    app.add_flag("--corrupt-sigma", opt.corrupt_sigma)->group("");  // negative control
    app.add_option("--threads", opt.threads, "worker thread cap (0 = library default)");

    CLI::App* diagnose = app.add_subcommand("diagnose", "coherence statistics of one model");
    CLI::App* estimate = app.add_subcommand("estimate", "kernel estimates for dataset pairs");
    CLI::App* sweep = app.add_subcommand("sweep", "estimation error as the row count grows");
    CLI::App* bench = app.add_subcommand("bench", "matvec wall-clock comparison");
    CLI::App* verify = app.add_subcommand("verify", "run the self-acceptance suite");
    for (CLI::App* sub : {diagnose, estimate, sweep, bench, verify}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    opt.m_set = m_opt->count() > 0;

#ifdef _OPENMP
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
#endif

    try {
        if (diagnose->parsed()) return cmd_diagnose(opt);
        if (estimate->parsed()) return cmd_estimate(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (bench->parsed()) return cmd_bench(opt);
        if (verify->parsed()) return cmd_verify(opt);
        std::cerr << "no command given\n";
        return 2;
    } catch (const se::data_error& e) {
        std::cerr << "data error";
        if (e.line() > 0) std::cerr << " at line " << e.line();
        std::cerr << ": " << e.what() << "\n";
        return 4;
    } catch (const se::resource_limit_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource limit: allocation failed\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
