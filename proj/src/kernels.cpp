#include "structembed/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "structembed/parallel.hpp"

namespace structembed {

namespace {

constexpr std::uint64_t kBudgetStream = 0;
constexpr std::uint64_t kD0Stream = 1;
constexpr std::uint64_t kD1Stream = 2;

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double angle_between(const std::vector<double>& v1, const std::vector<double>& v2) {
    const double n1 = norm(v1);
    const double n2 = norm(v2);
    if (n1 == 0.0 || n2 == 0.0)
        throw std::invalid_argument("exact_kernel: zero vector for an angle-based kernel");
    const double c = std::clamp(dot(v1, v2) / (n1 * n2), -1.0, 1.0);
    return std::acos(c);
}

}  // namespace

std::string nonlinearity_name(const Nonlinearity& f) {
    switch (f.kind) {
        case NonlinearityKind::identity: return "identity";
        case NonlinearityKind::heaviside: return "heaviside";
        case NonlinearityKind::relu: return "relu";
        case NonlinearityKind::arccos_power: return "arccos_power:" + std::to_string(f.b);
        case NonlinearityKind::sine: return "sine";
        case NonlinearityKind::cosine: return "cosine";
        case NonlinearityKind::sincos: return "sincos";
    }
    throw std::invalid_argument("nonlinearity_name: unknown kind");
}

Nonlinearity parse_nonlinearity(const std::string& name) {
    if (name == "identity") return {NonlinearityKind::identity, 1};
    if (name == "heaviside") return {NonlinearityKind::heaviside, 0};
    if (name == "relu") return {NonlinearityKind::relu, 1};
    if (name == "sine") return {NonlinearityKind::sine, 1};
    if (name == "cosine") return {NonlinearityKind::cosine, 1};
    if (name == "sincos") return {NonlinearityKind::sincos, 1};
    const std::string prefix = "arccos_power:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string tail = name.substr(prefix.size());
        try {
            const int b = std::stoi(tail);
            if (b < 0 || std::to_string(b) != tail) throw std::invalid_argument(name);
            return {NonlinearityKind::arccos_power, b};
        } catch (const std::exception&) {
            throw std::invalid_argument("unknown nonlinearity: " + name);
        }
    }
    throw std::invalid_argument("unknown nonlinearity: " + name);
}

double apply_nonlinearity(const Nonlinearity& f, double x) {
    switch (f.kind) {
        case NonlinearityKind::identity:
            return x;
        case NonlinearityKind::heaviside:
            return x >= 0.0 ? 1.0 : 0.0;
        case NonlinearityKind::relu:
            return x > 0.0 ? x : 0.0;
        case NonlinearityKind::arccos_power:
            if (f.b == 0) return x >= 0.0 ? 1.0 : 0.0;
            if (f.b == 1) return x > 0.0 ? x : 0.0;
            return x > 0.0 ? std::pow(x, f.b) : 0.0;
        case NonlinearityKind::sine:
            return std::sin(x);
        case NonlinearityKind::cosine:
            return std::cos(x);
        case NonlinearityKind::sincos:
            break;
    }
    throw std::invalid_argument("apply_nonlinearity: sincos is not a pointwise map");
}

bool has_exact_kernel(const Nonlinearity& f) {
    switch (f.kind) {
        case NonlinearityKind::identity:
        case NonlinearityKind::heaviside:
        case NonlinearityKind::relu:
        case NonlinearityKind::sincos:
            return true;
        case NonlinearityKind::arccos_power:
            return f.b <= 1;
        case NonlinearityKind::sine:
        case NonlinearityKind::cosine:
            return false;
    }
    return false;
}

std::optional<double> bounded_f_max(const Nonlinearity& f) {
    switch (f.kind) {
        case NonlinearityKind::heaviside:
        case NonlinearityKind::sine:
        case NonlinearityKind::cosine:
        case NonlinearityKind::sincos:
            return 1.0;
        case NonlinearityKind::arccos_power:
            if (f.b == 0) return 1.0;
            return std::nullopt;
        case NonlinearityKind::identity:
        case NonlinearityKind::relu:
            return std::nullopt;
    }
    return std::nullopt;
}

EmbeddingPipeline EmbeddingPipeline::make(FamilySpec fam, std::size_t m, std::size_t n,
                                          const Nonlinearity& f, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("EmbeddingPipeline: n must be >= 1");
    const std::size_t padded = pad_pow2(n);
    return EmbeddingPipeline(
        StructuredMatrix::build(fam, m, padded, derive_stream(seed, kBudgetStream)),
        sample_signs(derive_stream(seed, kD0Stream), padded),
        sample_signs(derive_stream(seed, kD1Stream), padded), f, seed);
}

std::vector<double> EmbeddingPipeline::linear_part(const std::vector<double>& v) const {
    const std::size_t padded = padded_n();
    if (v.size() > padded) throw std::invalid_argument("embed: vector longer than padded_n");
    require_finite(v, "embed");
    std::vector<double> x(padded, 0.0);
    std::copy(v.begin(), v.end(), x.begin());
    return matrix_.matvec(preprocess(x, d0_, d1_));
}

std::vector<double> EmbeddingPipeline::embed(const std::vector<double>& v) const {
    const std::vector<double> y = linear_part(v);
    if (f_.kind == NonlinearityKind::sincos) {
        std::vector<double> out(2 * y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            out[2 * i] = std::sin(y[i]);
            out[2 * i + 1] = std::cos(y[i]);
        }
        return out;
    }
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = apply_nonlinearity(f_, y[i]);
    return out;
}

double estimate_pair(const EmbeddingPipeline& P, const std::vector<double>& v1,
                     const std::vector<double>& v2) {
    const std::vector<double> y1 = P.linear_part(v1);
    const std::vector<double> y2 = P.linear_part(v2);
    const std::size_t m = y1.size();
    double acc = 0.0;
    if (P.f().kind == NonlinearityKind::sincos) {
        for (std::size_t i = 0; i < m; ++i) acc += std::cos(y1[i] - y2[i]);
    } else {
        for (std::size_t i = 0; i < m; ++i)
            acc += apply_nonlinearity(P.f(), y1[i]) * apply_nonlinearity(P.f(), y2[i]);
    }
    return acc / static_cast<double>(m);
}

double estimate_tuple(const EmbeddingPipeline& P,
                      const std::function<double(const std::vector<double>&)>& beta,
                      const std::function<double(const std::vector<double>&)>& psi,
                      const std::vector<std::vector<double>>& vs) {
    if (vs.empty()) throw std::invalid_argument("estimate_tuple: need k >= 1 vectors");
    if (P.f().kind == NonlinearityKind::sincos)
        throw std::invalid_argument(
            "estimate_tuple: sincos features are paired; use estimate_pair");
    const std::size_t k = vs.size();
    const std::size_t m = P.m();
    std::vector<std::vector<double>> emb(k);
    for (std::size_t j = 0; j < k; ++j) emb[j] = P.embed(vs[j]);
    std::vector<double> per_coordinate(m);
    std::vector<double> args(k);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) args[j] = emb[j][i];
        per_coordinate[i] = beta(args);
    }
    return psi(per_coordinate);
}

std::vector<double> embed_recursive(const std::vector<EmbeddingPipeline>& stages,
                                    const std::vector<double>& v) {
    if (stages.empty()) throw std::invalid_argument("embed_recursive: need at least one stage");
    std::vector<double> cur = v;
    for (const EmbeddingPipeline& stage : stages) cur = stage.embed(cur);
    return cur;
}

double exact_kernel(const Nonlinearity& f, const std::vector<double>& v1,
                    const std::vector<double>& v2) {
    if (v1.size() != v2.size()) throw std::invalid_argument("exact_kernel: dimension mismatch");
    require_finite(v1, "exact_kernel");
    require_finite(v2, "exact_kernel");
    switch (f.kind) {
        case NonlinearityKind::identity:
            return dot(v1, v2);
        case NonlinearityKind::heaviside: {
            const double theta = angle_between(v1, v2);
            return (std::numbers::pi - theta) / (2.0 * std::numbers::pi);
        }
        case NonlinearityKind::arccos_power:
            if (f.b == 0) {
                const double theta = angle_between(v1, v2);
                return (std::numbers::pi - theta) / (2.0 * std::numbers::pi);
            }
            if (f.b == 1) {
                const double theta = angle_between(v1, v2);
                return norm(v1) * norm(v2) *
                       (std::sin(theta) + (std::numbers::pi - theta) * std::cos(theta)) /
                       (2.0 * std::numbers::pi);
            }
            break;
        case NonlinearityKind::relu: {
            const double theta = angle_between(v1, v2);
            return norm(v1) * norm(v2) *
                   (std::sin(theta) + (std::numbers::pi - theta) * std::cos(theta)) /
                   (2.0 * std::numbers::pi);
        }
        case NonlinearityKind::sincos: {
            double d2 = 0.0;
            for (std::size_t i = 0; i < v1.size(); ++i) {
                const double d = v1[i] - v2[i];
                d2 += d * d;
            }
            return std::exp(-d2 / 2.0);
        }
        case NonlinearityKind::sine:
        case NonlinearityKind::cosine:
            break;
    }
    throw std::invalid_argument("exact_kernel: no closed form for " + nonlinearity_name(f));
}

OracleResult mc_oracle(const Nonlinearity& f, const std::vector<double>& v1,
                       const std::vector<double>& v2, std::size_t trials, std::uint64_t seed) {
    if (trials < 100) throw std::invalid_argument("mc_oracle: trials must be >= 100");
    const std::size_t n = v1.size();
    if (n == 0 || v2.size() != n) throw std::invalid_argument("mc_oracle: dimension mismatch");
    require_finite(v1, "mc_oracle");
    require_finite(v2, "mc_oracle");

    const bool pair_form = f.kind == NonlinearityKind::sincos;
    constexpr std::size_t kChunk = 8192;
    const std::size_t num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<double> part_sum(num_chunks, 0.0), part_sq(num_chunks, 0.0);
    parallel_chunks(trials, kChunk, [&](std::size_t first, std::size_t last, std::size_t slot) {
        double acc = 0.0, acc_sq = 0.0;
        std::vector<double> r(n);
        for (std::size_t trial = first; trial < last; ++trial) {
            const CounterRng rng(seed, trial);  // one substream per trial
            for (std::size_t k = 0; 2 * k < n; ++k) {
                double z0, z1;
                rng.normal_pair_at(k, z0, z1);
                r[2 * k] = z0;
                if (2 * k + 1 < n) r[2 * k + 1] = z1;
            }
            const double y1 = dot(r, v1);
            const double y2 = dot(r, v2);
            const double val = pair_form
                                   ? std::cos(y1 - y2)
                                   : apply_nonlinearity(f, y1) * apply_nonlinearity(f, y2);
            acc += val;
            acc_sq += val * val;
        }
        part_sum[slot] = acc;
        part_sq[slot] = acc_sq;
    });
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t c = 0; c < num_chunks; ++c) {
        sum += part_sum[c];
        sum_sq += part_sq[c];
    }
    OracleResult out;
    const double T = static_cast<double>(trials);
    out.mean = sum / T;
    const double var = std::max(0.0, (sum_sq - T * out.mean * out.mean) / (T - 1.0));
    out.se = std::sqrt(var / T);
    return out;
}

std::vector<SweepRow> error_sweep(const std::vector<std::vector<double>>& dataset,
                                  FamilySpec fam, const Nonlinearity& f,
                                  const std::vector<std::size_t>& m_values, std::size_t reps,
                                  std::uint64_t seed, std::size_t max_pairs) {
    if (dataset.empty()) throw std::invalid_argument("error_sweep: empty dataset");
    if (dataset.size() < 2)
        throw std::invalid_argument("error_sweep: need at least two vectors to form pairs");
    if (m_values.empty()) throw std::invalid_argument("error_sweep: no m values");
    for (std::size_t m : m_values)
        if (m == 0) throw std::invalid_argument("error_sweep: m must be >= 1");
    if (reps == 0) throw std::invalid_argument("error_sweep: reps must be >= 1");
    if (max_pairs == 0) throw std::invalid_argument("error_sweep: max_pairs must be >= 1");
    if (!has_exact_kernel(f))
        throw std::invalid_argument("error_sweep: " + nonlinearity_name(f) +
                                    " has no exact kernel to measure against");
    const std::size_t N = dataset.size();
    const std::size_t n = dataset[0].size();
    for (const auto& v : dataset) {
        if (v.size() != n) throw std::invalid_argument("error_sweep: ragged dataset");
        require_finite(v, "error_sweep");
    }
    // Validate every (family, m, n) combination up front: worker tasks run
    // inside an OpenMP region where an exception would be fatal.
    if (fam.family != Family::unstructured)
        for (std::size_t m : m_values)
            if (m > pad_pow2(n))
                throw std::invalid_argument("error_sweep: m exceeds the padded dimension");

    // Deterministic pair selection: everything when small, otherwise a
    // seeded sample of distinct pairs.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const std::size_t total_pairs = N * (N - 1) / 2;
    if (total_pairs <= max_pairs) {
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) pairs.emplace_back(i, j);
    } else {
        const CounterRng rng(seed, 0x70616972);  // "pair"
        std::set<std::pair<std::size_t, std::size_t>> chosen;
        std::uint64_t draw = 0;
        while (chosen.size() < max_pairs) {
            const std::size_t i = rng.below(2 * draw, N);
            const std::size_t j = rng.below(2 * draw + 1, N);
            ++draw;
            if (i == j) continue;
            chosen.emplace(std::min(i, j), std::max(i, j));
        }
        pairs.assign(chosen.begin(), chosen.end());
    }

    std::vector<double> exact(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p)
        exact[p] = exact_kernel(f, dataset[pairs[p].first], dataset[pairs[p].second]);

    struct Partial {
        double sq_sum = 0.0;
        double max_abs = 0.0;
    };
    std::vector<SweepRow> rows;
    for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
        const std::size_t m = m_values[mi];
        std::vector<Partial> parts(reps);
        // One task per repetition; the pipeline seed depends only on the
        // task index, so thread count cannot change any result.
        parallel_chunks(reps, 1, [&](std::size_t first, std::size_t, std::size_t slot) {
            const std::size_t rep = first;
            const std::uint64_t task_seed = derive_stream(seed, mi * reps + rep + 1);
            const EmbeddingPipeline P = EmbeddingPipeline::make(fam, m, n, f, task_seed);
            std::vector<std::vector<double>> y(N);
            std::vector<bool> have(N, false);
            Partial part;
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                for (std::size_t v : {pairs[p].first, pairs[p].second}) {
                    if (!have[v]) {
                        y[v] = P.linear_part(dataset[v]);
                        have[v] = true;
                    }
                }
                const std::vector<double>& y1 = y[pairs[p].first];
                const std::vector<double>& y2 = y[pairs[p].second];
                double est = 0.0;
                if (f.kind == NonlinearityKind::sincos) {
                    for (std::size_t i = 0; i < y1.size(); ++i) est += std::cos(y1[i] - y2[i]);
                } else {
                    for (std::size_t i = 0; i < y1.size(); ++i)
                        est += apply_nonlinearity(f, y1[i]) * apply_nonlinearity(f, y2[i]);
                }
                est /= static_cast<double>(y1.size());
                const double err = std::abs(est - exact[p]);
                part.sq_sum += err * err;
                part.max_abs = std::max(part.max_abs, err);
            }
            parts[slot] = part;
        });
        SweepRow row;
        row.m = m;
        row.family = fam.family;
        row.f = f;
        row.pair_count = pairs.size();
        row.reps = reps;
        double sq = 0.0;
        for (const Partial& part : parts) {
            sq += part.sq_sum;
            row.max_abs_error = std::max(row.max_abs_error, part.max_abs);
        }
        row.rmse = std::sqrt(sq / static_cast<double>(pairs.size() * reps));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace structembed
