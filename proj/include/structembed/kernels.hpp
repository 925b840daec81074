#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "structembed/fwht.hpp"
#include "structembed/rng.hpp"
#include "structembed/structured.hpp"

namespace structembed {

enum class NonlinearityKind { identity, heaviside, relu, arccos_power, sine, cosine, sincos };

struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::identity;
    int b = 1;  // arccos_power exponent; 0 reduces to heaviside, 1 to relu
};

std::string nonlinearity_name(const Nonlinearity& f);
Nonlinearity parse_nonlinearity(const std::string& name);  // e.g. "relu", "arccos_power:2"

/// Pointwise f(x).  sincos is not a pointwise map (it doubles the feature
/// dimension) and is rejected here; embed handles it.
double apply_nonlinearity(const Nonlinearity& f, double x);

/// True when exact_kernel has a closed form for f.
bool has_exact_kernel(const Nonlinearity& f);

/// sup |f| on the reachable domain for bounded f, empty otherwise.
std::optional<double> bounded_f_max(const Nonlinearity& f);

// The full estimator: preprocess with D1 H D0, project with a structured
// Gaussian matrix, apply f pointwise.  One seed pins the budget and both
// sign diagonals through separate substreams.
class EmbeddingPipeline {
public:
    static EmbeddingPipeline make(FamilySpec fam, std::size_t m, std::size_t n,
                                  const Nonlinearity& f, std::uint64_t seed);

    const StructuredMatrix& matrix() const noexcept { return matrix_; }
    const SignDiagonal& d0() const noexcept { return d0_; }
    const SignDiagonal& d1() const noexcept { return d1_; }
    const Nonlinearity& f() const noexcept { return f_; }
    std::size_t padded_n() const noexcept { return matrix_.cols(); }
    std::size_t m() const noexcept { return matrix_.rows(); }
    std::uint64_t seed() const noexcept { return seed_; }

    /// The linear part y = A * (D1 H D0 * pad(v)).  Length m.
    std::vector<double> linear_part(const std::vector<double>& v) const;

    /// f applied to the linear part; length m, or 2m interleaved
    /// (sin(y_i), cos(y_i)) for sincos.
    std::vector<double> embed(const std::vector<double>& v) const;

private:
    EmbeddingPipeline(StructuredMatrix matrix, SignDiagonal d0, SignDiagonal d1,
                      const Nonlinearity& f, std::uint64_t seed)
        : matrix_(std::move(matrix)), d0_(std::move(d0)), d1_(std::move(d1)), f_(f),
          seed_(seed) {}

    StructuredMatrix matrix_;
    SignDiagonal d0_, d1_;
    Nonlinearity f_;
    std::uint64_t seed_ = 0;
};

/// (1/m) sum_i f(y1_i) f(y2_i); for sincos, (1/m) sum_i cos(y1_i - y2_i),
/// the angle-difference form of the interleaved sin/cos feature products
/// (keeps estimate_pair(v, v) equal to 1 exactly).
double estimate_pair(const EmbeddingPipeline& P, const std::vector<double>& v1,
                     const std::vector<double>& v2);

/// General combiner: Psi(beta over coordinate 1, ..., beta over coordinate m).
/// estimate_pair is the specialization beta=product, psi=mean, k=2 (bit for
/// bit).  sincos features come in pairs and are rejected here.
double estimate_tuple(const EmbeddingPipeline& P,
                      const std::function<double(const std::vector<double>&)>& beta,
                      const std::function<double(const std::vector<double>&)>& psi,
                      const std::vector<std::vector<double>>& vs);

/// Chains pipelines, feeding each embedding to the next stage (the recursive
/// arc-cosine construction).  No closed form; compare against mc_oracle.
std::vector<double> embed_recursive(const std::vector<EmbeddingPipeline>& stages,
                                    const std::vector<double>& v);

/// Closed-form E[f(<r,v1>) f(<r,v2>)] over standard Gaussian r.
///   identity  -> <v1, v2>
///   heaviside -> (pi - theta) / (2 pi)   [orthant value; Monte-Carlo
///                confirmed -- see mc_oracle tests]
///   relu      -> ||v1|| ||v2|| (sin theta + (pi - theta) cos theta) / (2 pi)
///   sincos    -> exp(-||v1 - v2||^2 / 2)
/// Angle-based kernels reject zero vectors; other f have no closed form.
double exact_kernel(const Nonlinearity& f, const std::vector<double>& v1,
                    const std::vector<double>& v2);

struct OracleResult {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
};

/// Brute-force estimate of E[f(<r,v1>) f(<r,v2>)] over fresh i.i.d. Gaussian
/// r: the ground-truth arbiter for every closed form.  trials >= 100.
OracleResult mc_oracle(const Nonlinearity& f, const std::vector<double>& v1,
                       const std::vector<double>& v2, std::size_t trials, std::uint64_t seed);

struct SweepRow {
    std::size_t m = 0;
    Family family = Family::circulant;
    Nonlinearity f;
    double rmse = 0.0;
    double max_abs_error = 0.0;
    std::size_t pair_count = 0;
    std::size_t reps = 0;
};

/// Estimation error against exact_kernel over dataset pairs, for each m and
/// repetition with fresh pipeline seeds; aggregates per m.  Pairs are all
/// i < j, down-sampled deterministically above max_pairs.
std::vector<SweepRow> error_sweep(const std::vector<std::vector<double>>& dataset,
                                  FamilySpec fam, const Nonlinearity& f,
                                  const std::vector<std::size_t>& m_values, std::size_t reps,
                                  std::uint64_t seed, std::size_t max_pairs = 1000);

}  // namespace structembed
