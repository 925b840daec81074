#include "structembed/structured.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "structembed/errors.hpp"
#include "structembed/fft.hpp"
#include "structembed/fwht.hpp"

namespace structembed {

namespace {

constexpr std::size_t kFastPathMinN = 64;
constexpr std::uint64_t kLdrStreamBase = 0x6C6472;  // "ldr"

// out[i] = sum_j c[(j - i) mod N] * x[j] for i < take, where spec = fft(c)
// and x already has length N.  Conjugating the index twice (reverse, convolve,
// reverse) turns the shift pattern into a plain circular convolution.
std::vector<double> circulant_apply(const std::vector<std::complex<double>>& spec,
                                    const std::vector<double>& x, std::size_t take) {
    const std::size_t N = spec.size();
    std::vector<double> xr(N);
    xr[0] = x[0];
    for (std::size_t j = 1; j < N; ++j) xr[j] = x[N - j];
    const std::vector<double> conv = circular_convolve_spectrum(xr, spec);
    std::vector<double> y(take);
    y[0] = conv[0];
    for (std::size_t i = 1; i < take; ++i) y[i] = conv[N - i];
    return y;
}

std::vector<double> zero_pad(const std::vector<double>& v, std::size_t N) {
    std::vector<double> x(N, 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) x[j] = v[j];
    return x;
}

// Circulant symbol whose (j - i) mod N lookups reproduce a shift family's
// rows for i < m, j < n.  Requires N >= n + m - 1 so the positive and
// negative diagonal bands cannot collide.
enum class WrapKind { circulant_wrap, skew_wrap, toeplitz_tail };

std::vector<double> embed_symbol(const std::vector<double>& g, std::size_t m, std::size_t n,
                                 std::size_t N, WrapKind kind) {
    std::vector<double> c(N, 0.0);
    for (std::size_t d = 0; d < n; ++d) c[d] = g[d];
    for (std::size_t e = 1; e < m; ++e) {
        switch (kind) {
            case WrapKind::circulant_wrap: c[N - e] = g[n - e]; break;
            case WrapKind::skew_wrap: c[N - e] = -g[n - e]; break;
            case WrapKind::toeplitz_tail: c[N - e] = g[n + e - 1]; break;
        }
    }
    return c;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::unstructured: return "unstructured";
        case Family::circulant: return "circulant";
        case Family::skew_circulant: return "skew_circulant";
        case Family::toeplitz: return "toeplitz";
        case Family::hankel: return "hankel";
        case Family::ldr: return "ldr";
    }
    throw std::invalid_argument("family_name: unknown family");
}

Family parse_family(const std::string& name) {
    if (name == "unstructured") return Family::unstructured;
    if (name == "circulant") return Family::circulant;
    if (name == "skew_circulant") return Family::skew_circulant;
    if (name == "toeplitz") return Family::toeplitz;
    if (name == "hankel") return Family::hankel;
    if (name == "ldr") return Family::ldr;
    throw std::invalid_argument("unknown family: " + name);
}

BudgetRef budget_ref(Family f, std::size_t i, std::size_t j, std::size_t /*m*/, std::size_t n) {
    switch (f) {
        case Family::unstructured:
            return {i * n + j, 1.0};
        case Family::circulant:
            return {(j + n - i) % n, 1.0};
        case Family::skew_circulant:
            return {(j + n - i) % n, j < i ? -1.0 : 1.0};
        case Family::toeplitz:
            return j >= i ? BudgetRef{j - i, 1.0} : BudgetRef{n + i - j - 1, 1.0};
        case Family::hankel: {
            const std::size_t jj = n - 1 - j;
            return jj >= i ? BudgetRef{jj - i, 1.0} : BudgetRef{n + i - jj - 1, 1.0};
        }
        case Family::ldr:
            break;
    }
    throw std::invalid_argument("budget_ref: ldr selector columns are not one-hot");
}

StructuredMatrix StructuredMatrix::build(FamilySpec spec, std::size_t m, std::size_t n,
                                         std::uint64_t seed) {
    if (m == 0 || n == 0) throw std::invalid_argument("build: m and n must be >= 1");
    std::size_t t = 0;
    switch (spec.family) {
        case Family::unstructured:
            t = m * n;
            break;
        case Family::circulant:
        case Family::skew_circulant:
            if (m > n) throw std::invalid_argument("build: shift families require m <= n");
            t = n;
            break;
        case Family::toeplitz:
        case Family::hankel:
            if (m > n) throw std::invalid_argument("build: shift families require m <= n");
            t = n + m - 1;
            break;
        case Family::ldr:
            if (m > n) throw std::invalid_argument("build: ldr requires m <= n");
            if (spec.r < 1) throw std::invalid_argument("build: ldr requires r >= 1");
            if (spec.a < 1 || static_cast<std::size_t>(spec.a) > n)
                throw std::invalid_argument("build: ldr requires 1 <= a <= n");
            t = static_cast<std::size_t>(spec.r) * n;
            break;
    }

    StructuredMatrix M;
    M.spec_ = spec;
    M.m_ = m;
    M.n_ = n;
    M.budget_ = sample_gaussian(seed, t);

    if (spec.family == Family::ldr) {
        const std::size_t r = static_cast<std::size_t>(spec.r);
        const std::size_t a = static_cast<std::size_t>(spec.a);
        const double mag = 1.0 / std::sqrt(static_cast<double>(a * r));
        M.h_.resize(r);
        M.h_nz_.resize(r);
        for (std::size_t j = 0; j < r; ++j) {
            CounterRng rng(seed, kLdrStreamBase + j);
            // Partial Fisher-Yates: a distinct positions, uniform over subsets.
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            for (std::size_t k = 0; k < a; ++k) {
                const std::size_t pick = k + rng.below(k, n - k);
                std::swap(idx[k], idx[pick]);
            }
            M.h_[j].assign(n, 0.0);
            M.h_nz_[j].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(a));
            std::sort(M.h_nz_[j].begin(), M.h_nz_[j].end());
            for (std::size_t k = 0; k < a; ++k)
                M.h_[j][M.h_nz_[j][k]] = mag * rng.sign_at(n + k);
        }
    }

    // Precompute convolution symbols here so matvec stays const and reusable.
    M.fast_ = n >= kFastPathMinN && spec.family != Family::unstructured;
    if (M.fast_) {
        const std::vector<double>& g = M.budget_.g;
        switch (spec.family) {
            case Family::circulant:
                if (is_pow2(n)) {
                    M.embed_n_ = n;
                    M.spectra_.push_back(fft_real(g));
                } else {
                    M.embed_n_ = pad_pow2(n + m - 1);
                    M.spectra_.push_back(
                        fft_real(embed_symbol(g, m, n, M.embed_n_, WrapKind::circulant_wrap)));
                }
                break;
            case Family::skew_circulant:
                if (is_pow2(n)) {
                    M.embed_n_ = 2 * n;
                    std::vector<double> w(2 * n);
                    for (std::size_t d = 0; d < n; ++d) {
                        w[d] = g[d];
                        w[n + d] = -g[d];
                    }
                    M.spectra_.push_back(fft_real(w));
                } else {
                    M.embed_n_ = pad_pow2(n + m - 1);
                    M.spectra_.push_back(
                        fft_real(embed_symbol(g, m, n, M.embed_n_, WrapKind::skew_wrap)));
                }
                break;
            case Family::toeplitz:
            case Family::hankel:
                M.embed_n_ = pad_pow2(n + m - 1);
                M.spectra_.push_back(
                    fft_real(embed_symbol(g, m, n, M.embed_n_, WrapKind::toeplitz_tail)));
                break;
            case Family::ldr: {
                const std::size_t r = static_cast<std::size_t>(spec.r);
                M.embed_n_ = is_pow2(n) ? 2 * n : pad_pow2(2 * n - 1);
                for (std::size_t j = 0; j < r; ++j) {
                    const std::vector<double> gj(g.begin() + static_cast<std::ptrdiff_t>(j * n),
                                                 g.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
                    if (is_pow2(n)) {
                        std::vector<double> w(2 * n);
                        for (std::size_t d = 0; d < n; ++d) {
                            w[d] = M.h_[j][d];
                            w[n + d] = -M.h_[j][d];
                        }
                        M.spectra_.push_back(fft_real(w));   // Zm1(h_j) as a 2n circulant
                        M.spectra_.push_back(fft_real(gj));  // Z1(g_j) natively
                    } else {
                        M.spectra_.push_back(fft_real(
                            embed_symbol(M.h_[j], n, n, M.embed_n_, WrapKind::skew_wrap)));
                        M.spectra_.push_back(fft_real(
                            embed_symbol(gj, n, n, M.embed_n_, WrapKind::circulant_wrap)));
                    }
                }
                break;
            }
            case Family::unstructured:
                break;
        }
    }
    return M;
}

const std::vector<double>& StructuredMatrix::h_vector(std::size_t j) const {
    if (spec_.family != Family::ldr)
        throw std::invalid_argument("h_vector: only ldr matrices carry h-vectors");
    if (j >= h_.size()) throw std::invalid_argument("h_vector: index out of range");
    return h_[j];
}

std::vector<double> StructuredMatrix::row(std::size_t i) const {
    if (i >= m_) throw std::invalid_argument("row: index out of range");
    std::vector<double> out(n_, 0.0);
    if (spec_.family == Family::ldr) {
        const std::size_t r = h_.size();
        for (std::size_t c = 0; c < n_; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < r; ++j) {
                const double* gj = budget_.g.data() + j * n_;
                for (std::size_t p : h_nz_[j]) {
                    const std::size_t l = (c + n_ - p) % n_;
                    const double sgn = c < l ? -1.0 : 1.0;
                    acc += gj[(l + n_ - i) % n_] * h_[j][p] * sgn;
                }
            }
            out[c] = acc;
        }
        return out;
    }
    for (std::size_t j = 0; j < n_; ++j) {
        const BudgetRef ref = budget_ref(spec_.family, i, j, m_, n_);
        out[j] = ref.sign * budget_.g[ref.index];
    }
    return out;
}

std::vector<double> StructuredMatrix::p_matrix(std::size_t i, std::size_t max_entries) const {
    if (i >= m_) throw std::invalid_argument("p_matrix: index out of range");
    const std::size_t t = budget_.t();
    if (n_ != 0 && t > max_entries / n_)
        throw resource_limit_error("p_matrix: t*n exceeds the entry cap");
    std::vector<double> P(t * n_, 0.0);
    if (spec_.family == Family::ldr) {
        const std::size_t r = h_.size();
        for (std::size_t j = 0; j < r; ++j) {
            for (std::size_t u = 0; u < n_; ++u) {
                const std::size_t l = (u + i) % n_;  // source row of Zm1(h_j)
                for (std::size_t p : h_nz_[j]) {
                    const std::size_t c = (l + p) % n_;
                    const double sgn = c < l ? -1.0 : 1.0;
                    P[(j * n_ + u) * n_ + c] = h_[j][p] * sgn;
                }
            }
        }
        return P;
    }
    for (std::size_t j = 0; j < n_; ++j) {
        const BudgetRef ref = budget_ref(spec_.family, i, j, m_, n_);
        P[ref.index * n_ + j] = ref.sign;
    }
    return P;
}

std::vector<double> StructuredMatrix::matvec(const std::vector<double>& v) const {
    if (v.size() != n_) throw std::invalid_argument("matvec: dimension mismatch");
    return fast_ ? matvec_fast(v) : matvec_direct(v);
}

std::vector<double> StructuredMatrix::matvec_direct(const std::vector<double>& v) const {
    std::vector<double> y(m_, 0.0);
    if (spec_.family == Family::unstructured) {
        const double* g = budget_.g.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m_ * n_ > 1u << 16)
#endif
        for (long long i = 0; i < static_cast<long long>(m_); ++i) {
            const double* rowp = g + static_cast<std::size_t>(i) * n_;
            double acc = 0.0;
            for (std::size_t j = 0; j < n_; ++j) acc += rowp[j] * v[j];
            y[static_cast<std::size_t>(i)] = acc;
        }
        return y;
    }
    for (std::size_t i = 0; i < m_; ++i) {
        const std::vector<double> r = row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += r[j] * v[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> StructuredMatrix::matvec_fast(const std::vector<double>& v) const {
    switch (spec_.family) {
        case Family::circulant:
        case Family::skew_circulant:
        case Family::toeplitz:
            return circulant_apply(spectra_[0], zero_pad(v, embed_n_), m_);
        case Family::hankel: {
            std::vector<double> x(embed_n_, 0.0);
            for (std::size_t j = 0; j < n_; ++j) x[j] = v[n_ - 1 - j];
            return circulant_apply(spectra_[0], x, m_);
        }
        case Family::ldr: {
            const std::size_t r = h_.size();
            std::vector<double> acc(n_, 0.0);
            for (std::size_t j = 0; j < r; ++j) {
                const std::vector<double> u =
                    circulant_apply(spectra_[2 * j], zero_pad(v, embed_n_), n_);
                std::vector<double> z;
                if (is_pow2(n_)) {
                    z = circulant_apply(spectra_[2 * j + 1], u, n_);
                } else {
                    z = circulant_apply(spectra_[2 * j + 1], zero_pad(u, embed_n_), n_);
                }
                for (std::size_t c = 0; c < n_; ++c) acc[c] += z[c];
            }
            acc.resize(m_);
            return acc;
        }
        case Family::unstructured:
            break;
    }
    return matvec_direct(v);
}

std::vector<double> StructuredMatrix::materialize(std::size_t max_entries) const {
    if (n_ != 0 && m_ > max_entries / n_)
        throw resource_limit_error("materialize: m*n exceeds the entry cap");
    std::vector<double> A(m_ * n_);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m_ > 64)
#endif
    for (long long i = 0; i < static_cast<long long>(m_); ++i) {
        const std::vector<double> r = row(static_cast<std::size_t>(i));
        std::copy(r.begin(), r.end(), A.begin() + static_cast<std::ptrdiff_t>(i) * static_cast<std::ptrdiff_t>(n_));
    }
    return A;
}

std::vector<double> dense_matvec(const std::vector<double>& a, std::size_t m, std::size_t n,
                                 const std::vector<double>& v) {
    if (a.size() != m * n || v.size() != n)
        throw std::invalid_argument("dense_matvec: dimension mismatch");
    std::vector<double> y(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
        const double* rowp = a.data() + static_cast<std::size_t>(i) * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += rowp[j] * v[j];
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

std::vector<double> dense_matvec_serial(const std::vector<double>& a, std::size_t m,
                                        std::size_t n, const std::vector<double>& v) {
    if (a.size() != m * n || v.size() != n)
        throw std::invalid_argument("dense_matvec: dimension mismatch");
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* rowp = a.data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += rowp[j] * v[j];
        y[i] = acc;
    }
    return y;
}

}  // namespace structembed
