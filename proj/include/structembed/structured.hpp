#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "structembed/rng.hpp"

namespace structembed {

// A structured matrix A draws every entry from one shared Gaussian budget g
// of length t.  Row i is g * P_i for a fixed 0/±1 selector matrix P_i, so a
// whole m x n matrix costs t << m*n fresh random numbers, and its matvec
// runs in O(n log n) through circular convolution.
//
// All indices (rows, columns, budget slots) are 0-based.

enum class Family {
    unstructured,   // t = m*n, rows are disjoint budget slices (dense baseline)
    circulant,      // t = n, row i is g cyclically right-shifted i places
    skew_circulant, // t = n, circulant with wrapped entries negated
    toeplitz,       // t = n + m - 1, constant diagonals
    hankel,         // t = n + m - 1, constant anti-diagonals
    ldr,            // t = r*n, sum of r products Z1(g_j) * Zm1(h_j), truncated to m rows
};

std::string family_name(Family f);
Family parse_family(const std::string& name);  // throws std::invalid_argument

struct FamilySpec {
    Family family = Family::circulant;
    int r = 2;  // ldr: number of displacement terms
    int a = 2;  // ldr: nonzeros per h-vector
};

/// Which budget slot row i, column j reads, and with what sign.  Defined for
/// every family except ldr (whose selector columns are not one-hot).  This is
/// the single source of truth shared by row construction, the explicit
/// selector matrices, the slow matvec path, and the coherence closed forms.
struct BudgetRef {
    std::size_t index;
    double sign;
};
BudgetRef budget_ref(Family f, std::size_t i, std::size_t j, std::size_t m, std::size_t n);

inline constexpr std::size_t kDefaultPMatrixCap = std::size_t{1} << 24;
inline constexpr std::size_t kDefaultMaterializeCap = std::size_t{1} << 28;

class StructuredMatrix {
public:
    /// Budget is exactly sample_gaussian(seed, t); ldr h-vectors come from
    /// substreams of the same seed.  Shift families and ldr require m <= n.
    static StructuredMatrix build(FamilySpec spec, std::size_t m, std::size_t n,
                                  std::uint64_t seed);

    Family family() const noexcept { return spec_.family; }
    const FamilySpec& spec() const noexcept { return spec_; }
    std::size_t rows() const noexcept { return m_; }
    std::size_t cols() const noexcept { return n_; }
    std::size_t t() const noexcept { return budget_.t(); }
    std::uint64_t seed() const noexcept { return budget_.seed; }
    const RandomnessBudget& budget() const noexcept { return budget_; }

    /// ldr only: j-th sparse displacement vector (dense storage, length n).
    const std::vector<double>& h_vector(std::size_t j) const;

    /// Row i as a dense length-n vector; equals budget . p_matrix(i) exactly.
    std::vector<double> row(std::size_t i) const;

    /// Explicit t x n selector P_i, row-major.  Refuses t*n > max_entries.
    std::vector<double> p_matrix(std::size_t i, std::size_t max_entries = kDefaultPMatrixCap) const;

    /// A * v.  Uses the convolution fast path whenever n >= 64, direct row
    /// dot products below.  Pure; safe to call concurrently.
    std::vector<double> matvec(const std::vector<double>& v) const;

    /// Dense m x n copy, row-major.  Refuses m*n > max_entries.
    std::vector<double> materialize(std::size_t max_entries = kDefaultMaterializeCap) const;

private:
    StructuredMatrix() = default;

    std::vector<double> matvec_direct(const std::vector<double>& v) const;
    std::vector<double> matvec_fast(const std::vector<double>& v) const;

    FamilySpec spec_;
    std::size_t m_ = 0, n_ = 0;
    RandomnessBudget budget_;
    std::vector<std::vector<double>> h_;          // ldr displacement vectors
    std::vector<std::vector<std::size_t>> h_nz_;  // their nonzero positions

    // Fast-path state, precomputed at build so matvec stays const and
    // thread-safe.  Each entry is the spectrum of a circulant symbol.
    bool fast_ = false;
    std::size_t embed_n_ = 0;                                  // symbol length
    std::vector<std::vector<std::complex<double>>> spectra_;   // 1 entry, or 2r for ldr
};

/// y = A * v for a dense row-major matrix; the quadratic baseline the
/// structured paths are benchmarked against.  OpenMP-parallel over rows.
std::vector<double> dense_matvec(const std::vector<double>& a, std::size_t m, std::size_t n,
                                 const std::vector<double>& v);

/// Serial reference for the same product, kept for determinism tests.
std::vector<double> dense_matvec_serial(const std::vector<double>& a, std::size_t m,
                                        std::size_t n, const std::vector<double>& v);

}  // namespace structembed
