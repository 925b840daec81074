#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "structembed/structured.hpp"

namespace structembed {

/// Entries of sigma smaller than this count as zero when building coherence
/// graphs and the unicoherence sum.
inline constexpr double kSigmaZeroTol = 1e-10;

namespace testhooks {
// Negative control for the self-verification suite: when set, the sigma
// closed form is deliberately broken so the acceptance run must catch it.
inline bool corrupt_sigma = false;
}  // namespace testhooks

/// Coherence of two selector columns: the dot product of column n1 of P_{i1}
/// with column n2 of P_{i2}.  Closed forms for the one-hot families, sparse
/// evaluation for ldr; identical to materializing the selectors.
double sigma(const StructuredMatrix& M, std::size_t i1, std::size_t i2, std::size_t n1,
             std::size_t n2);

/// Graph of coordinate pairs whose projections stay correlated across rows
/// i1 and i2.  Vertices are unordered pairs {n1 < n2} with sigma nonzero in
/// either argument order; edges join vertices sharing a coordinate.
struct CoherenceGraph {
    std::vector<std::pair<std::size_t, std::size_t>> vertices;  // lexicographic
    std::vector<std::vector<std::size_t>> adjacency;            // indices into vertices
    std::size_t edge_count = 0;
};

CoherenceGraph coherence_graph(const StructuredMatrix& M, std::size_t i1, std::size_t i2,
                               std::size_t max_n = 512);

struct Coloring {
    std::size_t colors_used = 0;
    std::vector<int> color;  // one entry per vertex
};

/// First-fit coloring in vertex (lexicographic) order; an upper bound on the
/// chromatic number, and tight on the path/cycle graphs the shift families
/// produce.
Coloring greedy_coloring(const CoherenceGraph& G);

/// Exact chromatic number by iterative deepening over the color count.
/// Empty graph -> 0, edgeless -> 1.  Refuses more than max_vertices.
std::size_t exact_chromatic(const CoherenceGraph& G, std::size_t max_vertices = 64);

struct StatsOptions {
    bool exact_chi = true;            // fall back to greedy above the vertex cap
    std::size_t max_n = 512;          // coherence-graph size cap
    std::size_t max_exact_vertices = 64;
};

struct PModelStats {
    std::size_t chi = 0;       // chromatic number chi[P], max over row pairs
    bool chi_is_exact = false;
    double mu = 0.0;           // coherence mu[P]
    double mu_tilde = 0.0;     // unicoherence
    bool normalized = false;
    bool orthogonal = false;
};

PModelStats model_stats(const StructuredMatrix& M, const StatsOptions& opts = {});

/// Every selector column has unit norm (within tol).
bool check_normalized(const StructuredMatrix& M, double tol = 1e-12);

/// Within each selector, distinct columns are orthogonal (within tol).
/// Holds exactly for the one-hot families; ldr reports whatever is true.
bool check_orthogonality(const StructuredMatrix& M, double tol = 1e-12);

/// s^{i}_l = sum_u d_u * P_i[l,u] * x_u: the budget-space image of x under
/// row i's selector and the second sign diagonal.
std::vector<double> s_vector(const StructuredMatrix& M, const SignDiagonal& d1,
                             const std::vector<double>& x, std::size_t i);

/// Gaps between both sides of the s-vector identities, maximized over all
/// row pairs and basis-vector pairs:
///   <a^i D1, x>            vs  <g, s^{i}(x)>
///   <s^{i1}(x), s^{i2}(y)> vs  sum_u x_u y_u sigma(u,u)
///                              + sum_{u<v} d_u d_v (x_u y_v sigma(u,v) + x_v y_u sigma(v,u))
struct SIdentityReport {
    double max_linear_gap = 0.0;    // row form vs budget form
    double max_same_row_gap = 0.0;  // i1 == i2 dot products
    double max_cross_row_gap = 0.0; // i1 != i2 dot products
};

/// basis must be orthonormal to 1e-10 (throws std::invalid_argument otherwise).
SIdentityReport verify_s_identities(const StructuredMatrix& M, const SignDiagonal& d1,
                                    const std::vector<std::vector<double>>& basis);

/// True when every coordinate of the unit vector x is at most theta/sqrt(n):
/// the flatness the preconditioner is meant to produce.
bool is_balanced(const std::vector<double>& x, double theta);

struct GramSchmidtResult {
    std::vector<std::vector<double>> vectors;  // pairwise orthogonal, original norms
    double max_deviation = 0.0;                // max_i ||out_i - in_i||
};

/// Orthogonalizes nearly-orthogonal vectors, preserving each one's norm, and
/// reports how far any vector moved.  Throws on rank deficiency.
GramSchmidtResult gram_schmidt_perturb(const std::vector<std::vector<double>>& vectors);

/// One "n1,n2 — n3,n4" line per edge, vertices in lexicographic order.
void write_graph_edges(std::ostream& out, const CoherenceGraph& G);

}  // namespace structembed
