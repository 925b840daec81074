#include "structembed/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "structembed/errors.hpp"

namespace structembed {

namespace {

void check_row_index(const StructuredMatrix& M, std::size_t i) {
    if (i >= M.rows()) throw std::invalid_argument("row index out of range");
}

void check_col_index(const StructuredMatrix& M, std::size_t c) {
    if (c >= M.cols()) throw std::invalid_argument("column index out of range");
}

double sigma_ldr(const StructuredMatrix& M, std::size_t i1, std::size_t i2, std::size_t c1,
                 std::size_t c2) {
    const std::size_t n = M.cols();
    const std::size_t r = static_cast<std::size_t>(M.spec().r);
    double acc = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
        const std::vector<double>& h = M.h_vector(j);
        // Nonzeros of column c1 sit at rows l1 = c1 - p (mod n).
        for (std::size_t c = 0; c < n; ++c) {
            if (h[c] == 0.0) continue;
            const std::size_t l1 = (c1 + n - c) % n;
            const double v1 = h[c] * (c1 < l1 ? -1.0 : 1.0);
            const std::size_t l2 = (l1 + n + i2 - i1) % n;
            const double hv = h[(c2 + n - l2) % n];
            if (hv == 0.0) continue;
            acc += v1 * hv * (c2 < l2 ? -1.0 : 1.0);
        }
    }
    return acc;
}

}  // namespace

double sigma(const StructuredMatrix& M, std::size_t i1, std::size_t i2, std::size_t n1,
             std::size_t n2) {
    check_row_index(M, i1);
    check_row_index(M, i2);
    check_col_index(M, n1);
    check_col_index(M, n2);
    if (M.family() == Family::ldr) return sigma_ldr(M, i1, i2, n1, n2);
    BudgetRef r1 = budget_ref(M.family(), i1, n1, M.rows(), M.cols());
    const BudgetRef r2 = budget_ref(M.family(), i2, n2, M.rows(), M.cols());
    if (testhooks::corrupt_sigma) r1.index = (r1.index + 1) % M.t();
    return r1.index == r2.index ? r1.sign * r2.sign : 0.0;
}

CoherenceGraph coherence_graph(const StructuredMatrix& M, std::size_t i1, std::size_t i2,
                               std::size_t max_n) {
    check_row_index(M, i1);
    check_row_index(M, i2);
    const std::size_t n = M.cols();
    if (n > max_n)
        throw resource_limit_error("coherence_graph: n exceeds the graph size cap");
    CoherenceGraph G;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (std::abs(sigma(M, i1, i2, a, b)) > kSigmaZeroTol ||
                std::abs(sigma(M, i1, i2, b, a)) > kSigmaZeroTol) {
                G.vertices.emplace_back(a, b);
            }
        }
    }
    G.adjacency.assign(G.vertices.size(), {});
    std::vector<std::vector<std::size_t>> by_coord(n);
    for (std::size_t v = 0; v < G.vertices.size(); ++v) {
        by_coord[G.vertices[v].first].push_back(v);
        by_coord[G.vertices[v].second].push_back(v);
    }
    for (const auto& group : by_coord) {
        for (std::size_t x = 0; x < group.size(); ++x) {
            for (std::size_t y = x + 1; y < group.size(); ++y) {
                G.adjacency[group[x]].push_back(group[y]);
                G.adjacency[group[y]].push_back(group[x]);
                ++G.edge_count;
            }
        }
    }
    for (auto& adj : G.adjacency) std::sort(adj.begin(), adj.end());
    return G;
}

Coloring greedy_coloring(const CoherenceGraph& G) {
    Coloring out;
    out.color.assign(G.vertices.size(), -1);
    for (std::size_t v = 0; v < G.vertices.size(); ++v) {
        std::vector<bool> taken(out.colors_used + 1, false);
        for (std::size_t w : G.adjacency[v]) {
            if (w < v && out.color[w] >= 0 && static_cast<std::size_t>(out.color[w]) < taken.size())
                taken[static_cast<std::size_t>(out.color[w])] = true;
        }
        int c = 0;
        while (taken[static_cast<std::size_t>(c)]) ++c;
        out.color[v] = c;
        out.colors_used = std::max(out.colors_used, static_cast<std::size_t>(c) + 1);
    }
    return out;
}

namespace {

bool colorable_rec(const std::vector<std::vector<std::size_t>>& adj,
                   const std::vector<std::size_t>& order, std::size_t pos,
                   std::vector<int>& color, std::size_t q, std::size_t used) {
    if (pos == order.size()) return true;
    const std::size_t v = order[pos];
    // Trying at most one brand-new color prunes permutations of color names.
    const std::size_t limit = std::min(q, used + 1);
    for (std::size_t c = 0; c < limit; ++c) {
        bool ok = true;
        for (std::size_t w : adj[v]) {
            if (color[w] == static_cast<int>(c)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        color[v] = static_cast<int>(c);
        if (colorable_rec(adj, order, pos + 1, color, q, std::max(used, c + 1))) return true;
        color[v] = -1;
    }
    return false;
}

}  // namespace

std::size_t exact_chromatic(const CoherenceGraph& G, std::size_t max_vertices) {
    const std::size_t V = G.vertices.size();
    if (V > max_vertices)
        throw resource_limit_error("exact_chromatic: too many vertices for exact search");
    if (V == 0) return 0;
    if (G.edge_count == 0) return 1;
    const std::size_t upper = greedy_coloring(G).colors_used;
    if (upper <= 2) return upper;
    std::vector<std::size_t> order(V);
    for (std::size_t v = 0; v < V; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (G.adjacency[a].size() != G.adjacency[b].size())
            return G.adjacency[a].size() > G.adjacency[b].size();
        return a < b;
    });
    for (std::size_t q = 2; q < upper; ++q) {
        std::vector<int> color(V, -1);
        if (colorable_rec(G.adjacency, order, 0, color, q, 0)) return q;
    }
    return upper;
}

PModelStats model_stats(const StructuredMatrix& M, const StatsOptions& opts) {
    const std::size_t m = M.rows();
    const std::size_t n = M.cols();
    if (n > opts.max_n)
        throw resource_limit_error("model_stats: n exceeds the graph size cap");
    PModelStats stats;
    stats.normalized = check_normalized(M);
    stats.orthogonal = check_orthogonality(M);

    struct PairResult {
        std::size_t chi = 0;
        bool exact = false;
        double mu_sq = 0.0;     // max of both argument orders
        double diag_abs = 0.0;  // sum |sigma(c,c)|, used only for i1 < i2
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i1 = 0; i1 < m; ++i1)
        for (std::size_t i2 = i1; i2 < m; ++i2) pairs.emplace_back(i1, i2);
    std::vector<PairResult> results(pairs.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long pi = 0; pi < static_cast<long long>(pairs.size()); ++pi) {
        const auto [i1, i2] = pairs[static_cast<std::size_t>(pi)];
        PairResult r;
        const CoherenceGraph G = coherence_graph(M, i1, i2, opts.max_n);
        if (opts.exact_chi && G.vertices.size() <= opts.max_exact_vertices) {
            r.chi = exact_chromatic(G, opts.max_exact_vertices);
            r.exact = true;
        } else {
            r.chi = greedy_coloring(G).colors_used;
            r.exact = false;
        }
        double upper_sq = 0.0, lower_sq = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                const double s_ab = sigma(M, i1, i2, a, b);
                const double s_ba = sigma(M, i1, i2, b, a);
                upper_sq += s_ab * s_ab;
                lower_sq += s_ba * s_ba;
            }
        }
        r.mu_sq = std::max(upper_sq, lower_sq) / static_cast<double>(n);
        if (i1 != i2) {
            for (std::size_t a = 0; a < n; ++a) {
                const double d = sigma(M, i1, i2, a, a);
                if (std::abs(d) > kSigmaZeroTol) r.diag_abs += std::abs(d);
            }
        }
        results[static_cast<std::size_t>(pi)] = r;
    }

    stats.chi_is_exact = true;
    for (const PairResult& r : results) {
        stats.chi = std::max(stats.chi, r.chi);
        stats.chi_is_exact = stats.chi_is_exact && r.exact;
        stats.mu = std::max(stats.mu, r.mu_sq);
        stats.mu_tilde = std::max(stats.mu_tilde, r.diag_abs);
    }
    stats.mu = std::sqrt(stats.mu);
    return stats;
}

bool check_normalized(const StructuredMatrix& M, double tol) {
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t c = 0; c < M.cols(); ++c)
            if (std::abs(sigma(M, i, i, c, c) - 1.0) > tol) return false;
    return true;
}

bool check_orthogonality(const StructuredMatrix& M, double tol) {
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t c1 = 0; c1 < M.cols(); ++c1)
            for (std::size_t c2 = c1 + 1; c2 < M.cols(); ++c2)
                if (std::abs(sigma(M, i, i, c1, c2)) > tol) return false;
    return true;
}

std::vector<double> s_vector(const StructuredMatrix& M, const SignDiagonal& d1,
                             const std::vector<double>& x, std::size_t i) {
    check_row_index(M, i);
    const std::size_t n = M.cols();
    if (x.size() != n || d1.n() != n)
        throw std::invalid_argument("s_vector: dimension mismatch");
    std::vector<double> s(M.t(), 0.0);
    if (M.family() == Family::ldr) {
        const std::size_t r = static_cast<std::size_t>(M.spec().r);
        for (std::size_t j = 0; j < r; ++j) {
            const std::vector<double>& h = M.h_vector(j);
            for (std::size_t u = 0; u < n; ++u) {
                const std::size_t l = (u + i) % n;
                double acc = 0.0;
                for (std::size_t p = 0; p < n; ++p) {
                    if (h[p] == 0.0) continue;
                    const std::size_t c = (l + p) % n;
                    acc += h[p] * (c < l ? -1.0 : 1.0) * d1.d[c] * x[c];
                }
                s[j * n + u] = acc;
            }
        }
        return s;
    }
    for (std::size_t u = 0; u < n; ++u) {
        const BudgetRef ref = budget_ref(M.family(), i, u, M.rows(), n);
        s[ref.index] += ref.sign * d1.d[u] * x[u];
    }
    return s;
}

SIdentityReport verify_s_identities(const StructuredMatrix& M, const SignDiagonal& d1,
                                    const std::vector<std::vector<double>>& basis) {
    const std::size_t n = M.cols();
    const std::size_t m = M.rows();
    const std::size_t k = basis.size();
    if (k == 0) throw std::invalid_argument("verify_s_identities: empty basis");
    for (const auto& x : basis)
        if (x.size() != n) throw std::invalid_argument("verify_s_identities: dimension mismatch");
    if (d1.n() != n) throw std::invalid_argument("verify_s_identities: dimension mismatch");
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double dot = 0.0;
            for (std::size_t u = 0; u < n; ++u) dot += basis[a][u] * basis[b][u];
            const double want = a == b ? 1.0 : 0.0;
            if (std::abs(dot - want) > 1e-10)
                throw std::invalid_argument("verify_s_identities: basis is not orthonormal");
        }
    }

    std::vector<std::vector<std::vector<double>>> s(m);
    for (std::size_t i = 0; i < m; ++i) {
        s[i].resize(k);
        for (std::size_t j = 0; j < k; ++j) s[i][j] = s_vector(M, d1, basis[j], i);
    }

    SIdentityReport rep;
    const std::vector<double>& g = M.budget().g;
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<double> a = M.row(i);
        for (std::size_t j = 0; j < k; ++j) {
            double lin = 0.0;
            for (std::size_t u = 0; u < n; ++u) lin += a[u] * d1.d[u] * basis[j][u];
            double bud = 0.0;
            for (std::size_t l = 0; l < g.size(); ++l) bud += g[l] * s[i][j][l];
            rep.max_linear_gap = std::max(rep.max_linear_gap, std::abs(lin - bud));
        }
    }

    for (std::size_t i1 = 0; i1 < m; ++i1) {
        for (std::size_t i2 = i1; i2 < m; ++i2) {
            for (std::size_t j1 = 0; j1 < k; ++j1) {
                for (std::size_t j2 = 0; j2 < k; ++j2) {
                    double lhs = 0.0;
                    for (std::size_t l = 0; l < s[i1][j1].size(); ++l)
                        lhs += s[i1][j1][l] * s[i2][j2][l];
                    double rhs = 0.0;
                    for (std::size_t u = 0; u < n; ++u)
                        rhs += basis[j1][u] * basis[j2][u] * sigma(M, i1, i2, u, u);
                    for (std::size_t u = 0; u < n; ++u) {
                        for (std::size_t v = u + 1; v < n; ++v) {
                            const double suv = sigma(M, i1, i2, u, v);
                            const double svu = sigma(M, i1, i2, v, u);
                            if (suv == 0.0 && svu == 0.0) continue;
                            rhs += d1.d[u] * d1.d[v] *
                                   (basis[j1][u] * basis[j2][v] * suv +
                                    basis[j1][v] * basis[j2][u] * svu);
                        }
                    }
                    const double gap = std::abs(lhs - rhs);
                    if (i1 == i2)
                        rep.max_same_row_gap = std::max(rep.max_same_row_gap, gap);
                    else
                        rep.max_cross_row_gap = std::max(rep.max_cross_row_gap, gap);
                }
            }
        }
    }
    return rep;
}

bool is_balanced(const std::vector<double>& x, double theta) {
    if (x.empty()) throw std::invalid_argument("is_balanced: empty vector");
    double norm_sq = 0.0;
    for (double v : x) norm_sq += v * v;
    if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-8)
        throw std::invalid_argument("is_balanced: vector must have unit norm");
    const double cap = theta / std::sqrt(static_cast<double>(x.size()));
    for (double v : x)
        if (std::abs(v) > cap) return false;
    return true;
}

GramSchmidtResult gram_schmidt_perturb(const std::vector<std::vector<double>>& vectors) {
    const std::size_t kcount = vectors.size();
    if (kcount == 0) throw std::invalid_argument("gram_schmidt_perturb: no vectors");
    const std::size_t n = vectors[0].size();
    if (n == 0) throw std::invalid_argument("gram_schmidt_perturb: empty vectors");
    for (const auto& v : vectors)
        if (v.size() != n) throw std::invalid_argument("gram_schmidt_perturb: ragged input");

    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t u = 0; u < a.size(); ++u) acc += a[u] * b[u];
        return acc;
    };

    GramSchmidtResult out;
    out.vectors.reserve(kcount);
    for (std::size_t i = 0; i < kcount; ++i) {
        std::vector<double> u = vectors[i];
        const double orig = std::sqrt(dot(vectors[i], vectors[i]));
        if (orig == 0.0) throw std::invalid_argument("gram_schmidt_perturb: rank-deficient input");
        // Two projection passes keep the residual orthogonal to working precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < i; ++j) {
                const double coef = dot(u, out.vectors[j]) / dot(out.vectors[j], out.vectors[j]);
                for (std::size_t c = 0; c < n; ++c) u[c] -= coef * out.vectors[j][c];
            }
        }
        const double rnorm = std::sqrt(dot(u, u));
        if (rnorm <= 1e-10 * orig)
            throw std::invalid_argument("gram_schmidt_perturb: rank-deficient input");
        const double scale = orig / rnorm;
        for (double& c : u) c *= scale;
        double dev_sq = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double d = u[c] - vectors[i][c];
            dev_sq += d * d;
        }
        out.max_deviation = std::max(out.max_deviation, std::sqrt(dev_sq));
        out.vectors.push_back(std::move(u));
    }
    return out;
}

void write_graph_edges(std::ostream& out, const CoherenceGraph& G) {
    for (std::size_t v = 0; v < G.vertices.size(); ++v) {
        for (std::size_t w : G.adjacency[v]) {
            if (w <= v) continue;
            out << G.vertices[v].first << ',' << G.vertices[v].second << " — "
                << G.vertices[w].first << ',' << G.vertices[w].second << '\n';
        }
    }
}

}  // namespace structembed
