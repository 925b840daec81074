#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace structembed {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs fn(first, last, slot) over fixed-size chunks of [0, total).  Chunk
/// boundaries depend only on (total, chunk); each chunk writes into its own
/// slot and the caller combines slots in index order, so results are
/// byte-identical at any thread count.  fn must not touch shared state.
template <typename Fn>
void parallel_chunks(std::size_t total, std::size_t chunk, Fn&& fn) {
    if (total == 0) return;
    if (chunk == 0) chunk = 1;
    const std::size_t num_chunks = (total + chunk - 1) / chunk;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long long c = 0; c < static_cast<long long>(num_chunks); ++c) {
        const std::size_t first = static_cast<std::size_t>(c) * chunk;
        const std::size_t last = first + chunk < total ? first + chunk : total;
        fn(first, last, static_cast<std::size_t>(c));
    }
}

/// Chunked sum of term(i) over [0, total): per-chunk partials accumulated
/// serially inside the chunk, then combined in chunk order.
template <typename Term>
double parallel_sum(std::size_t total, std::size_t chunk, Term&& term) {
    if (total == 0) return 0.0;
    if (chunk == 0) chunk = 1;
    const std::size_t num_chunks = (total + chunk - 1) / chunk;
    std::vector<double> partial(num_chunks, 0.0);
    parallel_chunks(total, chunk, [&](std::size_t first, std::size_t last, std::size_t slot) {
        double acc = 0.0;
        for (std::size_t i = first; i < last; ++i) acc += term(i);
        partial[slot] = acc;
    });
    double out = 0.0;
    for (double p : partial) out += p;
    return out;
}

}  // namespace structembed
