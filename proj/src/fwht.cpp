#include "structembed/fwht.hpp"

#include <cmath>
#include <stdexcept>

namespace structembed {

std::size_t pad_pow2(std::size_t n) {
    if (n == 0) throw std::invalid_argument("pad_pow2: n must be >= 1");
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fwht(std::vector<double>& x) {
    const std::size_t n = x.size();
    if (!is_pow2(n)) throw std::invalid_argument("fwht: length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t base = 0; base < n; base += h << 1) {
            for (std::size_t j = base; j < base + h; ++j) {
                const double a = x[j];
                const double b = x[j + h];
                x[j] = a + b;
                x[j + h] = a - b;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (double& v : x) v *= scale;
}

std::vector<double> preprocess(const std::vector<double>& v, const SignDiagonal& d0,
                               const SignDiagonal& d1) {
    const std::size_t n = v.size();
    if (n == 0 || !is_pow2(n)) throw std::invalid_argument("preprocess: length must be a power of two");
    if (d0.n() != n || d1.n() != n)
        throw std::invalid_argument("preprocess: diagonal lengths must match the vector");
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = d0.d[i] * v[i];
    fwht(u);
    for (std::size_t i = 0; i < n; ++i) u[i] *= d1.d[i];
    return u;
}

}  // namespace structembed
