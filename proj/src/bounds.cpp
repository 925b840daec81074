#include "structembed/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace structembed {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum exp(terms)) with compensated summation; -inf terms drop out.
double log_sum_exp(const std::vector<double>& terms) {
    double hi = kNegInf;
    for (double t : terms) hi = std::max(hi, t);
    if (hi == kNegInf) return kNegInf;
    double sum = 0.0, comp = 0.0;
    for (double t : terms) {
        const double x = std::exp(t - hi);
        const double y = x - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return hi + std::log(sum);
}

double log_binomial(double N, std::size_t k) {
    return std::lgamma(N + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(N - static_cast<double>(k) + 1.0);
}

}  // namespace

Theorem1Result theorem1_bound(const Theorem1Params& p) {
    const double k = static_cast<double>(p.k);
    const double m = static_cast<double>(p.m);
    const double n = static_cast<double>(p.n);
    if (p.k < 1 || p.m < 1) throw std::invalid_argument("theorem1_bound: k and m must be >= 1");
    if (p.N < k) throw std::invalid_argument("theorem1_bound: need N >= k");
    if (p.n < 2) throw std::invalid_argument("theorem1_bound: need n >= 2");
    if (!(p.eps > 0)) throw std::invalid_argument("theorem1_bound: eps must be > 0");
    if (!(p.K > 0)) throw std::invalid_argument("theorem1_bound: K must be > 0");
    if (p.m_bar > p.m) throw std::invalid_argument("theorem1_bound: m_bar must be in 0..m");
    if (p.p_lambda_eps < 0 || p.p_lambda_eps > 1)
        throw std::invalid_argument("theorem1_bound: p_lambda_eps must be in [0,1]");
    if (p.mu_tilde < 0) throw std::invalid_argument("theorem1_bound: mu_tilde must be >= 0");
    if (p.delta_M < 0 || p.delta_lambda < 0)
        throw std::invalid_argument("theorem1_bound: deltas must be >= 0");
    if (p.rho.size() != p.m * p.k)
        throw std::invalid_argument("theorem1_bound: rho must have m*k entries");
    double rho_sq = 0.0;
    for (double r : p.rho) {
        if (!(r > 0)) throw std::invalid_argument("theorem1_bound: rho entries must be > 0");
        rho_sq += r * r;
    }
    if (p.chi == 0.0 || p.mu == 0.0)
        throw std::domain_error("theorem1_bound: chi and mu divide the exponents; both must be nonzero");
    if (p.chi < 0 || p.mu < 0) throw std::invalid_argument("theorem1_bound: chi and mu must be > 0");

    Theorem1Result out;
    out.err = p.K + static_cast<double>(p.m_bar) * p.delta_M +
              (m - static_cast<double>(p.m_bar)) * p.delta_lambda;

    const double ln_n = std::log(n);
    const double denom = 8.0 * p.chi * p.chi * p.mu * p.mu;

    std::vector<double> terms;
    // 2km * chi * e^{-n / (8 chi^2 mu^2 ln^6 n)}
    terms.push_back(std::log(2.0 * k * m * p.chi) - n / (denom * std::pow(ln_n, 6)));
    // k^2 m^2 * chi * e^{-eps^2 sqrt(n) / (8 chi^2 mu^2 ln^4 n)}
    terms.push_back(std::log(k * k * m * m * p.chi) -
                    p.eps * p.eps * std::sqrt(n) / (denom * std::pow(ln_n, 4)));
    // p_bad, term by term.
    terms.push_back(std::log(2.0 * n * k) - ln_n * ln_n / 8.0);
    terms.push_back(0.5 * std::log(2.0 * m * k / std::numbers::pi) - m * k / 2.0);
    if (p.p_lambda_eps > 0.0 && p.m_bar < p.m) {
        // sum_{j=m_bar+1}^m (pm)^j / j! in log space; truncate once terms are
        // vanishingly small relative to the running maximum.
        const double log_pm = std::log(p.p_lambda_eps * m);
        std::vector<double> fact_terms;
        double best = kNegInf;
        for (std::size_t j = p.m_bar + 1; j <= p.m; ++j) {
            const double jt = static_cast<double>(j);
            const double t = jt * log_pm - std::lgamma(jt + 1.0);
            fact_terms.push_back(t);
            best = std::max(best, t);
            if (t < best + std::log(1e-300)) break;
        }
        terms.push_back(log_sum_exp(fact_terms));
    }
    terms.push_back(std::log(2.0) - 2.0 * p.K * p.K / rho_sq);

    out.log_probability_bound = log_binomial(p.N, p.k) + log_sum_exp(terms);
    out.probability_bound = std::exp(out.log_probability_bound);
    return out;
}

double theorem1_err_unbounded(double beta_tilde_eps, std::size_t m, double alpha) {
    if (m < 1) throw std::invalid_argument("theorem1_err_unbounded: m must be >= 1");
    if (!(alpha > 0)) throw std::invalid_argument("theorem1_err_unbounded: alpha must be > 0");
    if (beta_tilde_eps < 0)
        throw std::invalid_argument("theorem1_err_unbounded: beta_tilde_eps must be >= 0");
    return beta_tilde_eps + std::pow(static_cast<double>(m), -1.0 / (2.0 * alpha));
}

double p0_eps_angular(std::size_t m, double eps) {
    if (m < 1) throw std::invalid_argument("p0_eps_angular: m must be >= 1");
    if (!(eps > 0)) throw std::invalid_argument("p0_eps_angular: eps must be > 0");
    const double md = static_cast<double>(m);
    return 2.0 * std::numbers::sqrt2 * md * eps / std::numbers::pi +
           2.0 / (std::numbers::pi * md * md);
}

double lipschitz_lambda(double f_max, double rho) {
    if (!(f_max > 0)) throw std::invalid_argument("lipschitz_lambda: f_max must be > 0");
    if (rho < 0) throw std::invalid_argument("lipschitz_lambda: rho must be >= 0");
    return 2.0 * f_max * rho + rho * rho;
}

namespace {

void check_tau(std::size_t m, double tau) {
    if (m < 2) throw std::invalid_argument("threshold: m must be >= 2");
    if (!(tau > 0.0) || !(tau < 0.5))
        throw std::invalid_argument("threshold: tau must lie in (0, 0.5)");
}

}  // namespace

double cor1_threshold(std::size_t m, double tau) {
    check_tau(m, tau);
    const double md = static_cast<double>(m);
    return std::pow(md, -tau) + 1.0 / std::log(md);
}

double cor1_tail(double N, std::size_t m, double tau) {
    check_tau(m, tau);
    if (!(N >= 1)) throw std::invalid_argument("cor1_tail: N must be >= 1");
    const double md = static_cast<double>(m);
    return N * N * std::exp(-std::pow(md, 1.0 - 2.0 * tau));
}

double cor2_threshold(std::size_t m, double tau, double f_max, double rho) {
    check_tau(m, tau);
    if (!(f_max > 0)) throw std::invalid_argument("cor2_threshold: f_max must be > 0");
    if (rho < 0) throw std::invalid_argument("cor2_threshold: rho must be >= 0");
    return std::pow(static_cast<double>(m), -tau) + 2.0 * f_max * rho + rho * rho;
}

double cor2_tail(double N, std::size_t m, double tau, double f_max) {
    check_tau(m, tau);
    if (!(N >= 1)) throw std::invalid_argument("cor2_tail: N must be >= 1");
    if (!(f_max > 0)) throw std::invalid_argument("cor2_tail: f_max must be > 0");
    const double md = static_cast<double>(m);
    return N * N * std::exp(-std::pow(md, 1.0 - 2.0 * tau) / (f_max * f_max));
}

double azuma_bound(double a, const std::vector<double>& alphas,
                   const std::vector<double>& betas) {
    if (!(a > 0)) throw std::invalid_argument("azuma_bound: a must be > 0");
    if (alphas.empty() || alphas.size() != betas.size())
        throw std::invalid_argument("azuma_bound: need matching nonempty ranges");
    double s = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0) || !(betas[i] > 0))
            throw std::invalid_argument("azuma_bound: entries must be > 0");
        const double w = alphas[i] + betas[i];
        s += w * w;
    }
    return 2.0 * std::exp(-a * a / (2.0 * s));
}

double mcdiarmid_bound(double a, const std::vector<double>& rhos) {
    if (!(a > 0)) throw std::invalid_argument("mcdiarmid_bound: a must be > 0");
    if (rhos.empty()) throw std::invalid_argument("mcdiarmid_bound: empty range");
    double s = 0.0;
    for (double r : rhos) {
        if (!(r > 0)) throw std::invalid_argument("mcdiarmid_bound: entries must be > 0");
        s += r * r;
    }
    return 2.0 * std::exp(-2.0 * a * a / s);
}

double delta_psi_mean(double a, std::size_t m) {
    if (m < 1) throw std::invalid_argument("delta_psi_mean: m must be >= 1");
    return a / static_cast<double>(m);
}

}  // namespace structembed
