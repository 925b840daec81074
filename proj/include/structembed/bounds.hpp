#pragma once

#include <cstddef>
#include <vector>

namespace structembed {

// Closed-form concentration bounds for the structured estimator, evaluated
// in log-space so large N, m, n cannot overflow intermediate terms.  Natural
// logarithm throughout.  Asymptotic constants are taken as 1; every consumer
// labels these values "up to constant".

struct Theorem1Params {
    double N = 1;               // dataset size
    std::size_t k = 2;          // tuple arity
    std::size_t m = 1;          // embedding rows
    std::size_t n = 2;          // ambient dimension
    double chi = 1;             // chromatic number chi[P]
    double mu = 1;              // coherence mu[P]
    double mu_tilde = 0;        // unicoherence (carried for reports)
    double eps = 0.1;           // balancedness slack, > 0
    double K = 0.1;             // error budget component, > 0
    std::size_t m_bar = 0;      // 0..m
    double p_lambda_eps = 0;    // probability in [0, 1]
    std::vector<double> rho;    // mk per-coordinate sensitivities, positive
    double delta_M = 0;         // Delta^Psi_M
    double delta_lambda = 0;    // Delta^Psi_lambda
};

struct Theorem1Result {
    double err = 0;                  // K + m_bar*delta_M + (m - m_bar)*delta_lambda
    double probability_bound = 0;    // not clamped to 1; may exceed it or underflow
    double log_probability_bound = 0;
};

/// Failure-probability bound:
///   C(N,k) * ( 2km*chi*e^{-n/(8 chi^2 mu^2 ln^6 n)}
///            + k^2 m^2 chi * e^{-eps^2 sqrt(n)/(8 chi^2 mu^2 ln^4 n)}
///            + p_bad )
///   p_bad = 2nk*e^{-ln^2(n)/8} + sqrt(2mk/pi)*e^{-mk/2}
///         + sum_{j=m_bar+1}^{m} (p_lambda_eps*m)^j / j!
///         + 2 e^{-2K^2 / sum rho_i^2}
/// Throws std::domain_error when chi or mu is zero (the exponents divide by
/// them) and std::invalid_argument on range violations.
Theorem1Result theorem1_bound(const Theorem1Params& p);

/// Error radius of the unbounded-beta branch: beta_tilde_eps + m^{-1/(2 alpha)}.
/// The accompanying e^{-Omega(sqrt(m))} tail has no published constants and is
/// qualitative only.
double theorem1_err_unbounded(double beta_tilde_eps, std::size_t m, double alpha);

/// Angular-distance flip probability: 2*sqrt(2)*m*eps/pi + 2/(pi m^2).
double p0_eps_angular(std::size_t m, double eps);

/// lambda making p_{lambda,eps} vanish for (theta, rho)-Lipschitz f with
/// |f| <= f_max: 2*f_max*rho + rho^2.
double lipschitz_lambda(double f_max, double rho);

/// Pointwise-error threshold m^{-tau} + 1/ln(m) and its N^2 e^{-m^{1-2tau}}
/// tail (bounded f = 1 case).  Requires m >= 2 and tau in (0, 0.5).
double cor1_threshold(std::size_t m, double tau);
double cor1_tail(double N, std::size_t m, double tau);

/// Lipschitz variant: threshold m^{-tau} + 2*f_max*rho + rho^2; tail with the
/// exponent divided by f_max^2.
double cor2_threshold(std::size_t m, double tau, double f_max, double rho);
double cor2_tail(double N, std::size_t m, double tau, double f_max);

/// 2 e^{-a^2 / (2 sum (alpha_i + beta_i)^2)} for martingales with bounded
/// one-sided increments.
double azuma_bound(double a, const std::vector<double>& alphas, const std::vector<double>& betas);

/// 2 e^{-2 a^2 / sum rho_i^2} for functions with bounded coordinate influence.
double mcdiarmid_bound(double a, const std::vector<double>& rhos);

/// Mean-psi sensitivity: a change of a in one coordinate moves the mean by a/m.
double delta_psi_mean(double a, std::size_t m);

}  // namespace structembed
