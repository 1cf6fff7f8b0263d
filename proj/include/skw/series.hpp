#pragma once

// Overflow-safe evaluation of the kernel series built from psi(k) = 1/cosh(kh).
// Every reciprocal cosh is computed as 2 q^k / (1 + q^{2k}), q = e^{-h}, so the
// evaluators stay finite for arbitrarily large arguments (cosh itself overflows
// near kh ~ 709).

#include <cmath>

#include "skw/common.hpp"

namespace skw {

/// The pair (h, beta) identifying a convolution class; q = e^{-h} is derived.
struct KernelParams {
    double h;     ///< strip half-width, > 0
    double beta;  ///< phase parameter
    double q;     ///< e^{-h}, in (0, 1)

    explicit KernelParams(double h_, double beta_ = 0.0) : h(h_), beta(beta_), q(std::exp(-h_)) {
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("KernelParams: h must be positive and finite");
        if (!std::isfinite(beta))
            throw std::invalid_argument("KernelParams: beta must be finite");
    }
};

/// Absolute tail tolerance and term cap shared by all series evaluators.
struct SeriesConfig {
    double abs_tol = 1e-14;
    std::size_t max_terms = 10'000'000;
};

/// q^m = e^{-m h} for real m, accurate and underflow-graceful.
inline double qpow(double h, double m) { return std::exp(-m * h); }

namespace series {

/// psi(k) = 1/cosh(kh), finite for every k >= 1 (underflows to 0, never overflows).
inline double psi(std::int64_t k, const KernelParams& p) {
    if (k < 1) throw std::invalid_argument("psi: k must be >= 1");
    double qk = qpow(p.h, static_cast<double>(k));
    return 2.0 * qk / (1.0 + qk * qk);
}

namespace detail {

// Smallest K with 2 q^{K+1}/(1-q) < tol; throws if it does not fit in max_terms.
inline std::size_t tail_cutoff(const KernelParams& p, const SeriesConfig& cfg) {
    if (!(cfg.abs_tol > 0.0)) throw std::invalid_argument("SeriesConfig: abs_tol must be > 0");
    if (cfg.max_terms < 1) throw std::invalid_argument("SeriesConfig: max_terms must be >= 1");
    // 2 q^{K+1} / (1-q) < tol  <=>  K+1 > ln(2 / (tol (1-q))) / h
    double need = std::log(2.0 / (cfg.abs_tol * (1.0 - p.q))) / p.h;
    double K = std::ceil(need);
    if (K < 1.0) K = 1.0;
    if (K > static_cast<double>(cfg.max_terms))
        throw truncation_error("series tail bound not reachable within max_terms");
    return static_cast<std::size_t>(K);
}

// Reduce beta modulo the phase period 4 (cos(kt - beta pi/2) is 4-periodic in beta).
inline double reduce_beta(double beta) { return std::remainder(beta, 4.0); }

}  // namespace detail

/// H_{h,beta}(t) = sum_{k>=1} psi(k) cos(kt - beta pi/2), tail < cfg.abs_tol.
inline double eval_H(double t, const KernelParams& p, const SeriesConfig& cfg = {}) {
    std::size_t K = detail::tail_cutoff(p, cfg);
    double tr = std::remainder(t, kTwoPi);
    double phase = detail::reduce_beta(p.beta) * kPi / 2.0;
    double s = 0.0;
    for (std::size_t k = 1; k <= K; ++k)
        s += psi(static_cast<std::int64_t>(k), p) * std::cos(static_cast<double>(k) * tr - phase);
    return s;
}

/// Psi_{beta,1}(t) = sum_{k>=1} (psi(k)/k) cos(kt - (beta+1) pi/2): the kernel
/// convolved once with the Bernoulli kernel B_1.
inline double eval_Psi_beta1(double t, const KernelParams& p, const SeriesConfig& cfg = {}) {
    std::size_t K = detail::tail_cutoff(p, cfg);
    double tr = std::remainder(t, kTwoPi);
    double phase = detail::reduce_beta(p.beta + 1.0) * kPi / 2.0;
    double s = 0.0;
    for (std::size_t k = 1; k <= K; ++k)
        s += psi(static_cast<std::int64_t>(k), p) / static_cast<double>(k) *
             std::cos(static_cast<double>(k) * tr - phase);
    return s;
}

/// P_q(t) = 1/2 + 2 sum_{j>=1} cos(jt) / (q^j + q^{-j}), q in (0,1).
inline double eval_P_q(double t, double q, const SeriesConfig& cfg = {}) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("eval_P_q: q must be in (0,1)");
    if (!(cfg.abs_tol > 0.0)) throw std::invalid_argument("SeriesConfig: abs_tol must be > 0");
    double lq = std::log(q);
    // tail: 2 sum_{j>J} q^j = 2 q^{J+1}/(1-q) < tol
    double need = std::log(2.0 / (cfg.abs_tol * (1.0 - q))) / (-lq);
    double Jd = std::ceil(need);
    if (Jd < 1.0) Jd = 1.0;
    if (Jd > static_cast<double>(cfg.max_terms))
        throw truncation_error("eval_P_q: tail bound not reachable within max_terms");
    std::size_t J = static_cast<std::size_t>(Jd);
    double tr = std::remainder(t, kTwoPi);
    double s = 0.5;
    for (std::size_t j = 1; j <= J; ++j) {
        double qj = std::exp(static_cast<double>(j) * lq);
        s += 2.0 * qj / (1.0 + qj * qj) * std::cos(static_cast<double>(j) * tr);
    }
    return s;
}

/// eps_n = sup_{k>=n} |psi(k+1)/psi(k) - q|. The ratio q(1+q^{2k})/(1+q^{2k+2})
/// decreases in k, so the sup sits at k = n:
///   eps_n = q^{2n+1} (1-q^2) / (1 + q^{2n+2}).
inline double epsilon_n(std::int64_t n, const KernelParams& p) {
    if (n < 1) throw std::invalid_argument("epsilon_n: n must be >= 1");
    double nn = static_cast<double>(n);
    return qpow(p.h, 2.0 * nn + 1.0) * (1.0 - p.q * p.q) / (1.0 + qpow(p.h, 2.0 * nn + 2.0));
}

/// P_q through Poisson summation: with h = -ln q,
///   P_q(t) = (pi/(2h)) sum_{k in Z} sech(pi (t + 2 pi k) / (2h)).
/// Every term is positive, so this route keeps full relative precision near
/// the minimum of P_q, where the cosine series cancels to far below one ulp
/// of its partial sums. Used wherever the sign or size of a tiny P_q value
/// matters; agrees with eval_P_q to the series tolerance elsewhere.
inline double eval_P_q_poisson(double t, double q) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("eval_P_q_poisson: q must be in (0,1)");
    double h = -std::log(q);
    double a = kPi / (2.0 * h);
    double tr = std::remainder(t, kTwoPi);  // in [-pi, pi]
    auto sech = [](double x) {
        double e = std::exp(-std::abs(x));
        return 2.0 * e / (1.0 + e * e);
    };
    double s = sech(a * tr);
    for (int k = 1; k < 100000; ++k) {
        double term = sech(a * (tr + kTwoPi * k)) + sech(a * (tr - kTwoPi * k));
        s += term;
        if (term < 1e-18 * s) break;
    }
    return a * s;
}

/// Uniform lower bound on P_q over the whole line:
///   P_q(x) > (1/2 + 2q/((1+q^2)(1-q))) ((1-q)/(1+q))^{4/(1-q^2)}.
inline double P_q_lower_bound(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("P_q_lower_bound: q must be in (0,1)");
    double pref = 0.5 + 2.0 * q / ((1.0 + q * q) * (1.0 - q));
    return pref * std::exp(4.0 / (1.0 - q * q) * (std::log1p(-q) - std::log1p(q)));
}

}  // namespace series
}  // namespace skw
