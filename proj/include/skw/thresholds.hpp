#pragma once

// Validity thresholds: n_h* (best-approximation identities), n_h (width
// equalities), the rho* root, the classical-range test and the two scan
// remainder and best-approximation conditions.

#include <cmath>
#include <cstdint>

#include "skw/series.hpp"

namespace skw::thresholds {

// Both threshold inequalities have a constant right side and a left side that
// decreases in n, so the first success persists; searches below gallop then
// bisect on that monotonicity. Scans are capped loudly: as h -> 0 the
// thresholds blow up (n_h(0.2) ~ 1.5e13) and a cap violation must not be
// silent.
inline constexpr std::int64_t kScanCap = std::int64_t(1) << 52;

namespace detail {

/// The n_h*-defining inequality (q^{2n}-majorant form) at (h, n), real n allowed.
inline bool best_approx_majorant_holds(double h, double n) {
    double q = std::exp(-h);
    double q2 = q * q;
    double lhs = (1.0 - q) * (1.0 - q);
    double lnA = std::log1p(q2) - std::log(2.0);  // ln((1+q^2)/2)
    double B = std::exp(2.0 * n * lnA);
    if (B >= 1.0) return false;
    double q2n = skw::qpow(h, 2.0 * n);
    double rhs = (5.0 + 3.0 * q2) / (1.0 - q2) * B / std::sqrt(1.0 - B) + (2.0 + q2n) * q2n;
    return lhs >= rhs;
}

/// Right side of the n_h-defining inequality (constant in n).
inline double n_h_rhs(double h) {
    double q = std::exp(-h);
    // 1/cosh h  ==  2q/(1+q^2), overflow-safe
    double pref = 0.5 + 2.0 * q / ((1.0 + q * q) * (1.0 - q));
    double expo = 4.0 / (1.0 - q * q);
    return pref * std::exp(expo * (std::log1p(-q) - std::log1p(q)));
}

/// Left side of the n_h-defining inequality.
inline double n_h_lhs(double h, double n) {
    double q = std::exp(-h);
    double rn = std::sqrt(n);
    double m1 = 160.0 / (27.0 * (n - rn));
    double m2 = 8.0 / (3.0 * n - 7.0 * rn);
    return 37.0 / (5.0 * (1.0 - q)) * skw::qpow(h, rn) +
           q / ((1.0 - q) * (1.0 - q)) * std::min(m1, m2);
}

inline bool n_h_holds(double h, std::int64_t n) {
    return n_h_lhs(h, static_cast<double>(n)) <= n_h_rhs(h);
}

// First n >= start satisfying a monotone predicate (false ... false true ...).
template <typename Pred>
std::int64_t first_true(std::int64_t start, Pred&& holds, const char* what) {
    std::int64_t hi = start;
    while (!holds(hi)) {
        if (hi > kScanCap) throw scan_limit_error(std::string(what) + ": scan cap exceeded");
        hi *= 2;
    }
    std::int64_t lo = hi == start ? start : hi / 2 + 1;
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (holds(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

}  // namespace detail

/// n_h*: 1 for h >= ln(10/3), else the smallest n passing the majorant inequality.
inline std::int64_t n_star(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("n_star: h must be > 0");
    if (h >= std::log(10.0 / 3.0)) return 1;
    return detail::first_true(
        1, [h](std::int64_t n) { return detail::best_approx_majorant_holds(h, static_cast<double>(n)); },
        "n_star");
}

/// n_h: smallest n >= 9 with the explicit gamma-sum inequality; sqrt(n) is
/// real-valued here (the integer part [sqrt n] appears only in the spline sums).
inline std::int64_t n_h(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("n_h: h must be > 0");
    return detail::first_true(9, [h](std::int64_t n) { return detail::n_h_holds(h, n); }, "n_h");
}

/// The n_h-defining inequality evaluated at one (h, n); true iff n >= n_h(h).
inline bool check_width_condition(double h, std::int64_t n) {
    return n >= 9 && detail::n_h_holds(h, n);
}

/// Root of 2r + (1+3r) r^2 / ((1-r) sqrt(1-2r^2)) = 1 on (0,1); ~0.3253678.
inline double rho_star() {
    auto f = [](double r) {
        return 2.0 * r + (1.0 + 3.0 * r) * r * r / ((1.0 - r) * std::sqrt(1.0 - 2.0 * r * r)) - 1.0;
    };
    double lo = 0.0, hi = 0.5;  // f(0) = -1 < 0, f(0.5) > 0
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Classical range: cosh(h)/cosh(2h) <= rho(beta), with rho = 0.2 for integer
/// beta and 0.193864 otherwise. The ratio is written as q(1+q^2)/(1+q^4) so it
/// stays finite for any h.
inline bool check_classical_range(double h, double beta) {
    if (!(h > 0.0)) throw std::invalid_argument("check_classical_range: h must be > 0");
    double q = std::exp(-h);
    double q2 = q * q;
    double ratio = q * (1.0 + q2) / (1.0 + q2 * q2);
    double rho = (beta == std::floor(beta)) ? 0.2 : 0.193864;
    return ratio <= rho;
}

/// Remainder condition: q^n/(1-q^{2n}) <= 7 q^{sqrt n} / (37 n^2), under which
/// the eigenvalue remainders r_j stay negligible.
inline bool check_remainder_condition(std::int64_t n, double q) {
    if (n < 1) throw std::invalid_argument("check_remainder_condition: n must be >= 1");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("check_remainder_condition: q must be in (0,1)");
    double nn = static_cast<double>(n);
    double lq = std::log(q);
    double qn = std::exp(nn * lq);
    double lhs = qn / (1.0 - qn * qn);
    double rhs = 7.0 * std::exp(std::sqrt(nn) * lq) / (37.0 * nn * nn);
    return lhs <= rhs;
}

/// Best-approximation condition: the majorant inequality with the exact eps_n in place of its
/// q^{2n}-style majorant.
inline bool check_best_approx_condition(std::int64_t n, const KernelParams& p) {
    if (n < 1) throw std::invalid_argument("check_best_approx_condition: n must be >= 1");
    double q = p.q, q2 = q * q;
    double nn = static_cast<double>(n);
    double lnA = std::log1p(q2) - std::log(2.0);
    double B = std::exp(2.0 * nn * lnA);
    if (B >= 1.0) return false;
    double eps = series::epsilon_n(n, p);
    double rhs = (5.0 + 3.0 * q2) / (1.0 - q2) * B / std::sqrt(1.0 - B) + eps * (2.0 + eps);
    return (1.0 - q) * (1.0 - q) >= rhs;
}

enum class Branch { direct, scanned };

struct ThresholdReport {
    double h;
    std::int64_t n_star;
    std::int64_t n_h;
    Branch branch;
    bool rho_condition_met;  ///< max_k psi(k+1)/psi(k) < rho*, the all-n condition
};

inline ThresholdReport compute(double h) {
    ThresholdReport r;
    r.h = h;
    r.n_star = n_star(h);
    r.n_h = n_h(h);
    r.branch = h >= std::log(10.0 / 3.0) ? Branch::direct : Branch::scanned;
    double q = std::exp(-h), q2 = q * q;
    r.rho_condition_met = q * (1.0 + q2) / (1.0 + q2 * q2) < rho_star();
    return r;
}

}  // namespace skw::thresholds
