#pragma once

// The theta_n root equation, the extremal function Phi_{h,beta,n} = H * phi_n,
// the common value of E_n and the widths, and the asymptotic remainder gamma_n.
//
// All root work happens on the normalized equation
//   sum_{nu>=0} rho_nu cos((2nu+1) theta pi - beta pi/2) = 0,
//   rho_nu = psi((2nu+1)n)/psi(n) = q^{2 nu n} (1+q^{2n})/(1+q^{2(2nu+1)n}),
// whose leading coefficient is 1. This keeps every n (and every h) inside
// binary64 range: for nh large the tail coefficients underflow gracefully and
// the equation degenerates to cos(theta pi - beta pi/2) = 0, which is exact.

#include <cmath>
#include <cstdint>
#include <vector>

#include "skw/series.hpp"
#include "skw/thresholds.hpp"

namespace skw::extremal {

/// Root of the phase equation on [0,1), with solver evidence.
struct ThetaSolution {
    double theta = 0.0;
    double residual = 0.0;  ///< normalized equation value at theta (leading coefficient 1)
    double bracket_lo = 0.0, bracket_hi = 0.0;
    bool unique = false;  ///< exactly one sign change on a 10^4-point scan of [0,1)
};

namespace detail {

/// Coefficients of the normalized theta equation.
struct ThetaSeries {
    std::vector<double> rho;  // rho[nu], rho[0] == 1
    double phase;             // beta pi/2, beta reduced mod 4

    double f(double theta) const {
        double s = 0.0;
        for (std::size_t nu = 0; nu < rho.size(); ++nu)
            s += rho[nu] * std::cos((2.0 * nu + 1.0) * theta * kPi - phase);
        return s;
    }
    double df(double theta) const {
        double s = 0.0;
        for (std::size_t nu = 0; nu < rho.size(); ++nu) {
            double m = 2.0 * nu + 1.0;
            s -= rho[nu] * m * kPi * std::sin(m * theta * kPi - phase);
        }
        return s;
    }
};

inline ThetaSeries make_theta_series(std::int64_t n, const KernelParams& p) {
    if (n < 1) throw std::invalid_argument("theta series: n must be >= 1");
    ThetaSeries ts;
    ts.phase = series::detail::reduce_beta(p.beta) * kPi / 2.0;
    double nn = static_cast<double>(n);
    double q2n = qpow(p.h, 2.0 * nn);
    ts.rho.push_back(1.0);
    for (std::size_t nu = 1;; ++nu) {
        double r = qpow(p.h, 2.0 * nu * nn) * (1.0 + q2n) /
                   (1.0 + qpow(p.h, 2.0 * (2.0 * nu + 1.0) * nn));
        if (!(r > 1e-18)) break;
        ts.rho.push_back(r);
        if (nu > 4'000'000) throw truncation_error("theta series: too many terms");
    }
    return ts;
}

}  // namespace detail

/// Solve the theta equation on [0,1). Bisection bracketed around the dominant
/// root theta_0 = frac((beta+1)/2), refined by safeguarded Newton steps.
inline ThetaSolution solve_theta(std::int64_t n, const KernelParams& p) {
    detail::ThetaSeries ts = detail::make_theta_series(n, p);
    double b0 = (p.beta + 1.0) / 2.0;
    double theta0 = b0 - std::floor(b0);

    double a = 0.0, b = 0.0, fa = 0.0, fb = 0.0;
    bool bracketed = false;
    for (double w : {0.25, 0.35, 0.45, 0.5}) {
        a = theta0 - w;
        b = theta0 + w;
        fa = ts.f(a);
        fb = ts.f(b);
        if (fa == 0.0) {  // landed on the root
            b = a;
            fb = fa;
            bracketed = true;
            break;
        }
        if (fa * fb < 0.0 || fb == 0.0) {
            bracketed = true;
            break;
        }
    }
    if (!bracketed)
        throw bracket_error("solve_theta: no sign change around theta_0 (n may be below the "
                            "validity thresholds)",
                            theta0 - 0.5, theta0 + 0.5);

    // bisect to a narrow interval
    for (int i = 0; i < 30 && b - a > 1e-3; ++i) {
        double m = 0.5 * (a + b);
        double fm = ts.f(m);
        if (fa * fm <= 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    // safeguarded Newton: every accepted point shrinks the bracket, with a
    // bisection step whenever Newton leaves it
    double x = 0.5 * (a + b);
    double fx = ts.f(x);
    if (fa * fx <= 0.0) {
        b = x;
        fb = fx;
    } else {
        a = x;
        fa = fx;
    }
    for (int i = 0; i < 200; ++i) {
        if (std::abs(fx) < 1e-15 || !(b - a > 1e-16)) break;
        double d = ts.df(x);
        double xn = d != 0.0 ? x - fx / d : 0.5 * (a + b);
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        double fn = ts.f(xn);
        if (fa * fn <= 0.0) {
            b = xn;
            fb = fn;
        } else {
            a = xn;
            fa = fn;
        }
        x = xn;
        fx = fn;
    }
    // endpoints may carry a smaller residual than the last iterate
    if (std::abs(fa) < std::abs(fx)) {
        x = a;
        fx = fa;
    }
    if (std::abs(fb) < std::abs(fx)) {
        x = b;
        fx = fb;
    }

    ThetaSolution sol;
    double th = x - std::floor(x);
    if (th > 1.0 - 1e-13) th = 0.0;  // root at the seam of [0,1)
    sol.theta = th;
    sol.residual = ts.f(th);
    sol.bracket_lo = a;
    sol.bracket_hi = b;

    // uniqueness evidence: sign scan at 10^4 points, wrap via f(1) = -f(0)
    constexpr int N = 10'000;
    int flips = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 0; i <= N; ++i) {
        double v = i < N ? ts.f(static_cast<double>(i) / N) : -ts.f(0.0);
        double s = sgn(v);
        if (s == 0.0) continue;
        if (have_prev && s != prev) ++flips;
        prev = s;
        have_prev = true;
    }
    sol.unique = flips == 1;
    return sol;
}

/// Phi_{h,beta,n}(t) = (4/pi) sum_{nu>=0} sin((2nu+1)nt - beta pi/2)
///                     / ((2nu+1) cosh((2nu+1) n h)).
inline double eval_Phi(double t, std::int64_t n, const KernelParams& p,
                       const SeriesConfig& cfg = {}) {
    if (n < 1) throw std::invalid_argument("eval_Phi: n must be >= 1");
    double nn = static_cast<double>(n);
    double u = std::remainder(nn * t, kTwoPi);  // exact mod-2pi reduction of nt
    double phase = series::detail::reduce_beta(p.beta) * kPi / 2.0;
    double q2n = qpow(p.h, 2.0 * nn);
    double s = 0.0;
    for (std::size_t nu = 0;; ++nu) {
        double m = 2.0 * nu + 1.0;
        double c = 2.0 * qpow(p.h, m * nn) / (1.0 + qpow(p.h, 2.0 * m * nn)) / m;
        s += c * std::sin(m * u - phase);
        // remaining tail <= c * q^{2n} / (1 - q^{2n})
        if (c * q2n / (1.0 - q2n) < cfg.abs_tol * kPi / 4.0) break;
        if (nu >= cfg.max_terms)
            throw truncation_error("eval_Phi: tail bound not reachable within max_terms");
    }
    return 4.0 / kPi * s;
}

/// E_n / d_{2n} / d_{2n-1} report for one (h, beta, n).
struct WidthReport {
    std::int64_t n = 0;
    double value = 0.0;  ///< common value of E_n and the widths (valid per the flags)
    ThetaSolution theta;
    std::int64_t n_star = 0;
    std::int64_t n_h = 0;
    bool valid_E = false;      ///< n >= n_star
    bool valid_width = false;  ///< n >= n_h
    double gamma_n = 0.0;      ///< asymptotic remainder, |gamma_n| <= 28/(3 pi) when valid
};

namespace detail {

/// Everything the value/gamma/two-sided computations share at the root.
struct RootData {
    ThetaSolution sol;
    double s0;       // sin(theta pi - beta pi/2)
    double q2n;      // q^{2n}
    double c_tilde;  // cos(theta pi - phase) / q^{2n}, from the root identity
    double abs_s0;   // |sin| from c0 = c_tilde q^{2n} (sound near 1)
    double T_tilde;  // scaled sine tail: sum_{nu>=1} rho~_nu sin(.)/(2nu+1)
    double psi_n;
};

inline RootData root_data(std::int64_t n, const KernelParams& p) {
    RootData rd;
    rd.sol = solve_theta(n, p);
    detail::ThetaSeries ts = detail::make_theta_series(n, p);
    double nn = static_cast<double>(n);
    rd.q2n = qpow(p.h, 2.0 * nn);
    rd.psi_n = series::psi(n, p);
    rd.s0 = std::sin(rd.sol.theta * kPi - ts.phase);
    // The q^{2n}-scaled tail coefficients rho~_nu = q^{2(nu-1)n}(1+q^{2n}) /
    // (1+q^{2(2nu+1)n}) are O(1) at nu = 1 for every n, so this series carries
    // its own truncation (the equation's coefficient list stops much earlier
    // once rho_nu itself underflows).
    double ct = 0.0, tt = 0.0;
    for (std::size_t nu = 1;; ++nu) {
        double m = 2.0 * nu + 1.0;
        double rt = qpow(p.h, 2.0 * (nu - 1.0) * nn) * (1.0 + rd.q2n) /
                    (1.0 + qpow(p.h, 2.0 * m * nn));
        if (nu > 1 && !(rt > 1e-18)) break;
        double arg = m * rd.sol.theta * kPi - ts.phase;
        ct -= rt * std::cos(arg);
        tt += rt * std::sin(arg) / m;
        if (nu > 4'000'000) throw truncation_error("root_data: scaled tail did not converge");
    }
    rd.c_tilde = ct;
    rd.T_tilde = tt;
    double c0 = ct * rd.q2n;
    rd.abs_s0 = std::sqrt(std::max(0.0, (1.0 - c0) * (1.0 + c0)));
    return rd;
}

inline double gamma_from_root(const RootData& rd) {
    double T = rd.T_tilde * rd.q2n;
    double full = rd.s0 + T;
    if (full == 0.0) return 0.0;
    if (rd.q2n > 0.0 && (sgn(full) != sgn(rd.s0) || rd.s0 == 0.0)) {
        // dominant term does not dominate (deep below the thresholds): plain arithmetic
        return 4.0 / kPi * (std::abs(full) - 1.0) * (1.0 - rd.q2n) / rd.q2n;
    }
    // |S|/psi(n) - 1 = (|s0| - 1) + sign(s0) T, with (|s0|-1)/q^{2n} written via
    // the root identity to dodge the 1 - |sin| cancellation
    double t1 = -rd.c_tilde * rd.c_tilde * rd.q2n / (1.0 + rd.abs_s0);
    return 4.0 / kPi * (1.0 - rd.q2n) * (t1 + sgn(rd.s0) * rd.T_tilde);
}

}  // namespace detail

/// The asymptotic remainder gamma_n alone.
inline double asymptotic_decompose(std::int64_t n, const KernelParams& p) {
    return detail::gamma_from_root(detail::root_data(n, p));
}

/// Best-approximation / width value with validity flags and gamma_n.
inline WidthReport best_approx_value(std::int64_t n, const KernelParams& p) {
    detail::RootData rd = detail::root_data(n, p);
    WidthReport w;
    w.n = n;
    w.theta = rd.sol;
    w.value = 4.0 / kPi * rd.psi_n * std::abs(rd.s0 + rd.T_tilde * rd.q2n);
    w.n_star = thresholds::n_star(p.h);
    w.n_h = thresholds::n_h(p.h);
    w.valid_E = n >= w.n_star;
    w.valid_width = n >= w.n_h;
    w.gamma_n = detail::gamma_from_root(rd);
    return w;
}

/// Two-sided sandwich of the width series, checked in the
/// psi(n)-scaled form so it stays meaningful for arbitrarily large nh.
inline bool two_sided_check(std::int64_t n, const KernelParams& p) {
    detail::RootData rd = detail::root_data(n, p);
    double mid = std::abs(rd.s0 + rd.T_tilde * rd.q2n);
    double Q = 7.0 / 3.0 * rd.q2n / (1.0 - rd.q2n);
    return 1.0 - Q <= mid && mid <= 1.0 + Q;
}

}  // namespace skw::extremal
