#pragma once

// SK-splines on the uniform partition x_k = k pi/n: circulant eigenvalues
// lambda_l(y), the fundamental interpolating spline, the piecewise-constant
// derivative representative in its three equivalent forms, and the gamma_1..5
// correction breakdown with the explicit bound.
//
// Everything downstream of lambda_{n-j} is computed relative to the natural
// scale psi(n-j)/(n-j) ("hatted" quantities). The hatted values are O(1) for
// every n, so the gamma machinery keeps full meaning at n ~ 10^8 where the raw
// eigenvalues underflow to zero.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "skw/extremal.hpp"
#include "skw/series.hpp"

namespace skw::spline {

using cplx = std::complex<double>;

/// Uniform partition of [0, 2pi] into 2n intervals plus the shift y.
struct NodeGrid {
    std::int64_t n;
    double y;  ///< in [0, pi/n)

    NodeGrid(std::int64_t n_, double y_) : n(n_), y(y_) {
        if (n < 1) throw std::invalid_argument("NodeGrid: n must be >= 1");
        if (!(y >= 0.0) || !(y < kPi / static_cast<double>(n)))
            throw std::invalid_argument("NodeGrid: y must lie in [0, pi/n)");
    }
    double node(std::int64_t k) const { return static_cast<double>(k) * kPi / static_cast<double>(n); }
    double shifted_node(std::int64_t k) const { return node(k) + y; }
    /// midpoint of ((k-1)pi/n, k pi/n), k = 1..2n
    double midpoint(std::int64_t k) const {
        return (static_cast<double>(k) - 0.5) * kPi / static_cast<double>(n);
    }
};

/// lambda_l(y) = (1/n) sum_{nu=1}^{2n} e^{i l nu pi/n} Psi_{beta,1}(y - nu pi/n).
inline cplx lambda_direct(std::int64_t l, const NodeGrid& g, const KernelParams& p,
                          const SeriesConfig& cfg = {}) {
    cplx s{0.0, 0.0};
    double nn = static_cast<double>(g.n);
    for (std::int64_t nu = 1; nu <= 2 * g.n; ++nu) {
        double ang = static_cast<double>(l) * static_cast<double>(nu) * kPi / nn;
        s += std::polar(1.0, ang) * series::eval_Psi_beta1(g.y - static_cast<double>(nu) * kPi / nn, p, cfg);
    }
    return s / nn;
}

/// Same eigenvalue through the aliased Fourier coefficients:
/// lambda_l(y) = sum_{m in Z, 2mn+l != 0} c_{2mn+l} e^{i(2mn+l)y}.
inline cplx lambda_closed(std::int64_t l, const NodeGrid& g, const KernelParams& p,
                          const SeriesConfig& cfg = {}) {
    if (l < 1) throw std::invalid_argument("lambda_closed: l must be >= 1");
    double phase1 = series::detail::reduce_beta(p.beta + 1.0) * kPi / 2.0;
    double q2n = qpow(p.h, 2.0 * static_cast<double>(g.n));
    auto coef = [&](double k) {  // psi(k)/k for k > 0
        double qk = qpow(p.h, k);
        return 2.0 * qk / (1.0 + qk * qk) / k;
    };
    cplx s{0.0, 0.0};
    for (std::size_t m = 0;; ++m) {
        double kp = 2.0 * static_cast<double>(m) * static_cast<double>(g.n) + static_cast<double>(l);
        double t1 = coef(kp);
        s += t1 * std::polar(1.0, kp * g.y - phase1);
        double t2 = 0.0;
        if (m >= 1) {
            double ka = 2.0 * static_cast<double>(m) * static_cast<double>(g.n) - static_cast<double>(l);
            if (ka != 0.0) {  // the zero frequency is excluded from the expansion
                t2 = coef(ka);
                s += t2 * std::polar(1.0, -(ka * g.y) + phase1);
            }
        }
        if (m >= 1 && (t1 + t2) * q2n / (1.0 - q2n) < cfg.abs_tol && t1 + t2 < cfg.abs_tol) break;
        if (m > cfg.max_terms)
            throw truncation_error("lambda_closed: tail bound not reachable within max_terms");
    }
    return s;
}

/// Fundamental SK-spline: alpha_0 + sum alpha_k Psi_{beta,1}(.-x_k) with
/// sum alpha_k = 0, interpolating the Kronecker delta at the shifted nodes.
struct SplineSystem {
    NodeGrid grid;
    KernelParams params;
    SeriesConfig cfg;
    std::vector<cplx> lambda;   ///< lambda_l(y), l = 1..2n at [l-1]
    std::vector<double> alpha;  ///< alpha_0..alpha_2n

    double evaluate(double t) const {
        double s = alpha[0];
        for (std::int64_t k = 1; k <= 2 * grid.n; ++k)
            s += alpha[static_cast<std::size_t>(k)] * series::eval_Psi_beta1(t - grid.node(k), params, cfg);
        return s;
    }

    /// The piecewise-constant (psi,beta)-derivative representative,
    /// sum alpha_k B_1(t - x_k) with the sawtooth B_1(u) = (pi-u)/2 on (0,2pi).
    double derivative_at(double t) const {
        double s = 0.0;
        for (std::int64_t k = 1; k <= 2 * grid.n; ++k) {
            double u = t - grid.node(k);
            u -= kTwoPi * std::floor(u / kTwoPi);
            if (u == 0.0)
                throw std::domain_error("derivative_at: t coincides with a node");
            s += alpha[static_cast<std::size_t>(k)] * (kPi - u) / 2.0;
        }
        return s;
    }
};

/// Diagonalize the circulant interpolation system in the discrete Fourier
/// basis; frequency l pairs with eigenvalue n*lambda_l(y). The zero mode is
/// fixed by the constraint sum alpha_k = 0, which forces alpha_0 = 1/(2n).
inline SplineSystem build_fundamental_spline(const NodeGrid& g, const KernelParams& p,
                                             const SeriesConfig& cfg = {}) {
    std::int64_t n = g.n, N = 2 * n;
    std::vector<cplx> lam(static_cast<std::size_t>(N));
    for (std::int64_t l = 1; l <= n; ++l) lam[static_cast<std::size_t>(l - 1)] = lambda_closed(l, g, p, cfg);
    for (std::int64_t l = n + 1; l < N; ++l)
        lam[static_cast<std::size_t>(l - 1)] = std::conj(lam[static_cast<std::size_t>(N - l - 1)]);
    lam[static_cast<std::size_t>(N - 1)] = lambda_closed(N, g, p, cfg);  // l = 2n (zero mode, reporting only)

    for (std::int64_t l = 1; l < N; ++l)
        if (std::abs(lam[static_cast<std::size_t>(l - 1)]) <= 1e-13)
            throw conditioning_error("build_fundamental_spline: |lambda_l| below 1e-13", l);

    // B_l = 1/(n lambda_l) for l = 1..2n-1, B_0 = 0; inverse DFT gives the
    // node weights b_r, with alpha_r = b_r (r = 1..2n-1) and alpha_2n = b_0.
    std::vector<cplx> B(static_cast<std::size_t>(N));
    B[0] = 0.0;
    for (std::int64_t l = 1; l < N; ++l)
        B[static_cast<std::size_t>(l)] = 1.0 / (static_cast<double>(n) * lam[static_cast<std::size_t>(l - 1)]);

    std::vector<cplx> roots(static_cast<std::size_t>(N));
    for (std::int64_t r = 0; r < N; ++r)
        roots[static_cast<std::size_t>(r)] = std::polar(1.0, static_cast<double>(r) * kPi / static_cast<double>(n));

    SplineSystem sys{g, p, cfg, std::move(lam), {}};
    sys.alpha.assign(static_cast<std::size_t>(N + 1), 0.0);
    sys.alpha[0] = 1.0 / static_cast<double>(N);
    for (std::int64_t r = 0; r < N; ++r) {
        cplx acc{0.0, 0.0};
        for (std::int64_t l = 1; l < N; ++l)
            acc += B[static_cast<std::size_t>(l)] * roots[static_cast<std::size_t>((l * r) % N)];
        double val = acc.real() / static_cast<double>(N);
        if (r == 0)
            sys.alpha[static_cast<std::size_t>(N)] = val;
        else
            sys.alpha[static_cast<std::size_t>(r)] = val;
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Scaled lambda decomposition and the gamma corrections
// ---------------------------------------------------------------------------

namespace detail {

/// Trig data of the shift: w = ny - beta pi/2 reduced, plus the stable pieces.
struct PhaseContext {
    double eps0;            // sign sin(w)
    double c0;              // cos(w)
    double one_minus_abss;  // 1 - |sin(w)|, computed without cancellation
    double u;               // n*y reduced mod 2pi (for the r^(1) phases)
};

/// Context at arbitrary y (direct trigonometry).
inline PhaseContext phase_context(const NodeGrid& g, const KernelParams& p) {
    PhaseContext pc;
    pc.u = std::remainder(static_cast<double>(g.n) * g.y, kTwoPi);
    double w = pc.u - series::detail::reduce_beta(p.beta) * kPi / 2.0;
    double s = std::sin(w);
    pc.eps0 = sgn(s);
    pc.c0 = std::cos(w);
    pc.one_minus_abss = pc.c0 * pc.c0 / (1.0 + std::abs(s));
    return pc;
}

/// Context at the root y0 = theta pi / n: cos(ny0 - beta pi/2) comes from the
/// theta equation itself, which stays accurate when q^{2n} is far below the
/// direct-trig noise floor.
inline PhaseContext phase_context_at_root(std::int64_t n, double theta, const KernelParams& p) {
    PhaseContext pc;
    auto ts = extremal::detail::make_theta_series(n, p);
    double nn = static_cast<double>(n);
    double q2n = qpow(p.h, 2.0 * nn);
    double ct = 0.0;
    for (std::size_t nu = 1;; ++nu) {  // scaled coefficients, own truncation
        double m = 2.0 * nu + 1.0;
        double rt = qpow(p.h, 2.0 * (nu - 1.0) * nn) * (1.0 + q2n) / (1.0 + qpow(p.h, 2.0 * m * nn));
        if (nu > 1 && !(rt > 1e-18)) break;
        ct -= rt * std::cos(m * theta * kPi - ts.phase);
        if (nu > 4'000'000)
            throw truncation_error("phase_context_at_root: scaled series did not converge");
    }
    pc.u = std::remainder(theta * kPi, kTwoPi);
    pc.c0 = ct * q2n;
    double s = std::sin(theta * kPi - ts.phase);
    pc.eps0 = sgn(s);
    double abss = std::sqrt(std::max(0.0, (1.0 - pc.c0) * (1.0 + pc.c0)));
    pc.one_minus_abss = pc.c0 * pc.c0 / (1.0 + abss);
    return pc;
}

/// lambda_{n-j}(y) and friends, all divided by psi(n-j)/(n-j).
struct LambdaHat {
    double B;     // (psi(n+j)/(n+j)) / (psi(n-j)/(n-j))
    cplx r;       // r_j(y) scaled
    double lam;   // |lambda_{n-j}(y)| scaled  =  |(1+B) eps0 + r|
    double R;     // R_j(y) scaled  =  lam - 1 - B
    double w;     // (psi(n)/n) / (psi(n-j)/(n-j)) = q^j ((n-j)/n)(1+q^{2(n-j)})/(1+q^{2n})
    double cosj;  // cos(j pi / 2n)
    double delta; // delta_j (meaningful for j >= 1)
};

inline LambdaHat lambda_hat(std::int64_t j, std::int64_t n, const PhaseContext& pc,
                            const KernelParams& p, double phase1) {
    double nn = static_cast<double>(n), jj = static_cast<double>(j);
    double h = p.h;
    LambdaHat out;
    double q2nmj = qpow(h, 2.0 * (nn - jj));
    double q2n = qpow(h, 2.0 * nn);
    out.B = qpow(h, 2.0 * jj) * (nn - jj) / (nn + jj) * (1.0 + q2nmj) / (1.0 + qpow(h, 2.0 * (nn + jj)));

    // r^(1): aliased frequencies (2m+1)n -+ j, scaled coefficients
    //   a(N) = ((n-j)/N) q^{N-(n-j)} (1+q^{2(n-j)}) / (1+q^{2N})
    auto aN = [&](double N) {
        double e = N - (nn - jj);
        double qe = qpow(h, e);
        return (nn - jj) / N * qe * (1.0 + q2nmj) / (1.0 + qpow(h, 2.0 * N));
    };
    cplx r1{0.0, 0.0};
    {
        double t0 = aN(3.0 * nn - jj);
        if (t0 > 0.0) r1 += t0 * std::polar(1.0, 3.0 * pc.u - phase1);
        for (std::size_t m = 2; t0 > 0.0; ++m) {
            double mm = static_cast<double>(m);
            double t1 = aN((2.0 * mm + 1.0) * nn - jj);
            double t2 = aN((2.0 * mm - 1.0) * nn + jj);
            if (t1 == 0.0 && t2 == 0.0) break;
            double a1 = std::remainder((2.0 * mm + 1.0) * pc.u, kTwoPi);
            double a2 = std::remainder((2.0 * mm - 1.0) * pc.u, kTwoPi);
            r1 += t1 * std::polar(1.0, a1 - phase1);
            r1 += t2 * std::polar(1.0, -(a2 - phase1));
            if ((t1 + t2) * q2n / (1.0 - q2n) < 1e-19) break;
            if (m > 2'000'000) throw truncation_error("lambda_hat: r^(1) did not converge");
        }
    }
    cplx r2 = cplx(0.0, 1.0) * ((out.B - 1.0) * pc.c0);
    cplx r3 = cplx(-(1.0 + out.B) * pc.one_minus_abss * pc.eps0, 0.0);
    out.r = r1 + r2 + r3;
    out.lam = std::abs((1.0 + out.B) * pc.eps0 + out.r);
    out.R = out.lam - 1.0 - out.B;
    out.w = qpow(h, jj) * (nn - jj) / nn * (1.0 + q2nmj) / (1.0 + q2n);
    out.cosj = std::cos(jj * kPi / (2.0 * nn));
    out.delta = j >= 1 ? out.lam * (nn / (nn - jj)) * out.cosj * (1.0 + q2n) /
                                 ((1.0 + q2nmj) * (1.0 + qpow(h, 2.0 * jj))) -
                             1.0
                       : 0.0;
    return out;
}

}  // namespace detail

/// Integer part of sqrt(n) (the paper's [sqrt n] summation split).
inline std::int64_t isqrt_floor(std::int64_t n) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// k-independent data for evaluating the derivative representation: per-j
/// coefficient tables for P_q and gamma_1..gamma_5 as trig polynomials in
/// x = t_k - y. Coefficients beyond the underflow horizon are exactly zero
/// and are trimmed; `tail_bound` tracks the dropped mass.
struct GammaTable {
    std::int64_t n = 0;
    double q = 0.0;
    double eps0 = 0.0;
    std::int64_t jroot = 0;  // floor(sqrt n)
    std::int64_t jmax = 0;   // last lambda-based index kept (<= n-1)
    std::int64_t jq = 0;     // last P_q index kept
    double gamma2 = 0.0;
    double g1_const = 0.0;                   // gamma_1's j = 0 contribution
    std::vector<double> pq;                  // [1..jq]: 2 q^j/(1+q^{2j})
    std::vector<double> g1a, g1b, g3c, g4c;  // [1..jmax] per-j coefficients
    double tail_bound = 0.0;
    std::vector<detail::LambdaHat> lam;  // j = 0..jmax

    /// P_q(x): direct, full precision.
    double P_q(double x) const {
        double s = 0.5;
        for (std::int64_t j = 1; j <= jq; ++j) s += pq[static_cast<std::size_t>(j)] * std::cos(static_cast<double>(j) * x);
        return s;
    }
    double gamma1(double x) const {
        double s = g1_const;
        for (std::int64_t j = 1; j <= jmax; ++j)
            s += g1a[static_cast<std::size_t>(j)] * std::cos(static_cast<double>(j) * x) +
                 g1b[static_cast<std::size_t>(j)] * std::sin(static_cast<double>(j) * x);
        return s;
    }
    double gamma3(double x) const {
        double s = 0.0;
        for (std::int64_t j = jroot + 1; j <= jmax; ++j)
            s += g3c[static_cast<std::size_t>(j)] * std::cos(static_cast<double>(j) * x);
        return s;
    }
    double gamma4(double x) const {
        double s = 0.0;
        for (std::int64_t j = 1; j <= std::min(jroot, jmax); ++j)
            s += g4c[static_cast<std::size_t>(j)] * std::cos(static_cast<double>(j) * x);
        return s;
    }
    double gamma5(double x) const {
        double s = 0.0;
        for (std::int64_t j = jroot + 1; j <= jq; ++j)
            s += pq[static_cast<std::size_t>(j)] * std::cos(static_cast<double>(j) * x);
        return -eps0 * s;
    }
    /// eps0 P_q(x) + sum gamma_m(x): the bracket of the P_q form. The
    /// P_q tail beyond [sqrt n] cancels gamma_5 algebraically, so the bracket
    /// is the finite trig polynomial with the lambda-based coefficients.
    double bracket(double x) const {
        double s = eps0 * 0.5 + gamma2 + g1_const;
        std::int64_t top = std::max(jmax, std::min(jroot, jq));
        for (std::int64_t j = 1; j <= top; ++j) {
            double a = 0.0;
            if (j <= jroot && j <= jq) a += eps0 * pq[static_cast<std::size_t>(j)];
            if (j <= jmax) {
                a += g1a[static_cast<std::size_t>(j)] + g3c[static_cast<std::size_t>(j)] + g4c[static_cast<std::size_t>(j)];
                s += g1b[static_cast<std::size_t>(j)] * std::sin(static_cast<double>(j) * x);
            }
            s += a * std::cos(static_cast<double>(j) * x);
        }
        return s;
    }
    double sum_gamma(double x) const { return gamma1(x) + gamma2 + gamma3(x) + gamma4(x) + gamma5(x); }

    /// One fused pass over the coefficient tables with an incremental phase
    /// rotation (re-anchored every 1024 steps). Fills g[0..4] = gamma_1..5 and
    /// returns P_q(x).
    double gamma_all(double x, double g[5]) const {
        std::int64_t top = std::max(jmax, jq);
        double c1 = g1_const, c3 = 0.0, c4 = 0.0, c5 = 0.0, P = 0.5;
        cplx w = std::polar(1.0, x), z = w;
        for (std::int64_t j = 1; j <= top; ++j) {
            if ((j & 1023) == 0) z = std::polar(1.0, static_cast<double>(j) * x);
            double cj = z.real(), sj = z.imag();
            if (j <= jmax) {
                c1 += g1a[static_cast<std::size_t>(j)] * cj + g1b[static_cast<std::size_t>(j)] * sj;
                if (j > jroot)
                    c3 += g3c[static_cast<std::size_t>(j)] * cj;
                else
                    c4 += g4c[static_cast<std::size_t>(j)] * cj;
            }
            if (j <= jq) {
                double pj = pq[static_cast<std::size_t>(j)] * cj;
                P += pj;
                if (j > jroot) c5 += pj;
            }
            z *= w;
        }
        g[0] = c1;
        g[1] = gamma2;
        g[2] = c3;
        g[3] = c4;
        g[4] = -eps0 * c5;
        return P;
    }

    /// bracket(x) via the same rotation pass.
    double bracket_fast(double x) const {
        std::int64_t top = std::max(jmax, std::min(jroot, jq));
        double s = eps0 * 0.5 + gamma2 + g1_const;
        cplx w = std::polar(1.0, x), z = w;
        for (std::int64_t j = 1; j <= top; ++j) {
            if ((j & 1023) == 0) z = std::polar(1.0, static_cast<double>(j) * x);
            double a = 0.0;
            if (j <= jroot && j <= jq) a += eps0 * pq[static_cast<std::size_t>(j)];
            if (j <= jmax) {
                a += g1a[static_cast<std::size_t>(j)] + g3c[static_cast<std::size_t>(j)] +
                     g4c[static_cast<std::size_t>(j)];
                s += g1b[static_cast<std::size_t>(j)] * z.imag();
            }
            s += a * z.real();
            z *= w;
        }
        return s;
    }
};

inline GammaTable make_gamma_table(const NodeGrid& g, const KernelParams& p,
                                   const SeriesConfig& cfg = {}) {
    GammaTable t;
    t.n = g.n;
    t.q = p.q;
    // the split index never exceeds the last defined eigenvalue offset n-1
    // (only n = 1 clamps: [sqrt n] <= n-1 for every n >= 2)
    t.jroot = std::min(isqrt_floor(g.n), g.n - 1);

    // use the root identity for the phase data when y is (numerically) y0
    double theta = g.y * static_cast<double>(g.n) / kPi;
    detail::PhaseContext pc;
    {
        auto ts = extremal::detail::make_theta_series(g.n, p);
        if (std::abs(ts.f(theta)) < 1e-9)
            pc = detail::phase_context_at_root(g.n, theta, p);
        else
            pc = detail::phase_context(g, p);
    }
    t.eps0 = pc.eps0;

    double lq = std::log(p.q);
    // P_q coefficients to the underflow horizon (but at least past jroot)
    {
        double tol = std::min(cfg.abs_tol, 1e-16);
        std::int64_t J = static_cast<std::int64_t>(std::ceil(std::log(2.0 / (tol * (1.0 - p.q))) / -lq));
        t.jq = std::max<std::int64_t>(1, J);
        t.pq.assign(static_cast<std::size_t>(t.jq + 1), 0.0);
        for (std::int64_t j = 1; j <= t.jq; ++j) {
            double qj = std::exp(static_cast<double>(j) * lq);
            t.pq[static_cast<std::size_t>(j)] = 2.0 * qj / (1.0 + qj * qj);
        }
    }

    // lambda-based coefficients: stop once w_j underflows (every remaining
    // coefficient is exactly zero in binary64)
    double phase1 = series::detail::reduce_beta(p.beta + 1.0) * kPi / 2.0;
    std::int64_t jcap = g.n - 1;
    {
        std::int64_t horizon = static_cast<std::int64_t>(std::ceil(745.0 / p.h)) + 2;
        if (horizon < jcap) {
            jcap = horizon;
            t.tail_bound = 1e-300;  // dropped lambda terms are below denormal range
        }
    }
    t.jmax = jcap;
    t.lam.resize(static_cast<std::size_t>(t.jmax + 1));
    t.g1a.assign(static_cast<std::size_t>(t.jmax + 1), 0.0);
    t.g1b.assign(static_cast<std::size_t>(t.jmax + 1), 0.0);
    t.g3c.assign(static_cast<std::size_t>(t.jmax + 1), 0.0);
    t.g4c.assign(static_cast<std::size_t>(t.jmax + 1), 0.0);

    parallel_for(static_cast<std::size_t>(t.jmax + 1), [&](std::size_t ji) {
        auto j = static_cast<std::int64_t>(ji);
        t.lam[ji] = detail::lambda_hat(j, g.n, pc, p, phase1);
    });

    const auto& L0 = t.lam[0];
    if (L0.lam == 0.0) throw conditioning_error("make_gamma_table: lambda_n vanished", g.n);
    t.g1_const = (L0.r.real() - L0.R * pc.eps0) / (L0.lam * L0.lam);  // w_0 = 1, cos_0 = 1
    t.gamma2 = -L0.R / (2.0 * (2.0 + L0.R)) * pc.eps0;

    for (std::int64_t j = 1; j <= t.jmax; ++j) {
        const auto& L = t.lam[static_cast<std::size_t>(j)];
        if (L.lam == 0.0) throw conditioning_error("make_gamma_table: lambda_{n-j} vanished", g.n - j);
        double denom = L.lam * L.lam * L.cosj;
        t.g1a[static_cast<std::size_t>(j)] = 2.0 * L.w * (L.r.real() - L.R * pc.eps0) / denom;
        t.g1b[static_cast<std::size_t>(j)] = -2.0 * L.w * L.r.imag() / denom;
        if (j > t.jroot)
            t.g3c[static_cast<std::size_t>(j)] = 2.0 * pc.eps0 * L.w / (L.lam * L.cosj);
        else
            t.g4c[static_cast<std::size_t>(j)] = -2.0 * pc.eps0 * L.delta * L.w / (L.lam * L.cosj);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Derivative representation: the three equivalent forms
// ---------------------------------------------------------------------------

/// Interval index k with t in ((k-1)pi/n, k pi/n); throws at the nodes.
inline std::int64_t interval_index(double t, const NodeGrid& g) {
    double nn = static_cast<double>(g.n);
    double tr = t - kTwoPi * std::floor(t / kTwoPi);
    double pos = tr * nn / kPi;  // in [0, 2n)
    double frac = pos - std::floor(pos);
    if (frac < 1e-9 || frac > 1.0 - 1e-9)
        throw std::domain_error("derivative representation: t coincides with a partition node");
    return static_cast<std::int64_t>(std::floor(pos)) + 1;
}

namespace detail {

/// pi / (4 n psi(n)); refuses to return an overflowed prefactor.
inline double deriv_prefactor(std::int64_t n, const KernelParams& p) {
    double pn = series::psi(n, p);
    double pref = kPi / (4.0 * static_cast<double>(n) * pn);
    if (pn == 0.0 || !std::isfinite(pref))
        throw std::overflow_error("derivative representation: pi/(4 n psi(n)) overflows binary64");
    return pref;
}

}  // namespace detail

/// Spectral form: the Re/Im sums over the eigenvalues lambda_j, j = 1..n.
inline double deriv_repr_spectral(double t, const NodeGrid& g, const KernelParams& p,
                            const SeriesConfig& cfg = {}) {
    std::int64_t n = g.n;
    std::int64_t k = interval_index(t, g);
    double tk = g.midpoint(k);
    double nn = static_cast<double>(n);
    double s = 0.0;
    for (std::int64_t j = 1; j < n; ++j) {
        cplx lj = lambda_closed(j, g, p, cfg);
        double a2 = std::norm(lj);
        if (a2 == 0.0) throw conditioning_error("deriv_repr_spectral: lambda_j vanished", j);
        double jj = static_cast<double>(j);
        s += (std::sin(jj * tk) * lj.real() - std::cos(jj * tk) * lj.imag()) /
             (a2 * std::sin(jj * kPi / (2.0 * nn)));
    }
    cplx ln = lambda_closed(n, g, p, cfg);
    double a2 = std::norm(ln);
    if (a2 == 0.0) throw conditioning_error("deriv_repr_spectral: lambda_n vanished", n);
    double sign_k = (k % 2 == 1) ? 1.0 : -1.0;
    double total = 2.0 * s + sign_k * ln.real() / a2;
    return kPi / (4.0 * nn * nn) * total;
}

/// Modulus form: the |lambda_{n-j}| sums with gamma_1, gamma_2.
inline double deriv_repr_modulus(double t, const NodeGrid& g, const KernelParams& p,
                                const SeriesConfig& cfg = {}) {
    std::int64_t k = interval_index(t, g);
    double x = g.midpoint(k) - g.y;
    GammaTable gt = make_gamma_table(g, p, cfg);
    double S = 0.0;
    for (std::int64_t j = 1; j <= gt.jmax; ++j) {
        const auto& L = gt.lam[static_cast<std::size_t>(j)];
        S += L.w * std::cos(static_cast<double>(j) * x) / (L.lam * L.cosj);
    }
    double bracket = (0.5 + 2.0 * S) * gt.eps0 + gt.gamma1(x) + gt.gamma2;
    double sign_k = (k % 2 == 1) ? 1.0 : -1.0;
    return sign_k * detail::deriv_prefactor(g.n, p) * bracket;
}

/// P_q form: the analytic-strip kernel with gamma_1..gamma_5.
inline double deriv_repr_pq(double t, const NodeGrid& g, const KernelParams& p,
                                const SeriesConfig& cfg = {}) {
    std::int64_t k = interval_index(t, g);
    double x = g.midpoint(k) - g.y;
    GammaTable gt = make_gamma_table(g, p, cfg);
    double bracket = gt.eps0 * gt.P_q(x) + gt.sum_gamma(x);
    double sign_k = (k % 2 == 1) ? 1.0 : -1.0;
    return sign_k * detail::deriv_prefactor(g.n, p) * bracket;
}

/// The spec'd derivative evaluator (the rho/sigma form).
inline double eval_derivative_repr(double t, const NodeGrid& g, const KernelParams& p,
                                   const SeriesConfig& cfg = {}) {
    return deriv_repr_spectral(t, g, p, cfg);
}

// ---------------------------------------------------------------------------
// Gamma breakdown against its explicit bound
// ---------------------------------------------------------------------------

struct GammaBreakdown {
    std::array<double, 5> gamma{};  ///< gamma_1..gamma_5 at the worst midpoint
    double sum_abs = 0.0;           ///< max over midpoints of sum_l |gamma_l|
    double gamma_bound = 0.0;
    bool remainder_ok = false;
    bool n_ok = false;      ///< n >= 9
    std::int64_t worst_k = 0;
    bool exact = true;  ///< false when sum_abs is a coefficient-sum upper estimate
};

/// (37/(5(1-q))) q^{sqrt n} + (q/(1-q)^2) min{160/(27(n-sqrt n)), 8/(3n-7 sqrt n)}.
inline double gamma_bound(std::int64_t n, double q) {
    double nn = static_cast<double>(n);
    double rn = std::sqrt(nn);
    double lq = std::log(q);
    double m1 = 160.0 / (27.0 * (nn - rn));
    double m2 = 8.0 / (3.0 * nn - 7.0 * rn);
    return 37.0 / (5.0 * (1.0 - q)) * std::exp(rn * lq) +
           q / ((1.0 - q) * (1.0 - q)) * std::min(m1, m2);
}

/// Per-midpoint storage cap: above this, midpoint loops switch to the
/// summarized (coefficient-bound / global-scan) route.
inline constexpr std::int64_t kMidpointCap = std::int64_t(1) << 21;

inline GammaBreakdown gamma_breakdown(const NodeGrid& g, const KernelParams& p,
                                      const SeriesConfig& cfg = {}) {
    GammaTable t = make_gamma_table(g, p, cfg);
    GammaBreakdown out;
    out.gamma_bound = gamma_bound(g.n, p.q);
    out.remainder_ok = thresholds::check_remainder_condition(g.n, p.q);
    out.n_ok = g.n >= 9;

    if (2 * g.n <= kMidpointCap) {
        std::int64_t K = 2 * g.n;
        std::vector<double> sums(static_cast<std::size_t>(K));
        parallel_for(static_cast<std::size_t>(K), [&](std::size_t ki) {
            double x = g.midpoint(static_cast<std::int64_t>(ki) + 1) - g.y;
            double gm[5];
            t.gamma_all(x, gm);
            sums[ki] = std::abs(gm[0]) + std::abs(gm[1]) + std::abs(gm[2]) + std::abs(gm[3]) +
                       std::abs(gm[4]);
        });
        std::size_t worst = 0;
        for (std::size_t i = 1; i < sums.size(); ++i)
            if (sums[i] > sums[worst]) worst = i;
        double x = g.midpoint(static_cast<std::int64_t>(worst) + 1) - g.y;
        out.gamma = {t.gamma1(x), t.gamma2, t.gamma3(x), t.gamma4(x), t.gamma5(x)};
        out.sum_abs = sums[worst];
        out.worst_k = static_cast<std::int64_t>(worst) + 1;
        out.exact = true;
    } else {
        // coefficient-magnitude upper bounds; rigorous and cheap at huge n
        double s1 = std::abs(t.g1_const), s3 = 0.0, s4 = 0.0, s5 = 0.0;
        for (std::int64_t j = 1; j <= t.jmax; ++j) {
            s1 += std::hypot(t.g1a[static_cast<std::size_t>(j)], t.g1b[static_cast<std::size_t>(j)]);
            s3 += std::abs(t.g3c[static_cast<std::size_t>(j)]);
            s4 += std::abs(t.g4c[static_cast<std::size_t>(j)]);
        }
        for (std::int64_t j = t.jroot + 1; j <= t.jq; ++j) s5 += t.pq[static_cast<std::size_t>(j)];
        double x1 = g.midpoint(1) - g.y;
        out.gamma = {t.gamma1(x1), t.gamma2, t.gamma3(x1), t.gamma4(x1), t.gamma5(x1)};
        out.sum_abs = s1 + std::abs(t.gamma2) + s3 + s4 + s5 + t.tail_bound;
        out.worst_k = 1;
        out.exact = false;
    }
    return out;
}

}  // namespace skw::spline
