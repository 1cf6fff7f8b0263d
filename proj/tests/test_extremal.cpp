#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "skw/extremal.hpp"
#include "skw/oracle.hpp"

using namespace skw;
using Catch::Matchers::WithinAbs;

namespace {

// independent bisection oracle on the full (unnormalized) series, residual to
// machine precision
double theta_bisect_oracle(std::int64_t n, double h, double beta) {
    auto f = [&](double th) {
        double s = 0.0;
        for (int nu = 0; nu < 200; ++nu) {
            double m = 2.0 * nu + 1.0;
            double c = 1.0 / std::cosh(std::min(700.0, m * static_cast<double>(n) * h));
            if (c == 0.0) break;
            s += c * std::cos(m * th * kPi - beta * kPi / 2.0);
        }
        return s;
    };
    double t0 = (beta + 1.0) / 2.0;
    t0 -= std::floor(t0);
    double a = t0 - 0.25, b = t0 + 0.25;
    REQUIRE(f(a) * f(b) <= 0.0);
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        (f(a) * f(m) <= 0.0 ? b : a) = m;
    }
    double r = 0.5 * (a + b);
    r -= std::floor(r);
    return r >= 1.0 - 1e-12 ? 0.0 : r;
}

}  // namespace

TEST_CASE("solve_theta: symmetry roots for integer beta") {
    for (double h : {0.5, 1.0, 2.0})
        for (std::int64_t n : {1, 3, 7}) {
            REQUIRE_THAT(extremal::solve_theta(n, KernelParams(h, 0.0)).theta, WithinAbs(0.5, 1e-13));
            REQUIRE_THAT(extremal::solve_theta(n, KernelParams(h, 2.0)).theta, WithinAbs(0.5, 1e-13));
            REQUIRE_THAT(extremal::solve_theta(n, KernelParams(h, 1.0)).theta, WithinAbs(0.0, 1e-13));
            REQUIRE_THAT(extremal::solve_theta(n, KernelParams(h, -1.0)).theta, WithinAbs(0.0, 1e-13));
        }
}

TEST_CASE("solve_theta matches the bisection oracle and satisfies its contract") {
    auto sol = extremal::solve_theta(3, KernelParams(1.0, 0.5));
    REQUIRE_THAT(sol.theta, WithinAbs(theta_bisect_oracle(3, 1.0, 0.5), 1e-12));
    REQUIRE_THAT(sol.theta, WithinAbs(0.7507909654104721, 1e-10));
    REQUIRE(std::abs(sol.residual) < 1e-13);
    REQUIRE(sol.unique);

    for (double beta : {0.3, 0.77, 1.21})
        for (std::int64_t n : {2, 5, 9}) {
            auto s = extremal::solve_theta(n, KernelParams(0.8, beta));
            REQUIRE_THAT(s.theta, WithinAbs(theta_bisect_oracle(n, 0.8, beta), 1e-12));
            REQUIRE(std::abs(s.residual) < 1e-13);
            REQUIRE(s.unique);
        }
}

TEST_CASE("solve_theta: parity beta vs beta + 2, periodicity beta vs beta + 4k") {
    for (double beta : {0.25, 0.6, 1.4})
        for (std::int64_t n : {3, 6}) {
            double a = extremal::solve_theta(n, KernelParams(1.0, beta)).theta;
            double b = extremal::solve_theta(n, KernelParams(1.0, beta + 2.0)).theta;
            REQUIRE_THAT(a, WithinAbs(b, 1e-12));
            double c = extremal::solve_theta(n, KernelParams(1.0, beta + 100.0)).theta;
            REQUIRE_THAT(a, WithinAbs(c, 1e-12));
        }
}

TEST_CASE("solve_theta survives huge n via the normalized equation") {
    auto s = extremal::solve_theta(150'000'000, KernelParams(0.3, 0.5));
    REQUIRE_THAT(s.theta, WithinAbs(0.75, 1e-13));  // tail underflows, pure phase root
    REQUIRE(s.unique);
}

TEST_CASE("eval_Phi: antiperiodicity, odd symmetry, frozen sup value") {
    KernelParams p(1.0, 0.0);
    SeriesConfig cfg;
    for (double t : {0.1, 0.9, 2.2})
        REQUIRE_THAT(extremal::eval_Phi(t + kPi / 3.0, 3, p, cfg),
                     WithinAbs(-extremal::eval_Phi(t, 3, p, cfg), 1e-12));
    REQUIRE_THAT(extremal::eval_Phi(0.0, 4, p, cfg), WithinAbs(0.0, 1e-14));
    // dense-grid maximization oracle value at t = pi/6
    REQUIRE_THAT(extremal::eval_Phi(kPi / 6.0, 3, p, cfg),
                 WithinAbs(0.12636364711288386, 1e-12));
}

TEST_CASE("best_approx_value equals the grid sup of |Phi| and flags validity") {
    KernelParams p(1.0, 0.0);
    auto w = extremal::best_approx_value(3, p);
    REQUIRE_THAT(w.value, WithinAbs(0.12636364711288386, 1e-12));
    REQUIRE_THAT(w.theta.theta, WithinAbs(0.5, 1e-13));
    REQUIRE(w.n_star == 3);
    REQUIRE(w.n_h == 81);
    REQUIRE(w.valid_E);
    REQUIRE_FALSE(w.valid_width);

    // odd beta kills the phase: value = (4/pi) sum 1/((2nu+1) cosh((2nu+1) n h))
    KernelParams podd(1.0, 1.0);
    auto wo = extremal::best_approx_value(5, podd);
    double direct = 0.0;
    for (int nu = 0; nu < 40; ++nu)
        direct += 1.0 / ((2.0 * nu + 1.0) * std::cosh((2.0 * nu + 1.0) * 5.0));
    REQUIRE_THAT(wo.value, WithinAbs(4.0 / kPi * direct, 1e-14));
    REQUIRE_THAT(wo.theta.theta, WithinAbs(0.0, 1e-13));
}

TEST_CASE("value is invariant under beta -> beta + 2") {
    for (double beta : {0.0, 0.45, 1.2}) {
        double a = extremal::best_approx_value(4, KernelParams(0.9, beta)).value;
        double b = extremal::best_approx_value(4, KernelParams(0.9, beta + 2.0)).value;
        REQUIRE_THAT(a, WithinAbs(b, 1e-14));
    }
}

TEST_CASE("y0 maximizes |Phi| and the sup-norm identity holds on a sweep") {
    SeriesConfig cfg;
    for (double h : {0.5, 1.0, 2.0}) {
        std::int64_t lo = std::max<std::int64_t>(3, thresholds::n_star(h));
        for (double beta : {0.0, 0.5, 1.3})
            for (std::int64_t n = lo; n <= lo + 3; ++n) {
                KernelParams p(h, beta);
                auto w = extremal::best_approx_value(n, p);
                auto gs = oracle::sup_norm(
                    [&](double t) { return extremal::eval_Phi(t, n, p, cfg); },
                    kPi / static_cast<double>(n));
                REQUIRE_THAT(w.value, WithinAbs(gs.max_value, 1e-10 * gs.max_value));
                double y0 = w.theta.theta * kPi / static_cast<double>(n);
                double at_y0 = std::abs(extremal::eval_Phi(y0, n, p, cfg));
                REQUIRE(at_y0 >= gs.max_value - 1e-12);
            }
    }
}

TEST_CASE("gamma_n: direct arithmetic check at moderate n and the bound") {
    KernelParams p(1.0, 0.0);
    auto w = extremal::best_approx_value(3, p);
    // plain rearrangement of the asymptotic identity at n = 3 (no underflow here)
    double naive = (w.value - 4.0 / kPi / std::cosh(3.0)) * std::cosh(3.0) *
                   (1.0 - std::exp(-6.0)) / std::exp(-6.0);
    REQUIRE_THAT(w.gamma_n, WithinAbs(naive, 1e-9));
    REQUIRE_THAT(w.gamma_n, WithinAbs(-0.42378047767153604, 1e-7));

    const double bound = 28.0 / (3.0 * kPi);
    for (double h : {0.3, 0.5, 1.0})
        for (double beta : {0.0, 0.5, 1.0}) {
            std::int64_t n0 = thresholds::n_h(h);
            for (std::int64_t n : {n0, n0 + 1, 2 * n0}) {
                double g = extremal::asymptotic_decompose(n, KernelParams(h, beta));
                REQUIRE(std::abs(g) <= bound);
            }
        }
}

TEST_CASE("value * cosh(nh) converges to 4/pi inside the shrinking sandwich band") {
    KernelParams p(0.5, 0.7);
    double prev_band = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (std::int64_t n = 9; n <= 49; n += 10) {
        double scaled =
            extremal::best_approx_value(n, p).value * std::cosh(0.5 * static_cast<double>(n));
        double q2n = qpow(0.5, 2.0 * static_cast<double>(n));
        double band = 4.0 / kPi * (7.0 / 3.0) * q2n / (1.0 - q2n);
        REQUIRE(std::abs(scaled - 4.0 / kPi) <= band);
        REQUIRE(band < prev_band);
        prev_band = band;
        last = scaled;
    }
    REQUIRE_THAT(last, WithinAbs(4.0 / kPi, 1e-8));
}

TEST_CASE("gamma_n keeps its O(1) limit when the equation tail underflows") {
    // for even beta the scaled tail tends to -1/3, so gamma_n -> -4/(3 pi);
    // the limit must survive arbitrarily large nh
    double g20 = extremal::asymptotic_decompose(20, KernelParams(1.0, 0.0));
    double g81 = extremal::asymptotic_decompose(81, KernelParams(1.0, 0.0));
    double ghuge = extremal::asymptotic_decompose(150'000'000, KernelParams(0.3, 0.0));
    REQUIRE_THAT(g20, WithinAbs(-4.0 / (3.0 * kPi), 1e-9));
    REQUIRE_THAT(g81, WithinAbs(-4.0 / (3.0 * kPi), 1e-12));
    REQUIRE_THAT(ghuge, WithinAbs(-4.0 / (3.0 * kPi), 1e-12));
}

TEST_CASE("two-sided sandwich holds and collapses") {
    REQUIRE(extremal::two_sided_check(3, KernelParams(1.0, 0.0)));
    REQUIRE(extremal::two_sided_check(40, KernelParams(0.3, 0.7)));
    REQUIRE(extremal::two_sided_check(200'000'000, KernelParams(0.3, 0.9)));
    // bounds collapse: the band width (upper-lower)/middle -> 0
    KernelParams p(1.0, 0.4);
    double prev = 1.0;
    for (std::int64_t n : {2, 4, 8, 16}) {
        double q2n = qpow(1.0, 2.0 * static_cast<double>(n));
        double band = 2.0 * (7.0 / 3.0) * q2n / (1.0 - q2n);
        REQUIRE(band < prev);
        prev = band;
    }
}
