#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "skw/series.hpp"

using namespace skw;
using Catch::Matchers::WithinAbs;

TEST_CASE("psi matches cosh reciprocals") {
    // cosh(ln 2) = 5/4, so psi(1) = 4/5 exactly
    KernelParams p(std::log(2.0));
    REQUIRE_THAT(series::psi(1, p), WithinAbs(0.8, 1e-15));

    KernelParams p1(1.0);
    REQUIRE_THAT(series::psi(1, p1), WithinAbs(1.0 / std::cosh(1.0), 1e-15));
    REQUIRE_THAT(series::psi(3, p1), WithinAbs(1.0 / std::cosh(3.0), 1e-15));
}

TEST_CASE("psi is overflow-safe at extreme arguments") {
    KernelParams p(1.0);
    double v = series::psi(2000, p);
    REQUIRE(std::isfinite(v));
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1e-300);

    for (double h : {1e-3, 1.0, 1e2}) {
        KernelParams ph(h);
        for (std::int64_t k : {1LL, 1000LL, 100000LL, 1000000LL}) {
            double x = series::psi(k, ph);
            REQUIRE(std::isfinite(x));
            REQUIRE(x >= 0.0);
        }
    }
    REQUIRE_THROWS_AS(series::psi(0, p), std::invalid_argument);
}

TEST_CASE("KernelParams validates h") {
    REQUIRE_THROWS_AS(KernelParams(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(KernelParams(-1.0), std::invalid_argument);
    KernelParams p(2.0, 0.5);
    REQUIRE_THAT(p.q, WithinAbs(std::exp(-2.0), 1e-18));
}

TEST_CASE("eval_H: phase kill, frozen sum, periodicity, beta shift") {
    SeriesConfig cfg;
    // beta = 1 at t = 0: every term is cos(-pi/2) = 0
    REQUIRE_THAT(series::eval_H(0.0, KernelParams(1.0, 1.0), cfg), WithinAbs(0.0, 1e-14));

    // brute-force oracle for sum 1/cosh(k): direct summation to tail < 1e-15
    // gives 1.0711213299678... at h = 1
    KernelParams p(1.0, 0.0);
    REQUIRE_THAT(series::eval_H(0.0, p, cfg), WithinAbs(1.0711213299678224, 1e-13));

    KernelParams pb(0.7, 0.37);
    for (double t : {0.1, 1.7, 3.9, 5.5}) {
        REQUIRE_THAT(series::eval_H(t + kTwoPi, pb, cfg),
                     WithinAbs(series::eval_H(t, pb, cfg), 2.0 * cfg.abs_tol));
        REQUIRE_THAT(series::eval_Psi_beta1(t + kTwoPi, pb, cfg),
                     WithinAbs(series::eval_Psi_beta1(t, pb, cfg), 2.0 * cfg.abs_tol));
        REQUIRE_THAT(series::eval_P_q(t + kTwoPi, pb.q, cfg),
                     WithinAbs(series::eval_P_q(t, pb.q, cfg), 2.0 * cfg.abs_tol));
        KernelParams pb4(0.7, 0.37 + 4.0);
        REQUIRE_THAT(series::eval_H(t, pb4, cfg),
                     WithinAbs(series::eval_H(t, pb, cfg), 2.0 * cfg.abs_tol));
    }
}

TEST_CASE("eval_Psi_beta1: frozen sum and parity") {
    SeriesConfig cfg;
    // direct-summation oracle: sum 1/(k cosh k) = 0.82712624476902... at h=1
    REQUIRE_THAT(series::eval_Psi_beta1(0.0, KernelParams(1.0, -1.0), cfg),
                 WithinAbs(0.8271262447690266, 1e-13));
    // beta = 0: phase (beta+1)pi/2 = pi/2 kills t = 0
    REQUIRE_THAT(series::eval_Psi_beta1(0.0, KernelParams(1.0, 0.0), cfg), WithinAbs(0.0, 1e-14));
    // beta = -1 is a pure cosine series, hence even
    KernelParams pe(0.8, -1.0);
    for (double t : {0.3, 1.1, 2.9})
        REQUIRE_THAT(series::eval_Psi_beta1(-t, pe, cfg),
                     WithinAbs(series::eval_Psi_beta1(t, pe, cfg), 2.0 * cfg.abs_tol));
}

TEST_CASE("eval_P_q: frozen value, evenness, lower bound") {
    SeriesConfig cfg;
    // direct-summation oracle: 1/2 + 2 sum 1/(2^j + 2^-j) = 2.26618600712948...
    REQUIRE_THAT(series::eval_P_q(0.0, 0.5, cfg), WithinAbs(2.2661860071294866, 1e-13));
    for (double t : {0.4, 1.9, 3.0})
        REQUIRE_THAT(series::eval_P_q(-t, 0.35, cfg),
                     WithinAbs(series::eval_P_q(t, 0.35, cfg), 2.0 * cfg.abs_tol));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> qd(0.05, 0.95), td(0.0, kTwoPi);
    for (int i = 0; i < 200; ++i) {
        double q = qd(rng), t = td(rng);
        // the positive-term route resolves P_q to full relative precision even
        // where its value sits far below the cosine-series noise floor
        REQUIRE(series::eval_P_q_poisson(t, q) > series::P_q_lower_bound(q));
        REQUIRE_THAT(series::eval_P_q(t, q, cfg),
                     WithinAbs(series::eval_P_q_poisson(t, q), 1e-12));
    }
    REQUIRE_THROWS_AS(series::eval_P_q(0.0, 1.5, cfg), std::invalid_argument);
}

TEST_CASE("tail halving changes evaluators by less than the previous tolerance") {
    KernelParams p(0.6, 0.9);
    for (int i = 0; i < 100; ++i) {
        double t = kTwoPi * i / 100.0;
        for (double tol : {1e-8, 1e-10, 1e-12}) {
            SeriesConfig c1{tol, 10'000'000};
            SeriesConfig c2{tol / 2.0, 10'000'000};
            REQUIRE_THAT(series::eval_H(t, p, c2), WithinAbs(series::eval_H(t, p, c1), tol));
            REQUIRE_THAT(series::eval_Psi_beta1(t, p, c2),
                         WithinAbs(series::eval_Psi_beta1(t, p, c1), tol));
            REQUIRE_THAT(series::eval_P_q(t, p.q, c2), WithinAbs(series::eval_P_q(t, p.q, c1), tol));
        }
    }
}

TEST_CASE("epsilon_n agrees with the ratio-scan oracle") {
    // oracle: scan sup_{k>=n} |psi(k+1)/psi(k) - q| over k = n..10^4
    auto oracle = [](std::int64_t n, double q) {
        double sup = 0.0;
        for (std::int64_t k = n; k < 10'000; ++k) {
            double r = q * (1.0 + std::pow(q, 2.0 * static_cast<double>(k))) /
                       (1.0 + std::pow(q, 2.0 * static_cast<double>(k) + 2.0));
            sup = std::max(sup, std::abs(r - q));
        }
        return sup;
    };
    KernelParams p(std::log(2.0));  // q = 1/2
    double eps1 = series::epsilon_n(1, p);
    REQUIRE_THAT(eps1, WithinAbs(oracle(1, 0.5), 1e-15));
    REQUIRE_THAT(eps1, WithinAbs(3.0 / 34.0, 1e-15));  // = q^3 (1-q^2)/(1+q^4) at q = 1/2

    KernelParams p2(0.37);
    for (std::int64_t n : {1, 2, 5, 17})
        REQUIRE_THAT(series::epsilon_n(n, p2), WithinAbs(oracle(n, p2.q), 1e-15));
}

TEST_CASE("epsilon_n decreases and is dominated by q^{2n+1}") {
    KernelParams p(0.45);
    double prev = 1.0;
    for (std::int64_t n = 1; n <= 60; ++n) {
        double e = series::epsilon_n(n, p);
        REQUIRE(e < prev);
        REQUIRE(e < qpow(p.h, 2.0 * static_cast<double>(n) + 1.0));
        prev = e;
    }
}

TEST_CASE("unreachable tail bound raises a truncation error") {
    KernelParams p(1e-6);
    SeriesConfig cfg{1e-14, 100};
    REQUIRE_THROWS_AS(series::eval_H(0.0, p, cfg), truncation_error);
}
