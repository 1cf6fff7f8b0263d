#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "skw/thresholds.hpp"

using namespace skw;
using Catch::Matchers::WithinAbs;

TEST_CASE("n_star: branch constant and scanned values") {
    REQUIRE(thresholds::n_star(1.3) == 1);
    REQUIRE(thresholds::n_star(std::log(10.0 / 3.0)) == 1);
    REQUIRE(thresholds::n_star(1.0) == 3);
    REQUIRE(thresholds::n_star(0.5) == 6);
    REQUIRE(thresholds::n_star(0.3) == 11);
}

TEST_CASE("n_star minimality and persistence window") {
    double h = 1.0;
    std::int64_t ns = thresholds::n_star(h);
    for (std::int64_t n = 1; n < ns; ++n)
        REQUIRE_FALSE(thresholds::detail::best_approx_majorant_holds(h, static_cast<double>(n)));
    for (std::int64_t n = ns; n <= ns + 50; ++n)
        REQUIRE(thresholds::detail::best_approx_majorant_holds(h, static_cast<double>(n)));
}

TEST_CASE("n_h: frozen values, minimality, persistence") {
    REQUIRE(thresholds::n_h(1.0) == 81);
    REQUIRE(thresholds::n_h(2.0) == 9);
    REQUIRE(thresholds::n_h(0.5) == 28272);
    for (std::int64_t n = 9; n < 81; ++n) REQUIRE_FALSE(thresholds::detail::n_h_holds(1.0, n));
    for (std::int64_t n = 81; n <= 131; ++n) REQUIRE(thresholds::detail::n_h_holds(1.0, n));
}

TEST_CASE("n_h is nonincreasing in h on a grid") {
    std::int64_t prev = std::numeric_limits<std::int64_t>::max();
    for (double h = 0.2; h <= 3.01; h += 0.2) {
        std::int64_t v = thresholds::n_h(h);
        REQUIRE(v <= prev);
        REQUIRE(v >= 9);
        REQUIRE(v >= thresholds::n_star(h));
        prev = v;
    }
}

TEST_CASE("rho_star: frozen root, residual, bracket") {
    double r = thresholds::rho_star();
    REQUIRE_THAT(r, WithinAbs(0.3253678, 1e-7));  // stated digits are a truncation
    double res = 2.0 * r + (1.0 + 3.0 * r) * r * r / ((1.0 - r) * std::sqrt(1.0 - 2.0 * r * r)) - 1.0;
    REQUIRE(std::abs(res) < 1e-12);
    // bracket validity: left side below 1 at 0, above 1 at 0.5
    REQUIRE(2.0 * 0.0 < 1.0);
    double at_half = 2.0 * 0.5 + (1.0 + 1.5) * 0.25 / ((0.5) * std::sqrt(0.5));
    REQUIRE(at_half > 1.0);
}

TEST_CASE("classical range boundaries") {
    REQUIRE(thresholds::check_classical_range(1.644651, 0.0));
    REQUIRE_FALSE(thresholds::check_classical_range(1.644641, 0.0));
    REQUIRE(thresholds::check_classical_range(1.67423, 0.5));
    REQUIRE_FALSE(thresholds::check_classical_range(1.0, 0.0));
    REQUIRE(thresholds::check_classical_range(2.0, 0.0));
    // integer beta uses rho = 0.2, non-integer 0.193864
    REQUIRE(thresholds::check_classical_range(1.65, 0.0));
    REQUIRE_FALSE(thresholds::check_classical_range(1.65, 0.5));
}

TEST_CASE("remainder condition examples and implication from the width condition") {
    double q = std::exp(-1.0);
    REQUIRE(thresholds::check_remainder_condition(81, q));
    REQUIRE_FALSE(thresholds::check_remainder_condition(9, q));
    // wherever the n_h inequality holds (n >= 9), the remainder condition follows
    for (double h : {0.5, 1.0, 2.0})
        for (std::int64_t n : {9LL, 40LL, 81LL, 200LL, 30000LL})
            if (thresholds::check_width_condition(h, n)) REQUIRE(thresholds::check_remainder_condition(n, std::exp(-h)));
}

TEST_CASE("best-approximation condition: direct evaluations and majorant implication") {
    // the q^{2n} majorant implies the exact-eps_n condition pointwise
    for (double h : {0.4, 0.8, 1.1})
        for (std::int64_t n = 1; n <= 60; ++n)
            if (thresholds::detail::best_approx_majorant_holds(h, static_cast<double>(n)))
                REQUIRE(thresholds::check_best_approx_condition(n, KernelParams(h)));

    // at n = 1 the A^{2n}/sqrt(1-A^{2n}) term tends to (1/4)/sqrt(3/4) and the
    // right side exceeds 1 even as q -> 0, so the condition fails for every h
    REQUIRE_FALSE(thresholds::check_best_approx_condition(1, KernelParams(5.0)));
    REQUIRE(thresholds::check_best_approx_condition(2, KernelParams(5.0)));
    REQUIRE_FALSE(thresholds::check_best_approx_condition(1, KernelParams(0.1)));
}

TEST_CASE("threshold report bundles the pieces") {
    auto r = thresholds::compute(1.0);
    REQUIRE(r.n_star == 3);
    REQUIRE(r.n_h == 81);
    REQUIRE(r.branch == thresholds::Branch::scanned);
    REQUIRE_FALSE(r.rho_condition_met);
    auto r2 = thresholds::compute(2.0);
    REQUIRE(r2.branch == thresholds::Branch::direct);
    REQUIRE(r2.rho_condition_met);
    REQUIRE_THROWS_AS(thresholds::n_star(-1.0), std::invalid_argument);
}

TEST_CASE("scan cap fails loudly as h -> 0") {
    REQUIRE_THROWS_AS(thresholds::n_h(1e-9), scan_limit_error);
}
