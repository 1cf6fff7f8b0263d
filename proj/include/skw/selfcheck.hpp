#pragma once

// The oracle-equivalence suite: one callable check per acceptance criterion,
// shared by the acceptance test binary and the CLI selfcheck command. Each
// check re-derives its expected values from the independent oracles (grid
// search, Remez exchange, literal inequality scans) rather than from the code
// paths under test.

#include <chrono>
#include <random>
#include <sstream>

#include "skw/kushpel.hpp"
#include "skw/oracle.hpp"

namespace skw::selfcheck {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

namespace detail {

class Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

template <typename Body>
CheckResult run_check(int id, const std::string& name, Body&& body) {
    CheckResult r;
    r.id = id;
    r.name = name;
    Timer t;
    try {
        std::ostringstream detail;
        r.pass = body(detail);
        r.detail = detail.str();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = t.seconds();
    return r;
}

inline double circ_dist(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

}  // namespace detail

/// 1: exact symmetry roots of the theta equation.
inline CheckResult criterion1() {
    return detail::run_check(1, "symmetry-roots", [](std::ostringstream& out) {
        bool ok = true;
        for (double h : {0.5, 1.0, 2.0})
            for (std::int64_t n : {3, 5, 10}) {
                for (double beta : {0.0, 2.0, -2.0}) {
                    double th = extremal::solve_theta(n, KernelParams(h, beta)).theta;
                    if (detail::circ_dist(th, 0.5) > 1e-12) {
                        ok = false;
                        out << "theta(" << h << "," << beta << "," << n << ")=" << th << " != 1/2; ";
                    }
                }
                for (double beta : {1.0, -1.0, 3.0}) {
                    double th = extremal::solve_theta(n, KernelParams(h, beta)).theta;
                    if (detail::circ_dist(th, 0.0) > 1e-12) {
                        ok = false;
                        out << "theta(" << h << "," << beta << "," << n << ")=" << th << " != 0; ";
                    }
                }
            }
        return ok;
    });
}

/// 2: the width value equals the grid-refined sup of |Phi| (rel 1e-10).
inline CheckResult criterion2(const SeriesConfig& cfg = {}) {
    return detail::run_check(2, "sup-norm-identity", [&](std::ostringstream& out) {
        bool ok = true;
        double worst = 0.0;
        for (double h : {0.5, 1.0, 2.0}) {
            std::int64_t lo = std::max<std::int64_t>(3, thresholds::n_star(h));
            for (double beta : {0.0, 0.5, 1.0, 1.3})
                for (std::int64_t n = lo; n <= 12; ++n) {
                    KernelParams p(h, beta);
                    double value = extremal::best_approx_value(n, p).value;
                    auto gs = oracle::sup_norm(
                        [&](double t) { return extremal::eval_Phi(t, n, p, cfg); },
                        kPi / static_cast<double>(n));
                    double rel = std::abs(value - gs.max_value) / gs.max_value;
                    worst = std::max(worst, rel);
                    if (rel > 1e-10) {
                        ok = false;
                        out << "(" << h << "," << beta << "," << n << ") rel=" << rel << "; ";
                    }
                }
        }
        out << "max rel err " << worst;
        return ok;
    });
}

/// 3: Remez best trig approximation of Phi at order n-1 equals ||Phi||_C.
inline CheckResult criterion3(const SeriesConfig& cfg = {}) {
    return detail::run_check(3, "remez-equivalence", [&](std::ostringstream& out) {
        bool ok = true;
        double worst = 0.0;
        for (double beta : {0.0, 0.5, 1.0})
            for (std::int64_t n : {3, 4, 6}) {
                KernelParams p(1.0, beta);
                double value = extremal::best_approx_value(n, p).value;
                double err = oracle::remez_trig(
                    [&](double t) { return extremal::eval_Phi(t, n, p, cfg); },
                    static_cast<int>(n) - 1);
                double diff = std::abs(err - value);
                worst = std::max(worst, diff);
                if (diff > 1e-8) {
                    ok = false;
                    out << "(" << beta << "," << n << ") |remez-value|=" << diff << "; ";
                }
            }
        out << "max |remez - value| " << worst;
        return ok;
    });
}

/// 4: threshold integers vs a literal inequality scan, the n_star branch
/// constant, and the classical-range flip points on a 1e-5 grid.
inline CheckResult criterion4() {
    return detail::run_check(4, "threshold-values", [](std::ostringstream& out) {
        out.precision(9);
        bool ok = true;
        // independent scan oracle, transcribed directly from the inequalities
        auto nstar_oracle = [](double h, std::int64_t n) {
            double e = std::exp(-h), e2 = std::exp(-2.0 * h);
            double A = (1.0 + e2) / 2.0;
            double A2n = std::pow(A, 2.0 * static_cast<double>(n));
            double e2nh = std::exp(-2.0 * static_cast<double>(n) * h);
            return (1.0 - e) * (1.0 - e) >= (5.0 + 3.0 * e2) / (1.0 - e2) * A2n / std::sqrt(1.0 - A2n) +
                                               (2.0 + e2nh) * e2nh;
        };
        auto nh_oracle = [](double h, std::int64_t n) {
            double e = std::exp(-h);
            double nn = static_cast<double>(n), rn = std::sqrt(nn);
            double lhs = 37.0 / (5.0 * (1.0 - e)) * std::exp(-h * rn) +
                         e / ((1.0 - e) * (1.0 - e)) *
                             std::min(160.0 / (27.0 * (nn - rn)), 8.0 / (3.0 * nn - 7.0 * rn));
            double rhs = (0.5 + 1.0 / ((1.0 - e) * std::cosh(h))) *
                         std::pow((1.0 - e) / (1.0 + e), 4.0 / (1.0 - e * e));
            return lhs <= rhs;
        };
        std::int64_t ns_scan = 1;
        while (!nstar_oracle(1.0, ns_scan)) ++ns_scan;
        std::int64_t nh_scan = 9;
        while (!nh_oracle(1.0, nh_scan)) ++nh_scan;
        if (thresholds::n_star(1.0) != 3 || ns_scan != 3) {
            ok = false;
            out << "n_star(1)=" << thresholds::n_star(1.0) << " scan=" << ns_scan << " != 3; ";
        }
        if (thresholds::n_h(1.0) != 81 || nh_scan != 81) {
            ok = false;
            out << "n_h(1)=" << thresholds::n_h(1.0) << " scan=" << nh_scan << " != 81; ";
        }
        for (double h : {std::log(10.0 / 3.0), 1.21, 1.3, 2.0, 5.0})
            if (thresholds::n_star(h) != 1) {
                ok = false;
                out << "n_star(" << h << ") != 1; ";
            }
        // flip points of the classical-range flag on a 1e-5 grid
        auto flip = [](double lo, double hi, double beta) {
            for (double h = lo; h <= hi; h += 1e-5)
                if (thresholds::check_classical_range(h, beta)) return h;
            return hi;
        };
        double f_int = flip(1.63, 1.66, 0.0);
        double f_non = flip(1.66, 1.69, 0.5);
        out.precision(9);
        out << "flip(int)=" << f_int << " flip(non-int)=" << f_non;
        if (std::abs(f_int - 1.644651) > 1e-5 + 1e-12) {
            ok = false;
            out << " [integer flip off " << std::abs(f_int - 1.644651) << "]";
        }
        if (std::abs(f_non - 1.67423) > 1e-5 + 1e-12) {
            ok = false;
            out << " [non-integer flip expected at 1.67423 within 1e-5, measured " << f_non
                << ": with rho = 0.193864 the sharp boundary is cosh(h)/cosh(2h) = rho at h = "
                   "1.6739192, so 1.67423 is a valid but non-sharp threshold (the flag there is "
                << (thresholds::check_classical_range(1.67423, 0.5) ? "true" : "false") << ")]";
        }
        return ok;
    });
}

/// 5: lambda_direct vs lambda_closed over 200 random tuples. Tolerance is
/// 1e-10 relative to the eigenvalue, floored at 1e-10 * psi(1): eigenvalues at
/// the scale psi(n)/n sit below the roundoff of the defining 2n-term sum, so a
/// bare relative comparison is not meaningful in binary64 there.
inline CheckResult criterion5(const SeriesConfig& cfg = {}) {
    return detail::run_check(5, "eigenvalue-equivalence", [&](std::ostringstream& out) {
        std::mt19937 rng(20240817u);
        std::uniform_int_distribution<int> nd(1, 8);
        std::uniform_real_distribution<double> hd(0.5, 2.0), bd(0.0, 2.0), ud(0.0, 1.0);
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            std::int64_t n = nd(rng);
            double h = hd(rng), beta = bd(rng);
            double y = ud(rng) * kPi / static_cast<double>(n) * 0.999;
            std::int64_t l = 1 + static_cast<std::int64_t>(ud(rng) * static_cast<double>(n));
            if (l > n) l = n;
            KernelParams p(h, beta);
            spline::NodeGrid g(n, y);
            auto a = spline::lambda_direct(l, g, p, cfg);
            auto b = spline::lambda_closed(l, g, p, cfg);
            double tol = 1e-10 * std::max(std::abs(b), series::psi(1, p));
            double diff = std::abs(a - b);
            worst = std::max(worst, diff / std::max(std::abs(b), series::psi(1, p)));
            if (diff > tol) {
                ok = false;
                out << "(n=" << n << ",h=" << h << ",l=" << l << ") diff=" << diff << "; ";
            }
        }
        out << "worst scaled diff " << worst;
        return ok;
    });
}

/// 6: the three derivative representations agree pairwise (rel 1e-9) at every
/// midpoint for (h, beta, n) in {1} x {0, 0.5, 1} x {6, 81} at y = y0.
inline CheckResult criterion6(const SeriesConfig& cfg = {}) {
    return detail::run_check(6, "representation-equivalence", [&](std::ostringstream& out) {
        bool ok = true;
        double worst = 0.0;
        for (double beta : {0.0, 0.5, 1.0})
            for (std::int64_t n : {6, 81}) {
                KernelParams p(1.0, beta);
                auto th = extremal::solve_theta(n, p);
                spline::NodeGrid g(n, th.theta * kPi / static_cast<double>(n));
                for (std::int64_t k = 1; k <= 2 * n; ++k) {
                    double t = g.midpoint(k);
                    double a = spline::deriv_repr_spectral(t, g, p, cfg);
                    double b = spline::deriv_repr_modulus(t, g, p, cfg);
                    double c = spline::deriv_repr_pq(t, g, p, cfg);
                    double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
                    double rel = std::max({std::abs(a - b), std::abs(b - c), std::abs(a - c)}) / scale;
                    worst = std::max(worst, rel);
                    if (rel > 1e-9) {
                        ok = false;
                        out << "(beta=" << beta << ",n=" << n << ",k=" << k << ") rel=" << rel << "; ";
                    }
                }
            }
        out << "max pairwise rel " << worst;
        return ok;
    });
}

/// 7: the explicit bound on sum |gamma_l| plus all the internal estimates.
inline CheckResult criterion7(const SeriesConfig& cfg = {}) {
    return detail::run_check(7, "gamma-sum-bound", [&](std::ostringstream& out) {
        bool ok = true;
        for (double h : {0.5, 1.0, 2.0}) {
            std::int64_t n = std::max<std::int64_t>(9, thresholds::n_h(h));
            for (double beta : {0.0, 0.5, 1.0}) {
                KernelParams p(h, beta);
                auto th = extremal::solve_theta(n, p);
                spline::NodeGrid g(n, th.theta * kPi / static_cast<double>(n));
                auto bd = spline::gamma_breakdown(g, p, cfg);
                if (!(bd.sum_abs <= bd.gamma_bound)) {
                    ok = false;
                    out << "(h=" << h << ",beta=" << beta << ") sum=" << bd.sum_abs << " > bound="
                        << bd.gamma_bound << "; ";
                }
                if (!bd.remainder_ok || !bd.n_ok) {
                    ok = false;
                    out << "(h=" << h << ") remainder/n flags unexpectedly false; ";
                }
                // internal estimates, in the psi(n-j)/(n-j)-scaled form
                auto table = spline::make_gamma_table(g, p, cfg);
                std::int64_t jroot = table.jroot;
                int complaints = 0;
                auto complain = [&](auto&& write) {
                    if (++complaints <= 5) write();
                    ok = false;
                };
                for (std::int64_t j = 0; j < n; ++j) {
                    double nn = static_cast<double>(n), jj = static_cast<double>(j);
                    double q2nmj = qpow(h, 2.0 * (nn - jj));
                    double lam_hat, R_hat, r_abs;
                    if (j <= table.jmax) {
                        const auto& L = table.lam[static_cast<std::size_t>(j)];
                        lam_hat = L.lam;
                        R_hat = L.R;
                        r_abs = std::abs(L.r);
                        if (j >= 1 && j <= jroot &&
                            !(std::abs(L.delta) <= 4.0 * jj / (3.0 * (nn - jj)) + 1e-15))
                            complain([&] { out << "delta bound fails at j=" << j << " (h=" << h << "); "; });
                        // |z_j| <= 2|r_j| at sampled midpoints
                        for (std::int64_t k = 1; k <= std::min<std::int64_t>(2 * n, 64); ++k) {
                            double x = g.midpoint(k) - g.y;
                            double zj = std::abs(L.r) * std::cos(jj * x + std::arg(L.r)) -
                                        L.R * std::cos(jj * x) * table.eps0;
                            if (!(std::abs(zj) <= 2.0 * r_abs + 1e-15)) {
                                complain([&] { out << "z bound fails at j=" << j << "; "; });
                                break;
                            }
                        }
                    } else {
                        // beyond the underflow horizon r_j is identically 0 in binary64
                        double B = qpow(h, 2.0 * jj) * (nn - jj) / (nn + jj) * (1.0 + q2nmj) /
                                   (1.0 + qpow(h, 2.0 * (nn + jj)));
                        lam_hat = 1.0 + B;
                        R_hat = 0.0;
                        r_abs = 0.0;
                    }
                    if (!(std::abs(R_hat) <= r_abs + 1e-15))
                        complain([&] { out << "R bound fails at j=" << j << " (h=" << h << "); "; });
                    // |lambda_{n-j}| > (9/10) q^{n-j}/(n-j)  <=>  scaled form below
                    if (!(lam_hat * 2.0 / (1.0 + q2nmj) > 0.9))
                        complain([&] { out << "lambda lower bound fails at j=" << j << " (h=" << h << "); "; });
                    // |r_j| <= (38/9) q^{2n}/(1-q^{2n}) scaled, i.e.
                    //   |r^_j| <= (38/9) (n-j)(1+q^{2(n-j)}) q^{n+j} / (2(1-q^{2n}))
                    double q2n = qpow(h, 2.0 * nn);
                    double rb = 38.0 / 9.0 * (nn - jj) * (1.0 + q2nmj) * qpow(h, nn + jj) /
                                (2.0 * (1.0 - q2n));
                    if (!(r_abs <= rb + 1e-15))
                        complain([&] { out << "r bound fails at j=" << j << " (h=" << h << "); "; });
                }
                if (complaints > 5) out << "(" << complaints << " internal-bound failures total) ";
            }
        }
        return ok;
    });
}

/// 8: Kushpel certification across the h x beta grid at n = n_h(h), plus the
/// classical-range point. Fills `certified` for criterion 9.
inline CheckResult criterion8(std::vector<std::array<double, 3>>& certified,
                              const SeriesConfig& cfg = {}) {
    return detail::run_check(8, "kushpel-certification", [&](std::ostringstream& out) {
        bool ok = true;
        for (double h : {0.3, 0.5, 1.0, 2.0}) {
            std::int64_t n = thresholds::n_h(h);
            for (double beta : {0.0, 0.25, 0.5, 1.0, 1.3}) {
                KernelParams p(h, beta);
                auto rep = kushpel::verify_C(n, p, cfg);
                if (!rep.satisfied || !(rep.margin > 0.0)) {
                    ok = false;
                    out << "(h=" << h << ",beta=" << beta << ",n=" << n
                        << ") satisfied=" << rep.satisfied << " margin=" << rep.margin << "; ";
                } else {
                    certified.push_back({h, beta, static_cast<double>(n)});
                }
            }
            out << "n_h(" << h << ")=" << n << " ";
        }
        {
            KernelParams p(2.0, 0.0);
            auto rep = kushpel::verify_C(3, p, cfg);
            if (!rep.satisfied || !(rep.margin > 0.0)) {
                ok = false;
                out << "(h=2,beta=0,n=3) not certified; ";
            } else {
                certified.push_back({2.0, 0.0, 3.0});
            }
        }
        return ok;
    });
}

/// 9: |gamma_n| <= 28/(3 pi) and the two-sided sandwich at every certified point.
inline CheckResult criterion9(const std::vector<std::array<double, 3>>& certified) {
    return detail::run_check(9, "asymptotic-bounds", [&](std::ostringstream& out) {
        bool ok = !certified.empty();
        if (certified.empty()) out << "no certified points from criterion 8; ";
        const double bound = 28.0 / (3.0 * kPi);
        for (const auto& c : certified) {
            KernelParams p(c[0], c[1]);
            auto n = static_cast<std::int64_t>(c[2]);
            double gamma = extremal::asymptotic_decompose(n, p);
            if (!(std::abs(gamma) <= bound)) {
                ok = false;
                out << "(h=" << c[0] << ",beta=" << c[1] << ",n=" << n << ") |gamma|=" << gamma
                    << " > 28/(3pi); ";
            }
            if (!extremal::two_sided_check(n, p)) {
                ok = false;
                out << "(h=" << c[0] << ",beta=" << c[1] << ",n=" << n << ") two-sided fails; ";
            }
        }
        return ok;
    });
}

/// 10: the threshold implication chain over the default (q, n) grid.
inline CheckResult criterion10() {
    return detail::run_check(10, "implication-chain",
                             [](std::ostringstream&) { return kushpel::implication_chain(); });
}

/// 11: the uniform P_q lower bound on a 256-point grid for q in {0.05..0.95}.
/// The strict inequality is resolved through the positive-term Poisson route
/// (full relative precision down to P_q ~ 1e-40); the cosine series is
/// cross-checked against it to the series tolerance at every grid point.
inline CheckResult criterion11(const SeriesConfig& cfg = {}) {
    return detail::run_check(11, "pq-lower-bound", [&](std::ostringstream& out) {
        bool ok = true;
        double tol = std::max(cfg.abs_tol, 1e-13);
        for (int qi = 1; qi <= 19; ++qi) {
            double q = 0.05 * qi;
            double lb = series::P_q_lower_bound(q);
            for (int i = 0; i < 256; ++i) {
                double x = kTwoPi * i / 256.0;
                double exact = series::eval_P_q_poisson(x, q);
                if (!(exact > lb)) {
                    ok = false;
                    out << "P_q(" << x << ";" << q << ") <= bound; ";
                }
                if (!(std::abs(series::eval_P_q(x, q, cfg) - exact) <= tol)) {
                    ok = false;
                    out << "series/poisson mismatch at (" << x << ";" << q << "); ";
                }
            }
        }
        return ok;
    });
}

inline std::vector<CheckResult> run_all(const SeriesConfig& cfg = {}) {
    if (cfg.abs_tol < 1e-16)
        throw truncation_error("selfcheck: requested tolerance is unreachable in binary64");
    std::vector<CheckResult> rs;
    rs.push_back(criterion1());
    rs.push_back(criterion2(cfg));
    rs.push_back(criterion3(cfg));
    rs.push_back(criterion4());
    rs.push_back(criterion5(cfg));
    rs.push_back(criterion6(cfg));
    rs.push_back(criterion7(cfg));
    std::vector<std::array<double, 3>> certified;
    rs.push_back(criterion8(certified, cfg));
    rs.push_back(criterion9(certified));
    rs.push_back(criterion10());
    rs.push_back(criterion11(cfg));
    return rs;
}

}  // namespace skw::selfcheck
