#pragma once

// Numerical certification of the sign condition C_{y0,2n}: the derivative
// representative of the fundamental SK-spline must carry the alternating
// pattern (-1)^k eps e_k at the interval midpoints. A certified report backs
// the width lower bound d_{2n} >= ||H * phi_n||_C.

#include <cstdint>
#include <vector>

#include "skw/sk_spline.hpp"

namespace skw::kushpel {

struct SignPatternReport {
    std::int64_t n = 0;
    double h = 0.0, beta = 0.0;
    double y0 = 0.0;
    extremal::ThetaSolution theta;
    std::vector<std::int8_t> signs;     ///< k = 0..2n-1; empty when summarized
    std::vector<std::uint8_t> e_flags;  ///< e_k = 1 iff the midpoint sign is nonzero
    int epsilon = 0;                    ///< the common eps of the pattern; 0 if undefined
    bool satisfied = false;             ///< direct sign-pattern check
    double margin = 0.0;      ///< min_k of eps * bracket(k); > 0 when satisfied
    bool sufficient_ok = false;  ///< diagnostic: P_q lower bound dominates the gamma bound
    double lower_bound = 0.0;    ///< ||H * phi_n||_C, the certified width lower bound
    bool certified = false;   ///< satisfied and inside a validity range (n_h or classical)
    bool summarized = false;  ///< pattern certified through the global minimum, signs not stored
};

namespace detail {

/// Global minimum of the bracket polynomial over one period: dense scan at a
/// resolution tied to the polynomial degree, then golden-section refinement of
/// the lowest pockets. Used when 2n midpoints are too many to enumerate.
inline double global_bracket_min(const spline::GammaTable& t) {
    std::int64_t deg = std::max(t.jmax, std::min(t.jroot, t.jq));
    std::size_t N = static_cast<std::size_t>(std::max<std::int64_t>(8192, 16 * deg));
    std::vector<double> v(N);
    parallel_for(N, [&](std::size_t i) {
        v[i] = t.eps0 * t.bracket_fast(kTwoPi * static_cast<double>(i) / static_cast<double>(N));
    });
    // refine the lowest few local minima
    std::vector<std::size_t> mins;
    for (std::size_t i = 0; i < N; ++i) {
        double prev = v[(i + N - 1) % N], next = v[(i + 1) % N];
        if (v[i] <= prev && v[i] <= next) mins.push_back(i);
    }
    std::sort(mins.begin(), mins.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    if (mins.size() > 16) mins.resize(16);
    double best = v[mins.empty() ? 0 : mins[0]];
    const double gr = 0.6180339887498949;
    for (std::size_t idx : mins) {
        double a = kTwoPi * (static_cast<double>(idx) - 1.0) / static_cast<double>(N);
        double b = kTwoPi * (static_cast<double>(idx) + 1.0) / static_cast<double>(N);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = t.eps0 * t.bracket_fast(x1), f2 = t.eps0 * t.bracket_fast(x2);
        while (b - a > 1e-12) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = t.eps0 * t.bracket_fast(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = t.eps0 * t.bracket_fast(x2);
            }
        }
        best = std::min({best, f1, f2});
    }
    return best;
}

}  // namespace detail

/// Midpoint signs are declared zero below this fraction of the derivative
/// scale pi/(4 n psi(n)); a zero fails certification.
inline constexpr double kSignZeroTol = 1e-12;

inline SignPatternReport verify_C(std::int64_t n, const KernelParams& p,
                                  const SeriesConfig& cfg = {}) {
    if (n < 1) throw std::invalid_argument("verify_C: n must be >= 1");
    SignPatternReport rep;
    rep.n = n;
    rep.h = p.h;
    rep.beta = p.beta;
    rep.theta = extremal::solve_theta(n, p);
    rep.y0 = rep.theta.theta * kPi / static_cast<double>(n);

    spline::NodeGrid grid(n, rep.y0);
    spline::GammaTable table = spline::make_gamma_table(grid, p, cfg);

    if (2 * n <= spline::kMidpointCap) {
        std::int64_t K = 2 * n;
        std::vector<double> br(static_cast<std::size_t>(K));
        parallel_for(static_cast<std::size_t>(K), [&](std::size_t ki) {
            double x = grid.midpoint(static_cast<std::int64_t>(ki) + 1) - rep.y0;
            br[ki] = table.bracket_fast(x);
        });
        rep.signs.resize(static_cast<std::size_t>(K));
        rep.e_flags.resize(static_cast<std::size_t>(K));
        bool all_nonzero = true, same_sign = true;
        double first = 0.0;
        for (std::size_t ki = 0; ki < br.size(); ++ki) {
            double s = std::abs(br[ki]) <= kSignZeroTol ? 0.0 : sgn(br[ki]);
            rep.e_flags[ki] = s != 0.0;
            if (s == 0.0)
                all_nonzero = false;
            else if (first == 0.0)
                first = s;
            else if (s != first)
                same_sign = false;
            // definition indexing: interval k corresponds to (-1)^{ki} * bracket
            double sign_k = (ki % 2 == 0) ? s : -s;
            rep.signs[ki] = static_cast<std::int8_t>(sign_k);
        }
        rep.satisfied = all_nonzero && same_sign;
        rep.epsilon = rep.satisfied ? static_cast<int>(first) : 0;
        double ref = rep.satisfied ? first : table.eps0;
        double m = br[0] * ref;
        for (double b : br) m = std::min(m, b * ref);
        rep.margin = m;
    } else {
        rep.summarized = true;
        double m = detail::global_bracket_min(table);
        rep.margin = m;
        rep.satisfied = m > kSignZeroTol;
        rep.epsilon = rep.satisfied ? static_cast<int>(table.eps0) : 0;
    }

    rep.sufficient_ok = n >= 9 && thresholds::check_remainder_condition(n, p.q) &&
                        spline::gamma_bound(n, p.q) <= series::P_q_lower_bound(p.q);
    rep.lower_bound = extremal::best_approx_value(n, p).value;
    rep.certified = rep.satisfied &&
                    (thresholds::check_width_condition(p.h, n) || thresholds::check_classical_range(p.h, p.beta));
    return rep;
}

/// The threshold inequality chain: wherever the gamma-bound inequality holds
/// at (q, n), the two intermediate n-bounds and the best-approximation inequality
/// must follow. Returns true iff no grid point breaks the chain.
inline bool implication_chain(const std::vector<double>& q_grid,
                              const std::vector<std::int64_t>& n_grid) {
    if (q_grid.empty() || n_grid.empty())
        throw std::invalid_argument("implication_chain: grids must be nonempty");
    for (double q : q_grid) {
        double rhs0 = series::P_q_lower_bound(q);
        double ner2 = 8.0 * q * (1.0 + q) / (3.0 * std::pow(1.0 - q, 5.0));
        double ner1 = 5.0 / (1.0 - q * q) * std::log(2.0 / (1.0 - q));
        for (std::int64_t n : n_grid) {
            if (!(spline::gamma_bound(n, q) <= rhs0)) continue;  // antecedent fails: vacuous
            double nn = static_cast<double>(n);
            if (!(nn > ner2)) return false;
            if (!(nn > ner1)) return false;
            double lnA = std::log1p(q * q) - std::log(2.0);
            double B = std::exp(2.0 * nn * lnA);
            double qn2 = std::exp(2.0 * nn * std::log(q));
            double rhs = (5.0 + 3.0 * q * q) / (1.0 - q * q) * B / std::sqrt(1.0 - B) +
                         (2.0 + qn2) * qn2;
            if (!((1.0 - q) * (1.0 - q) >= rhs)) return false;
        }
    }
    return true;
}

/// Default grids: q in {0.31, 0.32, ..., 0.99}, n in {9..200}.
inline bool implication_chain() {
    std::vector<double> qs;
    for (int i = 31; i <= 99; ++i) qs.push_back(static_cast<double>(i) / 100.0);
    std::vector<std::int64_t> ns;
    for (std::int64_t n = 9; n <= 200; ++n) ns.push_back(n);
    return implication_chain(qs, ns);
}

}  // namespace skw::kushpel
