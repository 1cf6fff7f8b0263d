#pragma once

// Independent brute-force ground truth: periodic sup-norm by grid scan plus
// golden-section refinement, best uniform trigonometric approximation by Remez
// exchange, and convolution by adaptive quadrature. These deliberately share
// no code with the series/spline fast paths they cross-check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "skw/common.hpp"

namespace skw::oracle {

class oracle_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSearchResult {
    double argmax = 0.0;
    double max_value = 0.0;
    double refinement_width = 0.0;
};

/// Max of |f| over one period: 4096-point scan, then golden-section
/// refinement of the winning bracket down to width 1e-14.
inline GridSearchResult sup_norm(const std::function<double(double)>& f, double period) {
    if (!(period > 0.0)) throw std::invalid_argument("sup_norm: period must be > 0");
    constexpr int N = 4096;
    auto g = [&](double x) { return std::abs(f(x)); };
    int best = 0;
    double best_v = g(0.0);
    for (int i = 1; i < N; ++i) {
        double v = g(period * static_cast<double>(i) / N);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    double a = period * (static_cast<double>(best) - 1.0) / N;
    double b = period * (static_cast<double>(best) + 1.0) / N;
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    double arg = period * static_cast<double>(best) / N;
    while (b - a > 1e-14) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = g(x2);
        }
        double v = std::max(f1, f2);
        if (v > best_v) {
            best_v = v;
            arg = f1 >= f2 ? x1 : x2;
        }
    }
    GridSearchResult r;
    r.argmax = arg - period * std::floor(arg / period);
    r.max_value = best_v;
    r.refinement_width = b - a;
    return r;
}

namespace detail {

// trig polynomial a0 + sum_j (a_j cos jx + b_j sin jx)
struct TrigPoly {
    int order = 0;
    std::vector<double> c;  // [a0, a1, b1, ..., am, bm]
    double operator()(double x) const {
        double s = c[0];
        for (int j = 1; j <= order; ++j)
            s += c[static_cast<std::size_t>(2 * j - 1)] * std::cos(j * x) +
                 c[static_cast<std::size_t>(2 * j)] * std::sin(j * x);
        return s;
    }
};

// dense Gaussian elimination with partial pivoting
inline std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> rhs) {
    std::size_t m = A.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (A[piv][col] == 0.0) throw oracle_failure("remez: singular reference system");
        std::swap(A[piv], A[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < m; ++r) {
            double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c2 = col; c2 < m; ++c2) A[r][c2] -= f * A[col][c2];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(m);
    for (std::size_t i = m; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c2 = i + 1; c2 < m; ++c2) s -= A[i][c2] * x[c2];
        x[i] = s / A[i][i];
    }
    return x;
}

// circular local extrema of sampled values, refined by golden section on +-r
inline std::vector<std::pair<double, double>> refined_extrema(
    const std::function<double(double)>& r, const std::vector<double>& vals) {
    std::size_t N = vals.size();
    const double step = kTwoPi / static_cast<double>(N);
    std::vector<std::pair<double, double>> out;  // (x, r(x))
    const double gr = 0.6180339887498949;
    for (std::size_t i = 0; i < N; ++i) {
        double prev = vals[(i + N - 1) % N], next = vals[(i + 1) % N];
        bool ismax = vals[i] >= prev && vals[i] >= next;
        bool ismin = vals[i] <= prev && vals[i] <= next;
        if (!(ismax || ismin) || (ismax && ismin)) continue;
        double sign = ismax ? 1.0 : -1.0;
        double a = (static_cast<double>(i) - 1.0) * step, b = (static_cast<double>(i) + 1.0) * step;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = sign * r(x1), f2 = sign * r(x2);
        while (b - a > 1e-12) {
            if (f1 >= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = sign * r(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = sign * r(x2);
            }
        }
        double x = 0.5 * (a + b);
        out.emplace_back(x - kTwoPi * std::floor(x / kTwoPi), r(x));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// keep a strictly sign-alternating subsequence, then trim adjacent pairs with
// the smallest amplitude until exactly `target` points remain
inline std::vector<std::pair<double, double>> alternating_reference(
    std::vector<std::pair<double, double>> ext, std::size_t target) {
    if (ext.empty()) return ext;
    std::vector<std::pair<double, double>> alt;
    for (const auto& e : ext) {
        if (e.second == 0.0) continue;
        if (!alt.empty() && sgn(alt.back().second) == sgn(e.second)) {
            if (std::abs(e.second) > std::abs(alt.back().second)) alt.back() = e;
        } else {
            alt.push_back(e);
        }
    }
    // circular: first and last must alternate too
    while (alt.size() > 1 && sgn(alt.front().second) == sgn(alt.back().second)) {
        if (std::abs(alt.front().second) >= std::abs(alt.back().second))
            alt.pop_back();
        else
            alt.erase(alt.begin());
    }
    while (alt.size() > target) {
        // drop the adjacent (circular) pair with smallest peak amplitude
        std::size_t m = alt.size(), bi = 0;
        double bv = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            double v = std::max(std::abs(alt[i].second), std::abs(alt[(i + 1) % m].second));
            if (v < bv) {
                bv = v;
                bi = i;
            }
        }
        if (bi + 1 < m) {
            alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(bi),
                      alt.begin() + static_cast<std::ptrdiff_t>(bi) + 2);
        } else {
            alt.pop_back();
            alt.erase(alt.begin());
        }
    }
    return alt;
}

}  // namespace detail

/// Best uniform approximation error of a continuous 2pi-periodic f by
/// trigonometric polynomials of order <= `order`, by multi-point exchange on
/// 2*order + 2 alternation points.
inline double remez_trig(const std::function<double(double)>& f, int order) {
    if (order < 0) throw std::invalid_argument("remez_trig: order must be >= 0");
    const std::size_t target = 2 * static_cast<std::size_t>(order) + 2;
    constexpr std::size_t N = 8192;

    std::vector<double> fs(N);
    for (std::size_t i = 0; i < N; ++i) fs[i] = f(kTwoPi * static_cast<double>(i) / N);
    double fmax = 0.0;
    for (double v : fs) fmax = std::max(fmax, std::abs(v));
    if (fmax < 1e-13) return 0.0;

    auto ref = detail::alternating_reference(detail::refined_extrema(f, fs), target);
    if (ref.size() < target) {
        ref.clear();
        for (std::size_t i = 0; i < target; ++i) {
            double x = kTwoPi * static_cast<double>(i) / static_cast<double>(target);
            ref.emplace_back(x, f(x));
        }
    }

    detail::TrigPoly T;
    T.order = order;
    for (int it = 0; it < 100; ++it) {
        // solve T(x_i) + (-1)^i E = f(x_i): 2*order+1 coefficients plus E
        std::size_t m = target;
        std::vector<std::vector<double>> A(m, std::vector<double>(m, 0.0));
        std::vector<double> rhs(m);
        for (std::size_t i = 0; i < m; ++i) {
            double x = ref[i].first;
            A[i][0] = 1.0;
            for (int j = 1; j <= order; ++j) {
                A[i][static_cast<std::size_t>(2 * j - 1)] = std::cos(j * x);
                A[i][static_cast<std::size_t>(2 * j)] = std::sin(j * x);
            }
            A[i][m - 1] = (i % 2 == 0) ? 1.0 : -1.0;
            rhs[i] = f(x);
        }
        std::vector<double> sol = detail::solve_dense(std::move(A), std::move(rhs));
        T.c.assign(sol.begin(), sol.end() - 1);
        double E = sol.back();

        auto r = [&](double x) { return f(x) - T(x); };
        std::vector<double> rv(N);
        for (std::size_t i = 0; i < N; ++i) rv[i] = r(kTwoPi * static_cast<double>(i) / N);
        auto ext = detail::refined_extrema(r, rv);
        double maxr = 0.0;
        for (const auto& e : ext) maxr = std::max(maxr, std::abs(e.second));
        if (maxr - std::abs(E) <= 1e-10 * std::max(1.0, maxr)) return maxr;

        auto next = detail::alternating_reference(std::move(ext), target);
        if (next.size() < target)
            throw oracle_failure("remez_trig: reference collapsed during exchange");
        ref = std::move(next);
    }
    throw oracle_failure("remez_trig: no convergence after 100 exchanges");
}

/// A piecewise-constant 2pi-periodic function given by breakpoints on [-pi, pi].
struct PiecewiseConstant {
    std::vector<double> breaks;  ///< ascending, breaks.front() = -pi, breaks.back() = pi
    std::vector<double> values;  ///< values[i] on (breaks[i], breaks[i+1])

    double operator()(double t) const {
        double u = std::remainder(t, kTwoPi);  // in [-pi, pi]
        auto it = std::upper_bound(breaks.begin(), breaks.end(), u);
        std::size_t idx = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
        if (idx >= values.size()) idx = values.size() - 1;
        return values[idx];
    }
};

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    if (depth > 48) throw oracle_failure("quadrature_convolution: tolerance unreachable");
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = g(lm), frm = g(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(g, a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
           adaptive_simpson(g, m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
}

inline double integrate(const std::function<double(double)>& g, double a, double b, double tol) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = g(a), fm = g(m), fb = g(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(g, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace detail

/// (1/pi) \int_{-pi}^{pi} kernel(x - t) phi(t) dt, piece by piece, splitting
/// each piece at the point where x - t crosses 0 (the kernel's concentration).
inline double quadrature_convolution(const std::function<double(double)>& kernel,
                                     const PiecewiseConstant& phi, double x) {
    if (phi.breaks.size() < 2 || phi.values.size() + 1 != phi.breaks.size())
        throw std::invalid_argument("quadrature_convolution: malformed piecewise function");
    double total = 0.0;
    double xr = std::remainder(x, kTwoPi);
    std::size_t pieces = phi.values.size();
    for (std::size_t i = 0; i < pieces; ++i) {
        double a = phi.breaks[i], b = phi.breaks[i + 1];
        double c = phi.values[i];
        if (c == 0.0 || a == b) continue;
        double tol = 1e-10 / (static_cast<double>(pieces) * std::max(1.0, std::abs(c)));
        auto g = [&](double t) { return kernel(xr - t); };
        double piece;
        if (xr > a && xr < b)
            piece = detail::integrate(g, a, xr, tol / 2.0) + detail::integrate(g, xr, b, tol / 2.0);
        else
            piece = detail::integrate(g, a, b, tol);
        total += c * piece;
    }
    return total / kPi;
}

}  // namespace skw::oracle
