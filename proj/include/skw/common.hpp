#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace skw {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Series truncation could not reach the requested tail bound within max_terms.
class truncation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root finder could not bracket a sign change; carries the scan summary.
class bracket_error : public std::runtime_error {
public:
    bracket_error(const std::string& msg, double lo, double hi)
        : std::runtime_error(msg), lo(lo), hi(hi) {}
    double lo, hi;
};

/// An eigenvalue fell below the conditioning threshold; `index` names it.
class conditioning_error : public std::runtime_error {
public:
    conditioning_error(const std::string& msg, std::int64_t index)
        : std::runtime_error(msg), index(index) {}
    std::int64_t index;
};

/// A threshold scan exceeded its cap without the inequality turning true.
class scan_limit_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Thread budget: WIDTHS_THREADS if set (>=1), else hardware concurrency.
inline unsigned max_threads() {
    if (const char* env = std::getenv("WIDTHS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

/// Chunked parallel loop over [0, count). f(i) must be safe to run
/// concurrently for distinct i. Exceptions from workers are rethrown.
template <typename F>
void parallel_for(std::size_t count, F&& f) {
    unsigned nt = max_threads();
    if (nt <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    if (nt > count) nt = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    std::size_t chunk = (count + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = lo + chunk < count ? lo + chunk : count;
        pool.emplace_back([&, t, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace skw
