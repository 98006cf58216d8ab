#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace anderson {

inline constexpr double kPi = 3.14159265358979323846;

// Sample mean / standard error over a batch of independent values.
struct SampleStats {
    double mean = 0.0;
    double stddev = 0.0;
    double stderr_mean = 0.0;
    std::size_t count = 0;
};

inline SampleStats sample_stats(std::span<const double> xs) {
    SampleStats s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double acc = 0.0;
    for (double x : xs) acc += x;
    s.mean = acc / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) {
            const double d = x - s.mean;
            ss += d * d;
        }
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
        s.stderr_mean = s.stddev / std::sqrt(static_cast<double>(xs.size()));
    }
    return s;
}

// Least-squares line y = intercept + slope*x with the usual r^2 and the
// standard error of the slope estimate.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    std::size_t points = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("fit_line: need at least 2 points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit f;
    f.points = x.size();
    if (sxx <= 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r_squared = syy > 0 ? std::max(0.0, 1.0 - ss_res / syy) : 0.0;
    if (x.size() > 2) f.slope_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
    return f;
}

inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    q = std::clamp(q, 0.0, 1.0);
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

// Worker count for embarrassingly parallel loops: ANDERSON1D_WORKERS if set,
// else the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("ANDERSON1D_WORKERS")) {
        const long v = std::atol(env);
        if (v >= 1 && v <= 4096) return static_cast<unsigned>(v);
    }
    const unsigned u = std::thread::hardware_concurrency();
    return u > 0 ? u : 1;
}

// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
// the outcome is independent of scheduling; reductions happen afterwards in
// index order.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error = nullptr;
    std::atomic_flag error_claimed = ATOMIC_FLAG_INIT;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                if (!error_claimed.test_and_set()) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// FNV-1a, used for config provenance hashes in emitted files.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace anderson
