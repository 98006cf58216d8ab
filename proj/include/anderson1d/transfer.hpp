#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "anderson1d/model.hpp"
#include "anderson1d/sl2.hpp"
#include "anderson1d/util.hpp"

namespace anderson {

// Cocycle product M(n) = A_n ... A_1 kept as a normalized matrix plus the
// accumulated log of the renormalization constants, so norms up to
// exp(~1e308) steps of growth stay representable.
struct ScaledProduct {
    Sl2 matrix;              // normalized so the largest entry magnitude is 1
    double log_scale = 0.0;  // true product = exp(log_scale) * matrix
    long steps = 0;
    int renorm_every = 16;

    void push(const Sl2& step) {
        matrix = step * matrix;
        ++steps;
        if (steps % renorm_every == 0) renormalize();
    }

    void renormalize() {
        const double c = matrix.max_abs();
        if (!(c > 0.0)) throw std::runtime_error("ScaledProduct: zero matrix");
        matrix = {matrix.a / c, matrix.b / c, matrix.c / c, matrix.d / c};
        log_scale += std::log(c);
    }

    double log_norm() const { return log_scale + std::log(matrix.norm2()); }

    // log det of the represented matrix; meaningful while exp(2*log_scale)
    // stays below ~1/eps^2 of the det() evaluation (see cocycle_log_det for
    // the regime-independent route).
    double log_det() const {
        const double dt = matrix.det();
        if (!(std::abs(dt) > 0.0)) return -std::numeric_limits<double>::infinity();
        return 2.0 * log_scale + std::log(std::abs(dt));
    }
};

inline ScaledProduct cocycle_product(double energy, const PotentialPath& path, std::int64_t n,
                                     int renorm_every = 16) {
    if (n < 1) throw std::invalid_argument("cocycle_product: n >= 1 required");
    if (!path.covers(1, n)) throw std::invalid_argument("cocycle_product: window too short");
    ScaledProduct p;
    p.renorm_every = renorm_every;
    for (std::int64_t k = 1; k <= n; ++k) p.push(step_matrix(energy, path.at(k)));
    p.renormalize();
    return p;
}

// Companion QR accumulator: tracks log|det M(n)| as a sum of per-step Givens
// factors, each computed from a well-conditioned 2x2, so determinant
// preservation is checkable even when the product itself is hyperbolic far
// beyond double-precision condition limits.
struct QrCocycle {
    Sl2 q;  // orthogonal
    double log_r11 = 0.0;
    double log_r22 = 0.0;
    double log_top = 0.0;  // log of the running r11 chain, a norm proxy

    void push(const Sl2& a) {
        const Sl2 b = a * q;
        const double r11 = std::hypot(b.a, b.c);
        if (!(r11 > 0.0)) throw std::runtime_error("QrCocycle: breakdown");
        const double c = b.a / r11, s = b.c / r11;
        const double r22 = -s * b.b + c * b.d;
        q = {c, -s, s, c};
        log_r11 += std::log(r11);
        log_r22 += std::log(std::abs(r22));
        log_top = log_r11;
    }

    double log_abs_det() const { return log_r11 + log_r22; }
};

inline double cocycle_log_det(double energy, const PotentialPath& path, std::int64_t n) {
    if (!path.covers(1, n)) throw std::invalid_argument("cocycle_log_det: window too short");
    QrCocycle qr;
    for (std::int64_t k = 1; k <= n; ++k) qr.push(step_matrix(energy, path.at(k)));
    return qr.log_abs_det();
}

struct LyapunovEstimate {
    double energy = 0.0;
    double gamma = 0.0;
    double stderr_gamma = 0.0;
    std::int64_t steps = 0;
    int realizations = 0;
};

inline LyapunovEstimate lyapunov_estimate(const SiteDistribution& dist, double energy,
                                          std::int64_t n, int realizations, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("lyapunov_estimate: n >= 1");
    if (realizations < 1) throw std::invalid_argument("lyapunov_estimate: realizations >= 1");
    std::vector<double> per_real(static_cast<std::size_t>(realizations));
    parallel_for(per_real.size(), [&](std::size_t r) {
        ScaledProduct p;
        for (std::int64_t k = 1; k <= n; ++k)
            p.push(step_matrix(energy, dist.sample(seed, static_cast<std::uint64_t>(r), k)));
        p.renormalize();
        per_real[r] = p.log_norm() / static_cast<double>(n);
    });
    const SampleStats st = sample_stats(per_real);
    return {energy, st.mean, st.stderr_mean, n, realizations};
}

struct OseledecDirection {
    double theta = 0.0;  // in [0, pi)
    bool converged = false;
    double log_norm = 0.0;
};

// Most-contracted right-singular direction of the n-step product. Below the
// hyperbolicity threshold the angle is noise-dominated and flagged.
inline OseledecDirection oseledec_direction(double energy, const PotentialPath& path,
                                            std::int64_t n, double norm_threshold = 10.0) {
    const ScaledProduct p = cocycle_product(energy, path, n);
    OseledecDirection out;
    out.log_norm = p.log_norm();
    out.theta = svd2(p.matrix).theta_min;
    out.converged = out.log_norm > std::log(norm_threshold);
    return out;
}

struct GrowthPoint {
    std::int64_t m = 0;
    double log_norm = 0.0;
};

struct SolutionGrowth {
    std::vector<GrowthPoint> points;
    double slope_last_half = 0.0;  // least squares over the last half of the range
};

inline double fit_last_half_slope(const std::vector<GrowthPoint>& pts) {
    const std::size_t start = pts.size() / 2;
    std::vector<double> xs, ys;
    for (std::size_t i = start; i < pts.size(); ++i) {
        xs.push_back(static_cast<double>(pts[i].m));
        ys.push_back(pts[i].log_norm);
    }
    return fit_line(xs, ys).slope;
}

// log ||M(m) v|| along the orbit, by renormalized forward vector iteration.
// Forward iteration cannot follow the contracting direction past
// m ~ log(1/eps)/(2 gamma); use decaying_profile for that branch.
inline SolutionGrowth solution_growth(double energy, const PotentialPath& path,
                                      std::array<double, 2> initial, std::int64_t n) {
    const double norm0 = std::hypot(initial[0], initial[1]);
    if (!(norm0 > 0.0)) throw std::invalid_argument("solution_growth: zero initial vector");
    if (!path.covers(1, n)) throw std::invalid_argument("solution_growth: window too short");
    double wx = initial[0] / norm0, wy = initial[1] / norm0;
    double log_acc = 0.0;
    SolutionGrowth out;
    out.points.reserve(static_cast<std::size_t>(n));
    for (std::int64_t m = 1; m <= n; ++m) {
        const auto w = step_matrix(energy, path.at(m)).apply(wx, wy);
        wx = w[0];
        wy = w[1];
        const double nm = std::hypot(wx, wy);
        if (!(nm > 0.0)) throw std::runtime_error("solution_growth: vector vanished");
        wx /= nm;
        wy /= nm;
        log_acc += std::log(nm);
        out.points.push_back({m, log_acc});
    }
    out.slope_last_half = fit_last_half_slope(out.points);
    return out;
}

struct DecayingProfile {
    double theta = 0.0;  // direction of (u(1), u(0)) in [0, pi)
    std::vector<GrowthPoint> points;
    double slope_last_half = 0.0;
};

// The forward-decaying solution, via backward recursion from a seed planted
// `pad` sites beyond n. Backward iteration amplifies exactly the branch that
// decays forward, so the profile is stable on all of [1, n]; the relative
// contamination from the seed is exp(-2 gamma pad) there.
inline DecayingProfile decaying_profile(double energy, const PotentialPath& path, std::int64_t n,
                                        std::int64_t pad) {
    const std::int64_t horizon = n + pad;
    if (!path.covers(1, horizon)) throw std::invalid_argument("decaying_profile: window too short");
    // u(k-1) = (E - V(k)) u(k) - u(k+1), from (u(horizon+1), u(horizon)) = (0, 1).
    double u_hi = 0.0;  // component u(k+1) of the normalized pair
    double u_lo = 1.0;  // component u(k)
    double log_acc = 0.0;  // log || (u(k+1), u(k)) || relative to the seed
    std::vector<double> log_pair(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (std::int64_t k = horizon; k >= 1; --k) {
        const double u_prev = (energy - path.at(k)) * u_lo - u_hi;
        u_hi = u_lo;
        u_lo = u_prev;
        const double nm = std::hypot(u_lo, u_hi);
        if (!(nm > 0.0)) throw std::runtime_error("decaying_profile: solution vanished");
        u_lo /= nm;
        u_hi /= nm;
        log_acc += std::log(nm);
        log_pair[static_cast<std::size_t>(k) - 1] = log_acc;
    }
    DecayingProfile out;
    const double base = log_pair[0];
    const double pi = std::acos(-1.0);
    // (u_hi, u_lo) now holds the normalized (u(1), u(0)).
    double th = std::atan2(u_lo, u_hi);
    th = std::fmod(th, pi);
    if (th < 0) th += pi;
    out.theta = th;
    out.points.reserve(static_cast<std::size_t>(n));
    for (std::int64_t m = 1; m <= n; ++m)
        out.points.push_back({m, log_pair[static_cast<std::size_t>(m)] - base});
    out.slope_last_half = fit_last_half_slope(out.points);
    return out;
}

}  // namespace anderson
