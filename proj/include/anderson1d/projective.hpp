#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anderson1d/distribution.hpp"
#include "anderson1d/rng.hpp"
#include "anderson1d/sl2.hpp"
#include "anderson1d/util.hpp"

namespace anderson {

// Angle of M * (cos theta, sin theta), reduced mod pi.
inline double project_action(const Sl2& m, double theta) {
    const auto w = m.apply(std::cos(theta), std::sin(theta));
    double t = std::atan2(w[1], w[0]);
    t = std::fmod(t, kPi);
    if (t < 0) t += kPi;
    return t;
}

// Probability measure on P^1, discretized as weights on the angle-bin centers
// theta_j = (j + 1/2) pi / G.
struct ProjectiveMeasure {
    int grid_size = 0;
    std::vector<double> weights;

    static ProjectiveMeasure uniform(int G) {
        ProjectiveMeasure m;
        m.grid_size = G;
        m.weights.assign(static_cast<std::size_t>(G), 1.0 / G);
        return m;
    }

    double bin_center(int j) const { return (j + 0.5) * kPi / grid_size; }

    double max_bin_weight() const {
        double w = 0.0;
        for (double x : weights) w = std::max(w, x);
        return w;
    }

    void normalize() {
        double s = 0.0;
        for (double w : weights) s += w;
        if (!(s > 0)) throw std::runtime_error("ProjectiveMeasure: zero mass");
        for (double& w : weights) w /= s;
    }
};

inline double total_variation(const ProjectiveMeasure& a, const ProjectiveMeasure& b) {
    if (a.grid_size != b.grid_size) throw std::invalid_argument("total_variation: grid mismatch");
    double s = 0.0;
    for (int j = 0; j < a.grid_size; ++j) s += std::abs(a.weights[j] - b.weights[j]);
    return 0.5 * s;
}

struct WeightedMatrix {
    Sl2 matrix;
    double weight = 0.0;
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& wts) {
    nodes.resize(static_cast<std::size_t>(n));
    wts.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        wts[i] = w;
        wts[n - 1 - i] = w;
    }
}

}  // namespace detail

// A finitely supported measure on SL(2,R): explicit atoms, or the Anderson
// family induced by (nu, E), with densities expanded by Gauss-Legendre
// quadrature into a finite list.
struct MatrixDistribution {
    std::vector<WeightedMatrix> support;

    static MatrixDistribution from_matrices(std::vector<WeightedMatrix> ms) {
        MatrixDistribution md;
        double total = 0.0;
        for (const auto& wm : ms) {
            if (wm.weight < 0) throw std::invalid_argument("MatrixDistribution: negative weight");
            total += wm.weight;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("MatrixDistribution: weights must sum to 1");
        md.support = std::move(ms);
        return md;
    }

    static MatrixDistribution anderson(const SiteDistribution& dist, double energy,
                                       int quad_points = 64) {
        std::vector<WeightedMatrix> ms;
        if (dist.is_atomic()) {
            for (const auto& [v, w] : dist.atom_list())
                if (w > 0) ms.push_back({step_matrix(energy, v), w});
        } else {
            std::vector<double> nodes, wts;
            detail::gauss_legendre(quad_points, nodes, wts);
            const auto& breaks = dist.breaks();
            const auto& vals = dist.piece_values();
            double total = 0.0;
            for (std::size_t p = 0; p < vals.size(); ++p) {
                if (vals[p] <= 0) continue;
                const double a = breaks[p], b = breaks[p + 1];
                for (int q = 0; q < quad_points; ++q) {
                    const double x = 0.5 * (a + b) + 0.5 * (b - a) * nodes[q];
                    const double w = 0.5 * (b - a) * wts[q] * vals[p];
                    ms.push_back({step_matrix(energy, x), w});
                    total += w;
                }
            }
            for (auto& wm : ms) wm.weight /= total;
        }
        MatrixDistribution md;
        md.support = std::move(ms);
        return md;
    }
};

// One application of m -> nu * m: push each bin center through each support
// matrix and deposit the mass onto the two nearest bin centers (circular).
inline ProjectiveMeasure convolve(const MatrixDistribution& md, const ProjectiveMeasure& m) {
    const int G = m.grid_size;
    ProjectiveMeasure out;
    out.grid_size = G;
    out.weights.assign(static_cast<std::size_t>(G), 0.0);
    const double h = kPi / G;
    for (const auto& wm : md.support) {
        if (wm.weight <= 0) continue;
        for (int j = 0; j < G; ++j) {
            const double mass = wm.weight * m.weights[j];
            if (mass <= 0) continue;
            const double t = project_action(wm.matrix, m.bin_center(j));
            double pos = t / h - 0.5;
            if (pos < 0) pos += G;
            const int lo = static_cast<int>(pos) % G;
            const int hi = (lo + 1) % G;
            const double frac = pos - std::floor(pos);
            out.weights[lo] += mass * (1.0 - frac);
            out.weights[hi] += mass * frac;
        }
    }
    return out;
}

struct InvariantMeasureResult {
    ProjectiveMeasure measure;
    double residual = 0.0;  // TV(nu * m, m) at the returned iterate
    int iterations = 0;
    bool converged = false;
};

// Fixed-point iteration for nu * m = m from the uniform start. In reducible
// cases (several invariant measures) this returns the iterate reached from
// uniform without any uniqueness claim.
inline InvariantMeasureResult invariant_measure(const MatrixDistribution& md, int G, double tol,
                                                int max_iter) {
    if (G < 64) throw std::invalid_argument("invariant_measure: G >= 64 required");
    InvariantMeasureResult res;
    ProjectiveMeasure m = ProjectiveMeasure::uniform(G);
    for (int it = 1; it <= max_iter; ++it) {
        ProjectiveMeasure next = convolve(md, m);
        const double change = total_variation(next, m);
        res.iterations = it;
        if (change < tol) {
            res.measure = std::move(m);  // its forward residual is `change`
            res.residual = change;
            res.converged = true;
            return res;
        }
        m = std::move(next);
    }
    ProjectiveMeasure next = convolve(md, m);
    res.residual = total_variation(next, m);
    res.measure = std::move(m);
    res.converged = false;
    return res;
}

// gamma = sum_M sum_j weight(M) m_j log ||M u(theta_j)||.
inline double furstenberg_gamma(const MatrixDistribution& md, const ProjectiveMeasure& m) {
    double acc = 0.0;
    for (const auto& wm : md.support) {
        if (wm.weight <= 0) continue;
        double inner = 0.0;
        for (int j = 0; j < m.grid_size; ++j) {
            if (m.weights[j] <= 0) continue;
            const double t = m.bin_center(j);
            const auto w = wm.matrix.apply(std::cos(t), std::sin(t));
            inner += m.weights[j] * 0.5 * std::log(w[0] * w[0] + w[1] * w[1]);
        }
        acc += wm.weight * inner;
    }
    return acc;
}

// Circular variance on P^1 (angles doubled to handle the antipodal
// identification): 1 - |sum_j w_j exp(2 i theta_j)|.
inline double circular_variance(const ProjectiveMeasure& m) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < m.grid_size; ++j) {
        re += m.weights[j] * std::cos(2.0 * m.bin_center(j));
        im += m.weights[j] * std::sin(2.0 * m.bin_center(j));
    }
    return 1.0 - std::hypot(re, im);
}

// Mean over trials of the circular variance of M_n(omega) m; values near 0
// witness Dirac concentration of the pushforward.
inline double concentration_diagnostic(const MatrixDistribution& md, const ProjectiveMeasure& m,
                                       int n, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("concentration_diagnostic: trials >= 1");
    std::vector<double> cum(md.support.size());
    double c = 0.0;
    for (std::size_t i = 0; i < md.support.size(); ++i) {
        c += md.support[i].weight;
        cum[i] = c;
    }
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
        Sl2 prod = Sl2::identity();
        for (int k = 1; k <= n; ++k) {
            const double u = counter_uniform(seed, static_cast<std::uint64_t>(t), k, 7);
            std::size_t idx = 0;
            while (idx + 1 < cum.size() && u >= cum[idx]) ++idx;
            prod = md.support[idx].matrix * prod;
            const double ma = prod.max_abs();
            if (ma > 1e100) prod = {prod.a / ma, prod.b / ma, prod.c / ma, prod.d / ma};
        }
        // Variance of the exact pushed point cloud; no re-binning, so rigid
        // rotations leave the diagnostic identical to that of m.
        double re = 0.0, im = 0.0;
        for (int j = 0; j < m.grid_size; ++j) {
            if (m.weights[j] <= 0) continue;
            const double th = project_action(prod, m.bin_center(j));
            re += m.weights[j] * std::cos(2.0 * th);
            im += m.weights[j] * std::sin(2.0 * th);
        }
        acc += 1.0 - std::hypot(re, im);
    }
    return acc / trials;
}

}  // namespace anderson
