#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "anderson1d/distribution.hpp"
#include "anderson1d/rng.hpp"
#include "anderson1d/util.hpp"

namespace anderson {

// Uniform midpoint grid on [-X, X]: nodes x_j = -X + (j+1/2) h, no node at 0.
struct RealGrid {
    double X = 64.0;
    int N = 16384;
    double h = 2.0 * 64.0 / 16384.0;

    RealGrid() = default;
    RealGrid(double half_width, int points) : X(half_width), N(points), h(2.0 * half_width / points) {
        if (!(half_width > 0) || points < 4 || points % 2 != 0)
            throw std::invalid_argument("RealGrid: need X > 0 and even N >= 4");
    }

    double node(int j) const { return -X + (j + 0.5) * h; }
    double cell_lo(int j) const { return -X + j * h; }
    double cell_hi(int j) const { return -X + (j + 1) * h; }
};

struct GridFunction {
    RealGrid grid;
    std::vector<double> values;

    static GridFunction zero(const RealGrid& g) {
        GridFunction f;
        f.grid = g;
        f.values.assign(static_cast<std::size_t>(g.N), 0.0);
        return f;
    }

    double norm1() const {
        double s = 0.0;
        for (double v : values) s += std::abs(v);
        return grid.h * s;
    }
    double norm2() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(grid.h * s);
    }
};

inline double grid_inner(const GridFunction& a, const GridFunction& b) {
    if (a.grid.N != b.grid.N) throw std::invalid_argument("grid_inner: grid mismatch");
    double s = 0.0;
    for (int i = 0; i < a.grid.N; ++i) s += a.values[i] * b.values[i];
    return a.grid.h * s;
}

// Linear interpolation between adjacent nodes; zero outside [-X, X].
inline double grid_interp(const GridFunction& f, double y) {
    const RealGrid& g = f.grid;
    if (y <= -g.X || y >= g.X) return 0.0;
    const double pos = (y + g.X) / g.h - 0.5;
    const int p = static_cast<int>(std::floor(pos));
    const double frac = pos - p;
    double v = 0.0;
    if (p >= 0 && p < g.N) v += (1.0 - frac) * f.values[p];
    if (p + 1 >= 0 && p + 1 < g.N) v += frac * f.values[p + 1];
    return v;
}

// Uf(x) = |x|^{-1} f(1/x), by interpolated point evaluation.
inline GridFunction op_U(const GridFunction& f) {
    GridFunction out = GridFunction::zero(f.grid);
    for (int j = 0; j < f.grid.N; ++j) {
        const double u = f.grid.node(j);
        out.values[j] = grid_interp(f, 1.0 / u) / std::abs(u);
    }
    return out;
}

namespace ks_detail {

// Sparse row structure of the inversion resample u -> y = 1/u: row j lists
// the y-cells overlapping the preimage of u-cell j, with exact integrals of
// the substituted weight against the piecewise-constant representation.
// plain:    (W0 f)_j = (1/h) int_{preimage_j} f(y) dy           (for T0)
// harmonic: (W1 f)_j = (1/h) int_{preimage_j} f(y) / |y| dy     (for T1)
// Cell averaging composed with an exact substitution keeps the discrete
// operators contractive in the same norms as their continuum counterparts.
struct Pushforward {
    std::vector<std::int64_t> ptr;  // row offsets, size N+1
    std::vector<int> col;
    std::vector<double> plain;
    std::vector<double> harmonic;

    void apply(const std::vector<double>& f, const std::vector<double>& coef,
               std::vector<double>& out) const {
        const int n = static_cast<int>(ptr.size()) - 1;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::int64_t k = ptr[j]; k < ptr[j + 1]; ++k) acc += coef[k] * f[col[k]];
            out[j] = acc;
        }
    }

    void apply_transpose(const std::vector<double>& g, const std::vector<double>& coef,
                         std::vector<double>& out) const {
        const int n = static_cast<int>(ptr.size()) - 1;
        std::fill(out.begin(), out.end(), 0.0);
        for (int j = 0; j < n; ++j) {
            const double gj = g[j];
            if (gj == 0.0) continue;
            for (std::int64_t k = ptr[j]; k < ptr[j + 1]; ++k) out[col[k]] += coef[k] * gj;
        }
    }
};

inline Pushforward make_pushforward(const RealGrid& g) {
    Pushforward pf;
    pf.ptr.assign(static_cast<std::size_t>(g.N) + 1, 0);
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.N; ++j) {
        const double c = g.cell_lo(j);
        const double d = g.cell_hi(j);
        // preimage of [c, d] under u -> 1/u, one sign component at a time
        double y_lo = (d == 0.0) ? -inf : 1.0 / d;
        double y_hi = (c == 0.0) ? inf : 1.0 / c;
        y_lo = std::max(y_lo, -g.X);
        y_hi = std::min(y_hi, g.X);
        if (y_lo >= y_hi) {
            pf.ptr[static_cast<std::size_t>(j) + 1] = pf.ptr[j];
            continue;
        }
        const int p_lo = std::clamp(static_cast<int>(std::floor((y_lo + g.X) / g.h)), 0, g.N - 1);
        const int p_hi = std::clamp(static_cast<int>(std::floor((y_hi + g.X) / g.h)), 0, g.N - 1);
        for (int p = p_lo; p <= p_hi; ++p) {
            const double a = std::max(y_lo, g.cell_lo(p));
            const double b = std::min(y_hi, g.cell_hi(p));
            if (!(b > a)) continue;
            pf.col.push_back(p);
            pf.plain.push_back((b - a) / g.h);
            // |y| >= 1/X > 0 on the clipped preimage, so the log integral is safe
            pf.harmonic.push_back(std::abs(std::log(std::abs(b / a))) / g.h);
        }
        pf.ptr[static_cast<std::size_t>(j) + 1] = static_cast<std::int64_t>(pf.col.size());
    }
    return pf;
}

}  // namespace ks_detail

// The discretized Kunz-Souillard operators at one energy:
//   T0 f = r_E * (pushforward of f dy),  T1 f = r_E * (pushforward of f dy/|y|)
// with the kernel r_E(s) = r(E - s) entering through exact cell averages, so
// the stencil mass is exactly 1 and nonnegativity is preserved.
class KsOperators {
  public:
    KsOperators(const SiteDistribution& dist, double energy, const RealGrid& grid)
        : grid_(grid), energy_(energy), pushforward_(ks_detail::make_pushforward(grid)) {
        if (dist.is_atomic())
            throw std::invalid_argument("KsOperators: a density single-site measure is required");
        if (dist.support_radius() + 2.0 + grid.h >= 0.5 * grid.X)
            throw std::invalid_argument("KsOperators: grid too small for the kernel support");
        stencil_.assign(static_cast<std::size_t>(2 * grid.N - 1), 0.0);
        stencil_lo_ = stencil_.size();
        stencil_hi_ = 0;
        for (std::size_t m = 0; m < stencil_.size(); ++m) {
            const double t = -2.0 * grid.X + (static_cast<double>(m) + 1.0) * grid.h;
            const double cell =
                dist.mass_between(energy - t - 0.5 * grid.h, energy - t + 0.5 * grid.h);
            stencil_[m] = cell / grid.h;
            if (cell > 0.0) {
                stencil_lo_ = std::min(stencil_lo_, m);
                stencil_hi_ = std::max(stencil_hi_, m);
            }
        }
        if (stencil_lo_ > stencil_hi_)
            throw std::invalid_argument("KsOperators: kernel support off the grid");
    }

    const RealGrid& grid() const { return grid_; }
    double energy() const { return energy_; }

    // phi(x) = r(E - x), cell-averaged onto the grid.
    GridFunction phi(const SiteDistribution& dist) const {
        GridFunction f = GridFunction::zero(grid_);
        for (int j = 0; j < grid_.N; ++j) {
            const double x = grid_.node(j);
            f.values[j] =
                dist.mass_between(energy_ - x - 0.5 * grid_.h, energy_ - x + 0.5 * grid_.h) /
                grid_.h;
        }
        return f;
    }

    // Mass of f that the inversion moves beyond the grid (|y| < 1/X maps to
    // |u| > X); the exactly-known part of the truncation budget.
    double inversion_truncation_loss(const GridFunction& f) const {
        const double cut = 1.0 / grid_.X;
        double acc = 0.0;
        for (int p = 0; p < grid_.N; ++p) {
            const double a = std::max(grid_.cell_lo(p), -cut);
            const double b = std::min(grid_.cell_hi(p), cut);
            if (b > a) acc += std::abs(f.values[p]) * (b - a);
        }
        return acc;
    }

    GridFunction apply_t0(const GridFunction& f) const { return apply(f, pushforward_.plain); }
    GridFunction apply_t1(const GridFunction& f) const { return apply(f, pushforward_.harmonic); }
    GridFunction apply_t0_adjoint(const GridFunction& f) const {
        return apply_adjoint(f, pushforward_.plain);
    }
    GridFunction apply_t1_adjoint(const GridFunction& f) const {
        return apply_adjoint(f, pushforward_.harmonic);
    }

    // Operator L1 -> L1 norm: maximal column sum, computed matrix-free as the
    // adjoint applied to the all-ones vector (all entries are nonnegative).
    double t0_norm_11() const {
        GridFunction ones;
        ones.grid = grid_;
        ones.values.assign(static_cast<std::size_t>(grid_.N), 1.0);
        const GridFunction sums = apply_adjoint(ones, pushforward_.plain);
        double best = 0.0;
        for (double v : sums.values) best = std::max(best, v);
        return best;
    }

    // Operator L1 -> L2 norm: maximal column L2 norm over L1-normalized spikes.
    double t0_norm_12() const { return norm_12(pushforward_.plain); }

    double t1_norm_22(int max_iter = 60, double rel_tol = 1e-10) const {
        return power_norm(1, max_iter, rel_tol);
    }
    double t1sq_norm_22(int max_iter = 60, double rel_tol = 1e-10) const {
        return power_norm(2, max_iter, rel_tol);
    }

  private:
    GridFunction apply(const GridFunction& f, const std::vector<double>& coef) const {
        check(f);
        std::vector<double> w(static_cast<std::size_t>(grid_.N), 0.0);
        pushforward_.apply(f.values, coef, w);
        GridFunction out = GridFunction::zero(grid_);
        convolve_stencil(w, out.values);
        return out;
    }

    GridFunction apply_adjoint(const GridFunction& f, const std::vector<double>& coef) const {
        check(f);
        std::vector<double> g(static_cast<std::size_t>(grid_.N), 0.0);
        convolve_stencil(f.values, g);  // the stencil block is symmetric
        GridFunction out = GridFunction::zero(grid_);
        pushforward_.apply_transpose(g, coef, out.values);
        return out;
    }

    // out_i = h * sum_j stencil[i + j] w_j.
    void convolve_stencil(const std::vector<double>& w, std::vector<double>& out) const {
        const int n = grid_.N;
        const auto lo = static_cast<std::ptrdiff_t>(stencil_lo_);
        const auto hi = static_cast<std::ptrdiff_t>(stencil_hi_);
        for (int j = 0; j < n; ++j) {
            const double wj = w[j];
            if (wj == 0.0) continue;
            const std::ptrdiff_t i_lo = std::max<std::ptrdiff_t>(0, lo - j);
            const std::ptrdiff_t i_hi = std::min<std::ptrdiff_t>(n - 1, hi - j);
            const double* s = stencil_.data() + j;
            double* o = out.data();
            for (std::ptrdiff_t i = i_lo; i <= i_hi; ++i) o[i] += s[i] * wj;
        }
        for (double& v : out) v *= grid_.h;
    }

    double norm_12(const std::vector<double>& coef) const {
        const int n = grid_.N;
        // Reverse lists: contributions of each input cell to resample rows.
        std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            for (std::int64_t k = pushforward_.ptr[j]; k < pushforward_.ptr[j + 1]; ++k)
                if (coef[k] != 0.0) cols[pushforward_.col[k]].push_back({j, coef[k]});
        std::vector<double> scratch(static_cast<std::size_t>(n), 0.0);
        double best = 0.0;
        for (int colidx = 0; colidx < n; ++colidx) {
            if (cols[colidx].empty()) continue;
            std::ptrdiff_t touched_lo = n, touched_hi = -1;
            for (const auto& [row, weight] : cols[colidx]) {
                const std::ptrdiff_t i_lo =
                    std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(stencil_lo_) - row);
                const std::ptrdiff_t i_hi = std::min<std::ptrdiff_t>(
                    n - 1, static_cast<std::ptrdiff_t>(stencil_hi_) - row);
                const double* s = stencil_.data() + row;
                for (std::ptrdiff_t i = i_lo; i <= i_hi; ++i) scratch[i] += s[i] * weight;
                touched_lo = std::min(touched_lo, i_lo);
                touched_hi = std::max(touched_hi, i_hi);
            }
            double ss = 0.0;
            for (std::ptrdiff_t i = touched_lo; i <= touched_hi; ++i) {
                const double v = grid_.h * scratch[i];
                ss += v * v;
                scratch[i] = 0.0;
            }
            best = std::max(best, std::sqrt(grid_.h * ss));
        }
        return best / grid_.h;  // spikes have L1 norm h
    }

    // Largest singular value of T1^power by power iteration on the normal
    // operator; 2->2 norms are what the contraction certificate is stated in.
    double power_norm(int power, int max_iter, double rel_tol) const {
        const int n = grid_.N;
        GridFunction v;
        v.grid = grid_;
        v.values.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) v.values[j] = counter_uniform(0x9e3779b9, 17, j) - 0.5;
        double prev = 0.0;
        for (int it = 0; it < max_iter; ++it) {
            double nrm = v.norm2();
            if (!(nrm > 0)) throw std::runtime_error("power_norm: null iterate");
            for (double& x : v.values) x /= nrm;
            GridFunction w = v;
            for (int k = 0; k < power; ++k) w = apply_t1(w);
            for (int k = 0; k < power; ++k) w = apply_t1_adjoint(w);
            // Rayleigh quotient of the normal operator at the unit iterate.
            const double sigma = std::sqrt(std::max(0.0, grid_inner(w, v)));
            v = std::move(w);
            if (it > 2 && std::abs(sigma - prev) <= rel_tol * std::max(1.0, sigma)) return sigma;
            prev = sigma;
        }
        return prev;
    }

    void check(const GridFunction& f) const {
        if (f.grid.N != grid_.N) throw std::invalid_argument("KsOperators: grid mismatch");
    }

    RealGrid grid_;
    double energy_ = 0.0;
    ks_detail::Pushforward pushforward_;
    std::vector<double> stencil_;
    std::size_t stencil_lo_ = 0, stencil_hi_ = 0;
};

}  // namespace anderson
