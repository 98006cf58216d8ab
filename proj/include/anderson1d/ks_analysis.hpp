#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anderson1d/ks.hpp"
#include "anderson1d/model.hpp"
#include "anderson1d/tridiag.hpp"

namespace anderson {

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[i] = a + (b - a) * i / (n - 1.0);
    return xs;
}

struct NormRow {
    double energy = 0.0;
    double t0_11 = 0.0;
    double t0_12 = 0.0;
    double t1_22 = 0.0;
    double t1sq_22 = 0.0;
};

struct NormReport {
    std::vector<NormRow> rows;
    double sup_t0_11 = 0.0, sup_t0_12 = 0.0, sup_t1_22 = 0.0, sup_t1sq_22 = 0.0;
    double budget = 0.0;         // max over rows/columns of |value(N) - value(2N)|
    double delta = 0.0;          // 1 - sup ||T1^2||, the contraction margin
    double delta_doubled = 0.0;  // the same margin on the doubled grid
    bool converged = false;      // budget within 10% of the certified margin
};

namespace ks_detail {

inline std::vector<NormRow> norm_rows(const SiteDistribution& dist,
                                      const std::vector<double>& e_grid, const RealGrid& grid) {
    std::vector<NormRow> rows(e_grid.size());
    parallel_for(e_grid.size(), [&](std::size_t i) {
        const KsOperators ops(dist, e_grid[i], grid);
        NormRow r;
        r.energy = e_grid[i];
        r.t0_11 = ops.t0_norm_11();
        r.t0_12 = ops.t0_norm_12();
        r.t1_22 = ops.t1_norm_22();
        r.t1sq_22 = ops.t1sq_norm_22();
        rows[i] = r;
    });
    return rows;
}

}  // namespace ks_detail

// Discrete certification of the operator-norm bounds: the 1->1 and 1->2
// bounds on T0, the 2->2 bound on T1, and the strict contraction of T1^2
// uniformly over the Sigma_0 energy grid. The budget is the observed gap
// between the working grid and the doubled grid.
inline NormReport norm_certify(const SiteDistribution& dist, int e_points, const RealGrid& grid) {
    const Interval s0 = sigma0(dist);
    const auto e_grid = linspace(s0.lo, s0.hi, e_points);
    NormReport rep;
    rep.rows = ks_detail::norm_rows(dist, e_grid, grid);
    const RealGrid doubled(grid.X, 2 * grid.N);
    const auto rows2 = ks_detail::norm_rows(dist, e_grid, doubled);
    double sup2 = 0.0;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const NormRow& a = rep.rows[i];
        const NormRow& b = rows2[i];
        rep.sup_t0_11 = std::max(rep.sup_t0_11, a.t0_11);
        rep.sup_t0_12 = std::max(rep.sup_t0_12, a.t0_12);
        rep.sup_t1_22 = std::max(rep.sup_t1_22, a.t1_22);
        rep.sup_t1sq_22 = std::max(rep.sup_t1sq_22, a.t1sq_22);
        sup2 = std::max(sup2, b.t1sq_22);
        rep.budget = std::max({rep.budget, std::abs(a.t0_11 - b.t0_11),
                               std::abs(a.t0_12 - b.t0_12), std::abs(a.t1_22 - b.t1_22),
                               std::abs(a.t1sq_22 - b.t1sq_22)});
    }
    rep.delta = 1.0 - rep.sup_t1sq_22;
    rep.delta_doubled = 1.0 - sup2;
    rep.converged = rep.delta > 0.0 && rep.budget <= 0.1 * rep.delta;
    return rep;
}

// One energy slice of the operator formula:
// <T1^{m-1} T0^{L-m} phi, U T0^L phi> for m = 1..m_max, sharing the T0 ladder.
inline std::vector<double> rho_pairings_at_energy(const SiteDistribution& dist, double energy,
                                                  int L, int m_max, const RealGrid& grid) {
    if (m_max < 1 || m_max > L) throw std::invalid_argument("rho_pairings: need 1 <= m <= L");
    const KsOperators ops(dist, energy, grid);
    const GridFunction phi = ops.phi(dist);
    std::vector<GridFunction> t0_powers;
    t0_powers.reserve(static_cast<std::size_t>(L) + 1);
    t0_powers.push_back(phi);
    for (int k = 1; k <= L; ++k) t0_powers.push_back(ops.apply_t0(t0_powers.back()));
    const GridFunction right = op_U(t0_powers[static_cast<std::size_t>(L)]);
    std::vector<double> out(static_cast<std::size_t>(m_max));
    for (int m = 1; m <= m_max; ++m) {
        GridFunction left = t0_powers[static_cast<std::size_t>(L - m)];
        for (int k = 0; k < m - 1; ++k) left = ops.apply_t1(left);
        out[static_cast<std::size_t>(m) - 1] = grid_inner(left, right);
    }
    return out;
}

// rho_L(m, 0) for m = 1..m_max by the integral-operator route: trapezoid in E
// over Sigma_0 of the pairing above.
inline std::vector<double> rho_operator_values(const SiteDistribution& dist, int L, int m_max,
                                               int e_points, const RealGrid& grid) {
    const Interval s0 = sigma0(dist);
    const auto e_grid = linspace(s0.lo, s0.hi, e_points);
    const double de = (s0.hi - s0.lo) / (e_points - 1.0);
    std::vector<std::vector<double>> slices(static_cast<std::size_t>(e_points));
    parallel_for(slices.size(), [&](std::size_t i) {
        slices[i] = rho_pairings_at_energy(dist, e_grid[i], L, m_max, grid);
    });
    std::vector<double> acc(static_cast<std::size_t>(m_max), 0.0);
    for (int i = 0; i < e_points; ++i) {
        const double w = (i == 0 || i == e_points - 1) ? 0.5 * de : de;
        for (int m = 0; m < m_max; ++m) acc[m] += w * slices[static_cast<std::size_t>(i)][m];
    }
    return acc;
}

inline double rho_operator(const SiteDistribution& dist, int L, int m, int e_points,
                           const RealGrid& grid) {
    if (m < 1 || m > L) throw std::invalid_argument("rho_operator: need 1 <= m <= L");
    return rho_operator_values(dist, L, m, e_points, grid)[static_cast<std::size_t>(m) - 1];
}

struct RhoOperatorResult {
    std::vector<double> values;   // m = 1..m_max
    std::vector<double> budgets;  // refinement gaps: N doubling + X doubling + E doubling
};

inline RhoOperatorResult rho_operator_with_budget(const SiteDistribution& dist, int L, int m_max,
                                                  int e_points, const RealGrid& grid) {
    RhoOperatorResult res;
    res.values = rho_operator_values(dist, L, m_max, e_points, grid);
    const auto v_n = rho_operator_values(dist, L, m_max, e_points, RealGrid(grid.X, 2 * grid.N));
    const auto v_x = rho_operator_values(dist, L, m_max, e_points, RealGrid(2.0 * grid.X, 2 * grid.N));
    const auto v_e = rho_operator_values(dist, L, m_max, 2 * e_points - 1, grid);
    res.budgets.resize(static_cast<std::size_t>(m_max));
    for (int m = 0; m < m_max; ++m)
        res.budgets[m] = std::abs(res.values[m] - v_n[m]) + std::abs(res.values[m] - v_x[m]) +
                         std::abs(res.values[m] - v_e[m]);
    return res;
}

// ---- The change-of-variables Jacobian identity ----

// Eigenvector ratio variables: x_n = phi(n+1)/phi(n) for n < 0 and
// phi(n-1)/phi(n) for n > 0, stored as (x_{-L},...,x_{-1}, E, x_1,...,x_L).
struct RatioCoordinates {
    int L = 0;
    std::vector<double> vars;  // size 2L+1 in the order above; x_n sits at n+L
    double phi0 = 0.0;
};

inline RatioCoordinates ratio_coordinates(const std::vector<double>& v, int k) {
    const auto es = diagonalize(hamiltonian_from_values(std::vector<double>(v)));
    const int n = es.n;
    const int L = (n - 1) / 2;
    const auto phi = es.vec(k);
    const double phi0 = phi[L];
    if (std::abs(phi0) < 1e-8)
        throw std::invalid_argument("ratio_coordinates: phi_k(0) too small; re-draw the potential");
    RatioCoordinates rc;
    rc.L = L;
    rc.phi0 = phi0;
    rc.vars.assign(static_cast<std::size_t>(n), 0.0);
    for (int s = -L; s <= -1; ++s) {
        if (phi[s + L] == 0.0) throw std::invalid_argument("ratio_coordinates: zero eigenvector entry");
        rc.vars[static_cast<std::size_t>(s + L)] = phi[s + 1 + L] / phi[s + L];
    }
    rc.vars[static_cast<std::size_t>(L)] = es.values[k];
    for (int s = 1; s <= L; ++s) {
        if (phi[s + L] == 0.0) throw std::invalid_argument("ratio_coordinates: zero eigenvector entry");
        rc.vars[static_cast<std::size_t>(s + L)] = phi[s - 1 + L] / phi[s + L];
    }
    return rc;
}

// The inverse map (x, E) -> V, with x_{-L-1}^{-1} = x_{L+1}^{-1} = 0.
inline std::vector<double> potential_from_ratios(const std::vector<double>& vars, int L) {
    if (static_cast<int>(vars.size()) != 2 * L + 1)
        throw std::invalid_argument("potential_from_ratios: size mismatch");
    const double E = vars[static_cast<std::size_t>(L)];
    auto x = [&](int n) { return vars[static_cast<std::size_t>(n + L)]; };
    std::vector<double> v(static_cast<std::size_t>(2 * L + 1), 0.0);
    for (int n = -L; n <= -1; ++n) {
        const double inv_prev = (n - 1 < -L) ? 0.0 : 1.0 / x(n - 1);
        v[static_cast<std::size_t>(n + L)] = E - inv_prev - x(n);
    }
    v[static_cast<std::size_t>(L)] = E - 1.0 / x(-1) - 1.0 / x(1);
    for (int n = 1; n <= L; ++n) {
        const double inv_next = (n + 1 > L) ? 0.0 : 1.0 / x(n + 1);
        v[static_cast<std::size_t>(n + L)] = E - inv_next - x(n);
    }
    return v;
}

// det J by the paper's nested recursion: 1 + sum of the two chains in x^{-2}.
inline double jacobian_det_recursive(const std::vector<double>& vars, int L) {
    auto x = [&](int n) { return vars[static_cast<std::size_t>(n + L)]; };
    double pos = 1.0 / (x(L) * x(L));
    for (int n = L - 1; n >= 1; --n) pos = (1.0 + pos) / (x(n) * x(n));
    double neg = 1.0 / (x(-L) * x(-L));
    for (int n = -L + 1; n <= -1; ++n) neg = (1.0 + neg) / (x(n) * x(n));
    return 1.0 + pos + neg;
}

inline double det_by_lu(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t cc = c; cc < n; ++cc) a[r][cc] -= f * a[c][cc];
        }
    }
    return det;
}

struct JacobianCheck {
    double det_numeric = 0.0;
    double det_recursive = 0.0;
    double target = 0.0;  // phi_k(0)^{-2}
    double relative_defect = 0.0;
};

// Central finite differences of (x, E) -> V against the closed form
// det J = phi_k(0)^{-2}.
inline JacobianCheck jacobian_check(const std::vector<double>& potential, int k,
                                    double fd_step = 1e-5) {
    const RatioCoordinates rc = ratio_coordinates(potential, k);
    const int L = rc.L;
    const int n = 2 * L + 1;
    std::vector<std::vector<double>> jac(static_cast<std::size_t>(n),
                                         std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
        std::vector<double> hi = rc.vars, lo = rc.vars;
        hi[static_cast<std::size_t>(i)] += fd_step;
        lo[static_cast<std::size_t>(i)] -= fd_step;
        const auto v_hi = potential_from_ratios(hi, L);
        const auto v_lo = potential_from_ratios(lo, L);
        for (int j = 0; j < n; ++j)
            jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                (v_hi[static_cast<std::size_t>(j)] - v_lo[static_cast<std::size_t>(j)]) /
                (2.0 * fd_step);
    }
    JacobianCheck out;
    out.det_numeric = det_by_lu(std::move(jac));
    out.det_recursive = jacobian_det_recursive(rc.vars, L);
    out.target = 1.0 / (rc.phi0 * rc.phi0);
    out.relative_defect = std::abs(out.det_numeric - out.target) / out.target;
    return out;
}

}  // namespace anderson
