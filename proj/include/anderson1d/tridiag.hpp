#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "anderson1d/model.hpp"

namespace anderson {

// Full eigensystem of a finite-volume Hamiltonian. Eigenvalues ascending,
// eigenvector k stored contiguously at vectors[k*n .. k*n+n-1].
struct EigenSystem {
    int n = 0;
    std::vector<double> values;
    std::vector<double> vectors;

    std::span<const double> vec(int k) const {
        return {vectors.data() + static_cast<std::size_t>(k) * n, static_cast<std::size_t>(n)};
    }
    double vec(int k, int i) const { return vectors[static_cast<std::size_t>(k) * n + i]; }
};

namespace detail {

// Implicit-shift QL for a symmetric tridiagonal matrix (diagonal d, unit-offset
// subdiagonal e). If z is non-null it must point at an n*n identity stored
// column-major; rotations are accumulated so column k ends up as eigenvector k.
inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e, double* z, int n) {
    if (n == 1) return;
    e[static_cast<std::size_t>(n) - 1] = 0.0;
    const double eps = 2.2204460492503131e-16;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw std::runtime_error("tridiag_ql: no convergence in 60 iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z != nullptr) {
                        double* zi = z + static_cast<std::size_t>(i) * n;
                        double* zi1 = z + static_cast<std::size_t>(i + 1) * n;
                        for (int k = 0; k < n; ++k) {
                            f = zi1[k];
                            zi1[k] = s * zi[k] + c * f;
                            zi[k] = c * zi[k] - s * f;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace detail

inline std::vector<double> eigenvalues_only(const FiniteHamiltonian& h) {
    const int n = h.size();
    std::vector<double> d = h.diagonal;
    std::vector<double> e(static_cast<std::size_t>(n), 1.0);
    detail::tridiag_ql(d, e, nullptr, n);
    std::sort(d.begin(), d.end());
    return d;
}

inline EigenSystem diagonalize(const FiniteHamiltonian& h) {
    const int n = h.size();
    EigenSystem es;
    es.n = n;
    std::vector<double> d = h.diagonal;
    std::vector<double> e(static_cast<std::size_t>(n), 1.0);
    std::vector<double> z(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k) * n + k] = 1.0;
    detail::tridiag_ql(d, e, z.data(), n);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

    es.values.resize(static_cast<std::size_t>(n));
    es.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        es.values[k] = d[order[k]];
        const double* src = z.data() + static_cast<std::size_t>(order[k]) * n;
        double* dst = es.vectors.data() + static_cast<std::size_t>(k) * n;
        for (int i = 0; i < n; ++i) dst[i] = src[i];
    }
    return es;
}

// max_k ||H phi_k - E_k phi_k||_2, for solver self-checks.
inline double eigensystem_residual(const FiniteHamiltonian& h, const EigenSystem& es) {
    const int n = h.size();
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto v = es.vec(k);
        double ss = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = h.diagonal[i] * v[i] - es.values[k] * v[i];
            if (i > 0) r += v[i - 1];
            if (i + 1 < n) r += v[i + 1];
            ss += r * r;
        }
        worst = std::max(worst, std::sqrt(ss));
    }
    return worst;
}

}  // namespace anderson
