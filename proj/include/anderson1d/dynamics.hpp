#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "anderson1d/spectra.hpp"
#include "anderson1d/util.hpp"

namespace anderson {

// exp(-itH) psi0 via the spectral decomposition.
inline std::vector<std::complex<double>> evolve(const EigenSystem& es,
                                                std::span<const std::complex<double>> psi0,
                                                double t) {
    if (static_cast<int>(psi0.size()) != es.n) throw std::invalid_argument("evolve: size mismatch");
    const int n = es.n;
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n), {0.0, 0.0});
    for (int k = 0; k < n; ++k) {
        const auto phi = es.vec(k);
        std::complex<double> overlap{0.0, 0.0};
        for (int i = 0; i < n; ++i) overlap += phi[i] * psi0[i];
        const std::complex<double> phase = std::polar(1.0, -t * es.values[k]) * overlap;
        for (int i = 0; i < n; ++i) out[i] += phase * phi[i];
    }
    return out;
}

// rho contribution of one realization: sum_k |phi_k(m)| |phi_k(n)|.
// Site indices m, n are lattice positions in -L..L.
inline double rho_contribution(const EigenSystem& es, int m, int n) {
    const int L = (es.n - 1) / 2;
    if (std::abs(m) > L || std::abs(n) > L)
        throw std::out_of_range("rho_contribution: site outside window");
    const int im = m + L, in = n + L;
    double acc = 0.0;
    for (int k = 0; k < es.n; ++k) acc += std::abs(es.vec(k, im)) * std::abs(es.vec(k, in));
    return acc;
}

// max over the grid of |<delta_m, exp(-itH) delta_n>|; a lower bound on the sup.
inline double sup_correlator_sampled(const EigenSystem& es, int m, int n,
                                     std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("sup_correlator_sampled: empty grid");
    const int L = (es.n - 1) / 2;
    if (std::abs(m) > L || std::abs(n) > L)
        throw std::out_of_range("sup_correlator_sampled: site outside window");
    const int im = m + L, in = n + L;
    double best = 0.0;
    for (double t : t_grid) {
        std::complex<double> amp{0.0, 0.0};
        for (int k = 0; k < es.n; ++k)
            amp += std::polar(1.0, -t * es.values[k]) * (es.vec(k, im) * es.vec(k, in));
        best = std::max(best, std::abs(amp));
    }
    return best;
}

// 256 points log-spaced in [0.1, 1e3], plus t = 0.
inline std::vector<double> default_t_grid() {
    std::vector<double> g;
    g.push_back(0.0);
    const int n = 256;
    const double lo = std::log(0.1), hi = std::log(1e3);
    for (int i = 0; i < n; ++i) g.push_back(std::exp(lo + (hi - lo) * i / (n - 1.0)));
    return g;
}

struct CorrelatorEstimate {
    int m = 0;
    int n = 0;
    double value = 0.0;
    double stderr_value = 0.0;
    int realizations = 0;
};

inline CorrelatorEstimate rho_L_monte_carlo(const SiteDistribution& dist, int L, int m, int n,
                                            int realizations, std::uint64_t seed) {
    if (std::abs(m) > L || std::abs(n) > L)
        throw std::out_of_range("rho_L_monte_carlo: site outside window");
    std::vector<double> vals(static_cast<std::size_t>(realizations));
    parallel_for(vals.size(), [&](std::size_t r) {
        const auto path = sample_path(dist, seed, r, -L, L);
        const auto es = diagonalize(build_hamiltonian(path));
        vals[r] = rho_contribution(es, m, n);
    });
    const SampleStats st = sample_stats(vals);
    return {m, n, st.mean, st.stderr_mean, realizations};
}

struct DecayRateFit {
    double prefactor = 0.0;
    double gamma = 0.0;
    double gamma_stderr = 0.0;
    double r_squared = 0.0;
};

// Least squares of log(value) against m for values at m = 0..m_max.
inline DecayRateFit decay_rate_fit(std::span<const double> values) {
    if (values.size() < 5) throw std::invalid_argument("decay_rate_fit: need m_max >= 4");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0)) throw std::invalid_argument("decay_rate_fit: non-positive value");
        xs.push_back(static_cast<double>(i));
        ys.push_back(std::log(values[i]));
    }
    const LineFit f = fit_line(xs, ys);
    return {std::exp(f.intercept), -f.slope, f.slope_stderr, f.r_squared};
}

}  // namespace anderson
