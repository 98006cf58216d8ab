#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anderson1d/distribution.hpp"

namespace anderson {

// One realization of the i.i.d. potential on a finite window of the lattice.
// Values are keyed by absolute site index, so the shift acts by reindexing.
struct PotentialPath {
    std::int64_t n_lo = 0;
    std::int64_t n_hi = -1;
    std::uint64_t seed = 0;
    std::uint64_t realization = 0;
    std::vector<double> values;

    bool covers(std::int64_t lo, std::int64_t hi) const { return n_lo <= lo && hi <= n_hi; }

    double at(std::int64_t site) const {
        if (site < n_lo || site > n_hi) throw std::out_of_range("PotentialPath::at: site outside window");
        return values[static_cast<std::size_t>(site - n_lo)];
    }
};

inline PotentialPath sample_path(const SiteDistribution& dist, std::uint64_t seed,
                                 std::uint64_t realization, std::int64_t n_lo, std::int64_t n_hi) {
    if (n_hi < n_lo) throw std::invalid_argument("sample_path: empty window");
    PotentialPath p;
    p.n_lo = n_lo;
    p.n_hi = n_hi;
    p.seed = seed;
    p.realization = realization;
    p.values.resize(static_cast<std::size_t>(n_hi - n_lo + 1));
    for (std::int64_t s = n_lo; s <= n_hi; ++s)
        p.values[static_cast<std::size_t>(s - n_lo)] = dist.sample(seed, realization, s);
    return p;
}

// H restricted to sites -L..L with Dirichlet truncation; off-diagonals are 1.
struct FiniteHamiltonian {
    int L = 0;
    std::vector<double> diagonal;

    int size() const { return 2 * L + 1; }
};

inline FiniteHamiltonian build_hamiltonian(const PotentialPath& path) {
    if (path.n_lo != -path.n_hi)
        throw std::invalid_argument("build_hamiltonian: window must be symmetric about 0");
    FiniteHamiltonian h;
    h.L = static_cast<int>(path.n_hi);
    h.diagonal = path.values;
    return h;
}

inline FiniteHamiltonian hamiltonian_from_values(std::vector<double> diag) {
    if (diag.empty() || diag.size() % 2 == 0)
        throw std::invalid_argument("hamiltonian_from_values: need odd length");
    FiniteHamiltonian h;
    h.L = static_cast<int>(diag.size() / 2);
    h.diagonal = std::move(diag);
    return h;
}

// Sigma = [-2,2] + supp nu, as a minimal union of disjoint closed intervals.
inline std::vector<Interval> almost_sure_spectrum(const SiteDistribution& dist) {
    std::vector<Interval> parts;
    for (const auto& iv : dist.support()) parts.push_back({iv.lo - 2.0, iv.hi + 2.0});
    return merge_intervals(std::move(parts));
}

// [-2-M, 2+M], the window containing all finite-volume spectra.
inline Interval sigma0(const SiteDistribution& dist) {
    const double m = dist.support_radius();
    return {-2.0 - m, 2.0 + m};
}

// Birkhoff average of f(omega) = omega_0 along the shift orbit of one path.
inline double birkhoff_average(const SiteDistribution& dist, std::uint64_t seed, std::int64_t n,
                               std::uint64_t realization = 0) {
    if (n < 1) throw std::invalid_argument("birkhoff_average: n >= 1 required");
    double acc = 0.0;
    for (std::int64_t m = 0; m < n; ++m) acc += dist.sample(seed, realization, m);
    return acc / static_cast<double>(n);
}

}  // namespace anderson
