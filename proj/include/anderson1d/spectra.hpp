#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "anderson1d/tridiag.hpp"
#include "anderson1d/util.hpp"

namespace anderson {

// Exponential-envelope fit |psi(n)| ~ C exp(-gamma |n - center|).
struct DecayFit {
    int center = 0;           // argmax of |psi|, as an index into psi
    double rate = 0.0;        // gamma
    double prefactor = 0.0;   // C
    double r_squared = 0.0;
    int sites_used = 0;
};

inline DecayFit decay_profile(std::span<const double> psi, double floor = 1e-14) {
    if (psi.empty()) throw std::invalid_argument("decay_profile: empty vector");
    int center = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double a = std::abs(psi[i]);
        if (a > best) {  // strict: ties keep the smallest index
            best = a;
            center = static_cast<int>(i);
        }
    }
    std::vector<double> xs, ys;
    xs.reserve(psi.size());
    ys.reserve(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double a = std::abs(psi[i]);
        if (a > floor) {
            xs.push_back(std::abs(static_cast<double>(i) - center));
            ys.push_back(std::log(a));
        }
    }
    if (xs.size() < 4) throw std::invalid_argument("decay_profile: fewer than 4 usable sites");
    const LineFit f = fit_line(xs, ys);
    DecayFit out;
    out.center = center;
    out.rate = -f.slope;
    out.prefactor = std::exp(f.intercept);
    out.r_squared = f.r_squared;
    out.sites_used = static_cast<int>(xs.size());
    return out;
}

struct CensusRow {
    int realization = 0;
    int k = 0;
    double energy = 0.0;
    double rate = 0.0;
    int center = 0;  // lattice site of the maximum, in -L..L
    double r_squared = 0.0;
};

// Decay fits for every eigenvector of every sampled realization.
inline std::vector<CensusRow> localization_census(const SiteDistribution& dist, int L,
                                                  int realizations, std::uint64_t seed) {
    if (L < 1) throw std::invalid_argument("localization_census: L >= 1 required");
    const std::size_t block = static_cast<std::size_t>(2 * L + 1);
    std::vector<CensusRow> rows(static_cast<std::size_t>(realizations) * block);
    parallel_for(static_cast<std::size_t>(realizations), [&](std::size_t r) {
        const auto path = sample_path(dist, seed, r, -L, L);
        const auto es = diagonalize(build_hamiltonian(path));
        for (int k = 0; k < es.n; ++k) {
            const DecayFit f = decay_profile(es.vec(k));
            rows[r * block + static_cast<std::size_t>(k)] = {static_cast<int>(r), k, es.values[k],
                                                             f.rate, f.center - L, f.r_squared};
        }
    });
    return rows;
}

struct CensusSummary {
    double rate_q05 = 0.0, rate_q50 = 0.0, rate_q95 = 0.0;
    double r2_q05 = 0.0, r2_q50 = 0.0, r2_q95 = 0.0;
    double fraction_localized = 0.0;  // r^2 > 0.9 and positive rate
};

inline CensusSummary summarize_census(const std::vector<CensusRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("summarize_census: empty census");
    std::vector<double> rates, r2s;
    std::size_t good = 0;
    for (const auto& r : rows) {
        rates.push_back(r.rate);
        r2s.push_back(r.r_squared);
        if (r.r_squared > 0.9 && r.rate > 0.0) ++good;
    }
    CensusSummary s;
    s.rate_q05 = quantile(rates, 0.05);
    s.rate_q50 = quantile(rates, 0.50);
    s.rate_q95 = quantile(rates, 0.95);
    s.r2_q05 = quantile(r2s, 0.05);
    s.r2_q50 = quantile(r2s, 0.50);
    s.r2_q95 = quantile(r2s, 0.95);
    s.fraction_localized = static_cast<double>(good) / static_cast<double>(rows.size());
    return s;
}

}  // namespace anderson
