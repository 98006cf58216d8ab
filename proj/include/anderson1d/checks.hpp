#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "anderson1d/dynamics.hpp"
#include "anderson1d/ks.hpp"
#include "anderson1d/model.hpp"
#include "anderson1d/rank_one.hpp"
#include "anderson1d/spectra.hpp"
#include "anderson1d/transfer.hpp"

namespace anderson {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace checks_detail {

inline CheckResult det_preservation() {
    CheckResult r{"determinant preservation", true, ""};
    const auto atom = SiteDistribution::point_mass(0.0);
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    // Elliptic regime: bounded products, direct det of the scaled form at n = 1e6.
    {
        const auto path = sample_path(atom, 11, 0, 1, 1000000);
        const auto p = cocycle_product(1.2, path, 1000000);
        const double defect = std::abs(std::exp(p.log_det()) - 1.0);
        r.passed = r.passed && defect < 1e-6;
        r.detail += "elliptic defect=" + std::to_string(defect);
    }
    // Hyperbolic regime: the QR-factored determinant stays checkable at n = 1e6.
    {
        const auto path = sample_path(bern, 12, 0, 1, 1000000);
        const double logdet = cocycle_log_det(3.2, path, 1000000);
        r.passed = r.passed && std::abs(logdet) < 1e-6;
        r.detail += " hyperbolic |log det|=" + std::to_string(std::abs(logdet));
    }
    // Moderate depth, direct evaluation against the scaled representation.
    {
        const auto path = sample_path(bern, 13, 0, 1, 64);
        const auto p = cocycle_product(2.5, path, 20);
        const double defect = std::abs(std::exp(p.log_det()) - 1.0);
        r.passed = r.passed && defect < 1e-6;
    }
    return r;
}

inline CheckResult kingman_subadditivity() {
    CheckResult r{"Kingman subadditivity", true, ""};
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    double worst = -1e300;
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = 1 + static_cast<std::int64_t>(counter_uniform(5, trial, 0, 1) * 1000);
        const auto m = 1 + static_cast<std::int64_t>(counter_uniform(5, trial, 1, 1) * 1000);
        const double e = -2.5 + 6.0 * counter_uniform(5, trial, 2, 1);
        const auto path = sample_path(bern, 21, static_cast<std::uint64_t>(trial), 1, n + m);
        const double g_nm = cocycle_product(e, path, n + m).log_norm();
        const double g_n = cocycle_product(e, path, n).log_norm();
        // The m-step block over sites n+1 .. n+m, i.e. the cocycle at T^n omega.
        ScaledProduct shifted;
        for (std::int64_t k = n + 1; k <= n + m; ++k) shifted.push(step_matrix(e, path.at(k)));
        shifted.renormalize();
        const double excess = g_nm - (g_n + shifted.log_norm());
        worst = std::max(worst, excess);
    }
    r.passed = worst <= 1e-9;
    r.detail = "max excess=" + std::to_string(worst);
    return r;
}

inline CheckResult herglotz_sign() {
    CheckResult r{"Herglotz sign preservation", true, ""};
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int L = 3 + static_cast<int>(counter_uniform(6, trial, 0) * 8);
        std::vector<double> diag(static_cast<std::size_t>(2 * L + 1));
        for (std::size_t i = 0; i < diag.size(); ++i)
            diag[i] = 2.0 * counter_uniform(6, trial, static_cast<std::int64_t>(i) + 1) - 1.0;
        const auto es = diagonalize(hamiltonian_from_values(diag));
        std::vector<double> phi(static_cast<std::size_t>(2 * L + 1));
        double nrm = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            phi[i] = counter_uniform(6, trial, 100 + static_cast<std::int64_t>(i)) - 0.5;
            nrm += phi[i] * phi[i];
        }
        for (double& x : phi) x /= std::sqrt(nrm);
        const double im_z = (counter_uniform(6, trial, 200) - 0.5) * 4.0;
        const double re_z = (counter_uniform(6, trial, 201) - 0.5) * 8.0;
        if (std::abs(im_z) < 1e-3) continue;
        const Complex f = borel_transform(es, phi, {re_z, im_z});
        if (f.imag() * im_z <= 0.0) ++bad;
    }
    r.passed = bad == 0;
    r.detail = "violations=" + std::to_string(bad);
    return r;
}

inline CheckResult u_involution() {
    CheckResult r{"U involution", true, ""};
    const RealGrid g(16.0, 4096);
    GridFunction f = GridFunction::zero(g);
    for (int j = 0; j < g.N; ++j) {
        const double x = g.node(j);
        // smooth bump supported on 0.4 <= |x| <= 2.5
        const double t = (std::abs(x) - 0.4) * (2.5 - std::abs(x));
        f.values[j] = t > 0 ? std::exp(-1.0 / t) : 0.0;
    }
    const GridFunction ff = op_U(op_U(f));
    double diff = 0.0;
    for (int j = 0; j < g.N; ++j) {
        const double d = ff.values[j] - f.values[j];
        diff += d * d;
    }
    diff = std::sqrt(g.h * diff);
    const double bound = 50.0 * g.h;
    r.passed = diff <= bound;
    r.detail = "||UUf - f||_2=" + std::to_string(diff) + " bound=" + std::to_string(bound);
    return r;
}

inline CheckResult t0_mass_preservation() {
    CheckResult r{"T0 mass preservation", true, ""};
    const auto u = SiteDistribution::uniform(0.0, 1.0);
    const RealGrid g(64.0, 16384);
    const KsOperators ops(u, 0.5, g);
    // Nonnegative input supported away from 0: mass is conserved to rounding.
    GridFunction f = GridFunction::zero(g);
    for (int j = 0; j < g.N; ++j) {
        const double x = g.node(j);
        if (x > 0.5 && x < 3.0) f.values[j] = 1.0 + std::sin(x);
    }
    const double in_mass = f.norm1();
    const double out_mass = ops.apply_t0(f).norm1();
    const double defect_interior = std::abs(out_mass - in_mass);
    r.passed = r.passed && defect_interior < 1e-10 * in_mass;
    // phi has mass straddling 0; the loss is exactly the inversion truncation.
    const GridFunction phi = ops.phi(u);
    const double loss = ops.inversion_truncation_loss(phi);
    const double defect_phi = std::abs(ops.apply_t0(phi).norm1() - (phi.norm1() - loss));
    r.passed = r.passed && defect_phi < 1e-3;
    r.detail = "interior defect=" + std::to_string(defect_interior) +
               " phi defect=" + std::to_string(defect_phi);
    return r;
}

inline CheckResult spectrum_containment() {
    CheckResult r{"spectrum containment in Sigma0", true, ""};
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    const Interval s0 = sigma0(bern);
    double worst = 0.0;
    for (int L = 1; L <= 20; ++L) {
        for (int rr = 0; rr < 1000; ++rr) {
            const auto path = sample_path(bern, 31, static_cast<std::uint64_t>(rr * 20 + L), -L, L);
            for (double e : eigenvalues_only(build_hamiltonian(path))) {
                worst = std::max(worst, std::max(s0.lo - e, e - s0.hi));
            }
        }
    }
    r.passed = worst <= 1e-10;
    r.detail = "max excursion=" + std::to_string(worst);
    return r;
}

inline CheckResult spectrum_coverage() {
    CheckResult r{"almost-sure spectrum coverage", true, ""};
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    const int L = 50;
    const auto sigma = almost_sure_spectrum(bern);
    std::vector<double> eigs;
    for (int rr = 0; rr < 10000; ++rr) {
        const auto path = sample_path(bern, 37, static_cast<std::uint64_t>(rr), -L, L);
        const auto es = eigenvalues_only(build_hamiltonian(path));
        eigs.insert(eigs.end(), es.begin(), es.end());
    }
    std::sort(eigs.begin(), eigs.end());
    // every length-0.1 subinterval of Sigma must contain an eigenvalue,
    // equivalently: no gap of 0.1 inside Sigma and ends covered within 0.1
    double worst_gap = 0.0;
    for (const auto& iv : sigma) {
        double prev = iv.lo;
        for (double e : eigs) {
            if (e < iv.lo || e > iv.hi) continue;
            worst_gap = std::max(worst_gap, e - prev);
            prev = e;
        }
        worst_gap = std::max(worst_gap, iv.hi - prev);
    }
    r.passed = worst_gap < 0.1;
    r.detail = "largest uncovered gap=" + std::to_string(worst_gap);
    return r;
}

}  // namespace checks_detail

inline std::vector<CheckResult> run_invariant_checks() {
    return {
        checks_detail::det_preservation(),     checks_detail::kingman_subadditivity(),
        checks_detail::herglotz_sign(),        checks_detail::u_involution(),
        checks_detail::t0_mass_preservation(), checks_detail::spectrum_containment(),
        checks_detail::spectrum_coverage(),
    };
}

}  // namespace anderson
