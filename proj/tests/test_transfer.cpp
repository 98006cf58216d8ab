#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "anderson1d/transfer.hpp"

using namespace anderson;

namespace {
const double kGammaE3 = std::log((3.0 + std::sqrt(5.0)) / 2.0);  // largest root of x^2-3x+1
}

TEST_CASE("one-step matrices", "[transfer]") {
    const Sl2 r = step_matrix(0.0, 0.0);
    CHECK(r.a == 0.0);
    CHECK(r.b == -1.0);
    CHECK(r.c == 1.0);
    CHECK(r.d == 0.0);
    const Sl2 m = step_matrix(3.0, 1.0);
    CHECK(m.a == 2.0);
    CHECK(m.b == -1.0);
    for (double e : {-2.0, 0.3, 5.0})
        for (double v : {-1.0, 0.0, 2.5}) CHECK(step_matrix(e, v).det() == 1.0);
}

TEST_CASE("cocycle products: rotations and the constant-potential oracle", "[transfer]") {
    const auto atom = SiteDistribution::point_mass(0.0);
    const auto path = sample_path(atom, 1, 0, 1, 200);
    SECTION("n = 1 is the step matrix, normalized") {
        const auto p = cocycle_product(0.0, path, 1);
        CHECK(p.matrix.max_abs() == 1.0);
        CHECK_THAT(p.log_norm(), Catch::Matchers::WithinAbs(0.0, 1e-14));
    }
    SECTION("quarter rotation to the fourth power is the identity") {
        const auto p = cocycle_product(0.0, path, 4);
        CHECK_THAT(p.log_norm(), Catch::Matchers::WithinAbs(0.0, 1e-13));
        CHECK_THAT(std::abs(p.matrix.a), Catch::Matchers::WithinAbs(1.0, 1e-14));
        CHECK_THAT(p.matrix.b, Catch::Matchers::WithinAbs(0.0, 1e-14));
    }
    SECTION("E = 3 grows at the constant-matrix spectral radius") {
        // the finite-n bias is log of the spectral projector norm over n,
        // about 0.294/n, so n = 1000 sits inside the 1e-3 window
        const auto long_path = sample_path(atom, 1, 0, 1, 1000);
        const auto p = cocycle_product(3.0, long_path, 1000);
        CHECK_THAT(p.log_norm() / 1000.0, Catch::Matchers::WithinAbs(kGammaE3, 1e-3));
    }
    SECTION("window too short is an error") {
        REQUIRE_THROWS_AS(cocycle_product(1.0, path, 500), std::invalid_argument);
    }
}

TEST_CASE("determinant preservation under renormalized products", "[transfer]") {
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    SECTION("elliptic products at n = 1e6, direct") {
        const auto path = sample_path(SiteDistribution::point_mass(0.0), 2, 0, 1, 1000000);
        const auto p = cocycle_product(1.0, path, 1000000);
        CHECK(std::abs(std::exp(p.log_det()) - 1.0) < 1e-6);
    }
    SECTION("hyperbolic products, QR-factored log det at n = 1e6") {
        const auto path = sample_path(bern, 3, 0, 1, 1000000);
        CHECK(std::abs(cocycle_log_det(3.2, path, 1000000)) < 1e-6);
    }
    SECTION("moderate hyperbolic, direct") {
        const auto path = sample_path(bern, 4, 0, 1, 64);
        const auto p = cocycle_product(2.8, path, 18);
        CHECK(std::abs(std::exp(p.log_det()) - 1.0) < 1e-6);
    }
}

TEST_CASE("norm never drops below 1", "[transfer]") {
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    for (double e : {-1.0, 0.0, 0.5, 2.0}) {
        const auto path = sample_path(bern, 5, 1, 1, 3000);
        for (std::int64_t n : {10, 100, 3000})
            CHECK(cocycle_product(e, path, n).log_norm() >= -1e-12);
    }
}

TEST_CASE("Kingman subadditivity on sampled splits", "[transfer]") {
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t n = 50 + 37 * trial;
        const std::int64_t m = 80 + 21 * trial;
        const double e = -2.0 + 0.2 * trial;
        const auto path = sample_path(bern, 6, static_cast<std::uint64_t>(trial), 1, n + m);
        const double g_nm = cocycle_product(e, path, n + m).log_norm();
        const double g_n = cocycle_product(e, path, n).log_norm();
        ScaledProduct tail;
        for (std::int64_t k = n + 1; k <= n + m; ++k) tail.push(step_matrix(e, path.at(k)));
        tail.renormalize();
        CHECK(g_nm <= g_n + tail.log_norm() + 1e-9);
    }
}

TEST_CASE("Lyapunov estimates against closed forms", "[transfer]") {
    const auto atom = SiteDistribution::point_mass(0.0);
    SECTION("constant potential, hyperbolic energies: arccosh(|E|/2)") {
        for (double e : {2.5, 3.0, 4.0}) {
            const auto est = lyapunov_estimate(atom, e, 100000, 4, 11);
            const double target = std::acosh(e / 2.0);
            CHECK(est.stderr_gamma < 1e-14);  // constant paths
            CHECK(std::abs(est.gamma - target) < 3.0 * est.stderr_gamma + 2.0 / 100000.0);
        }
    }
    SECTION("constant potential, elliptic energy: zero exponent") {
        const auto est = lyapunov_estimate(atom, 1.0, 100000, 2, 11);
        CHECK(est.gamma >= 0.0);
        CHECK(est.gamma <= 0.01);
    }
    SECTION("Bernoulli disorder at E = 0 is positive at 5 sigma") {
        const auto est = lyapunov_estimate(SiteDistribution::bernoulli(0.0, 1.0), 0.0, 20000, 32, 12);
        CHECK(est.gamma > 5.0 * est.stderr_gamma);
    }
}

TEST_CASE("Oseledec directions", "[transfer]") {
    SECTION("diagonal products contract e2") {
        ScaledProduct p;
        for (int i = 0; i < 40; ++i) p.push(Sl2::diag(2.0, 0.5));
        p.renormalize();
        const auto s = svd2(p.matrix);
        CHECK_THAT(s.theta_min, Catch::Matchers::WithinAbs(std::acos(-1.0) / 2.0, 1e-12));
    }
    SECTION("rotation-only products are flagged unconverged") {
        const auto path = sample_path(SiteDistribution::point_mass(0.0), 7, 0, 1, 500);
        const auto d = oseledec_direction(0.0, path, 500);
        CHECK_FALSE(d.converged);
    }
    SECTION("successive directions are Cauchy at the geometric rate") {
        const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
        const auto gamma = lyapunov_estimate(bern, 0.0, 20000, 16, 13).gamma;
        const auto n = static_cast<std::int64_t>(20.0 / gamma);
        const auto path = sample_path(bern, 14, 0, 1, 2 * n);
        const auto d1 = oseledec_direction(0.0, path, n);
        const auto d2 = oseledec_direction(0.0, path, 2 * n);
        REQUIRE(d1.converged);
        REQUIRE(d2.converged);
        double diff = std::abs(d1.theta - d2.theta);
        diff = std::min(diff, std::acos(-1.0) - diff);  // distance on P^1
        CHECK(diff <= 10.0 * std::exp(-gamma * static_cast<double>(n)));
    }
}

TEST_CASE("adjoint alignment with the top singular direction", "[transfer]") {
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    const auto path = sample_path(bern, 15, 0, 1, 10000);
    const auto p = cocycle_product(0.5, path, 10000);
    REQUIRE(p.log_norm() > std::log(10.0));
    const Sl2 mt = p.matrix.transpose();
    const auto left = svd2(mt);  // directions of M M^T: left singular frame
    const double sigma1 = p.matrix.norm2();
    for (int t = 0; t < 10; ++t) {
        const double phi = 0.31 * (t + 1);
        const double wx = std::cos(phi), wy = std::sin(phi);
        const auto mw = mt.apply(wx, wy);
        const double ratio = std::hypot(mw[0], mw[1]) / sigma1;
        const double overlap =
            std::abs(wx * std::cos(left.theta_max) + wy * std::sin(left.theta_max));
        CHECK_THAT(ratio, Catch::Matchers::WithinAbs(overlap, 1e-3));
    }
}

TEST_CASE("solution growth slopes realize the Oseledec dichotomy", "[transfer]") {
    const auto bern = SiteDistribution::bernoulli(0.0, 1.0);
    const double e = 2.5;
    const auto gamma = lyapunov_estimate(bern, e, 100000, 16, 16).gamma;
    REQUIRE(gamma > 0.1);
    SECTION("generic directions grow at +gamma") {
        const auto path = sample_path(bern, 17, 0, 1, 10000);
        for (double phi : {0.3, 1.1, 2.2}) {
            const auto g = solution_growth(e, path, {std::cos(phi), std::sin(phi)}, 10000);
            CHECK(std::abs(g.slope_last_half - gamma) < 0.1 * gamma);
        }
    }
    SECTION("the contracting direction decays at -gamma (backward-stable route)") {
        const auto path = sample_path(bern, 17, 0, 1, 11000);
        const auto prof = decaying_profile(e, path, 10000, 600);
        CHECK(std::abs(prof.slope_last_half + gamma) < 0.15 * gamma);
        // and it agrees with the SVD-extracted contracting direction
        const auto d = oseledec_direction(e, path, 10000);
        REQUIRE(d.converged);
        double diff = std::abs(prof.theta - d.theta);
        diff = std::min(diff, std::acos(-1.0) - diff);
        CHECK(diff < 1e-8);
    }
    SECTION("zero initial vector is rejected") {
        const auto path = sample_path(bern, 17, 0, 1, 100);
        REQUIRE_THROWS_AS(solution_growth(e, path, {0.0, 0.0}, 100), std::invalid_argument);
    }
    SECTION("forward iteration from the contracting direction decays until the noise floor") {
        const auto path = sample_path(bern, 17, 0, 1, 11000);
        const auto prof = decaying_profile(e, path, 10000, 600);
        const std::int64_t n_small = static_cast<std::int64_t>(6.0 / gamma);
        const auto g = solution_growth(e, path, {std::cos(prof.theta), std::sin(prof.theta)},
                                       n_small);
        CHECK(g.points.back().log_norm < 0.0);  // still decaying this shallow
    }
}

TEST_CASE("in-band constant potential slope is flat", "[transfer]") {
    const auto path = sample_path(SiteDistribution::point_mass(0.0), 18, 0, 1, 4000);
    const auto g = solution_growth(1.0, path, {0.6, 0.8}, 4000);
    CHECK(std::abs(g.slope_last_half) < 0.02);
}
