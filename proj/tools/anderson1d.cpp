// Command-line laboratory for one-dimensional random Schrodinger operators:
// Lyapunov exponents, Furstenberg invariant measures, finite-volume spectra,
// dynamical-localization moments, rank-one spectral averaging, and the
// Kunz-Souillard integral operators.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "anderson1d/checks.hpp"
#include "anderson1d/config.hpp"
#include "anderson1d/dynamics.hpp"
#include "anderson1d/ks_analysis.hpp"
#include "anderson1d/projective.hpp"
#include "anderson1d/rank_one.hpp"
#include "anderson1d/report.hpp"
#include "anderson1d/spectra.hpp"
#include "anderson1d/transfer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUnconverged = 3;

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty() || path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw anderson::ConfigError("cannot open output file: " + path);
    out << payload;
}

anderson::ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw anderson::ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return anderson::ExperimentConfig::parse(buf.str());
}

int run_lyapunov(const anderson::ExperimentConfig& cfg, const std::string& out_path) {
    using namespace anderson;
    const auto dist = cfg.make_distribution();
    const auto grid = parse_energy_grid(cfg.get("lyapunov", "energy_grid", "-3:3:0.25"));
    const auto steps = cfg.get_int("lyapunov", "steps", 10000);
    const auto reals = cfg.get_int("lyapunov", "realizations", 16);
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("lyapunov", "seed", 1));
    if (steps < 1000) throw ConfigError("field lyapunov.steps: must be >= 1000");
    if (reals < 1) throw ConfigError("field lyapunov.realizations: must be >= 1");
    std::string payload = csv_preamble("lyapunov", "E,gamma,stderr,n,R", cfg.hash_hex());
    for (double e : grid) {
        const auto est = lyapunov_estimate(dist, e, steps, static_cast<int>(reals), seed);
        payload += csv_row({fmt_g(e), fmt_g(est.gamma), fmt_g(est.stderr_gamma),
                            std::to_string(est.steps), std::to_string(est.realizations)});
    }
    write_output(out_path, payload);
    return kExitOk;
}

int run_furstenberg(const anderson::ExperimentConfig& cfg, const std::string& out_path) {
    using namespace anderson;
    const auto dist = cfg.make_distribution();
    const int G = static_cast<int>(cfg.get_int("furstenberg", "grid", 2048));
    const double tol = cfg.get_real("furstenberg", "tol", 1e-10);
    const int max_iter = static_cast<int>(cfg.get_int("furstenberg", "max_iter", 20000));
    const double energy = cfg.get_real("furstenberg", "energy", 0.0);
    const int quad = static_cast<int>(cfg.get_int("furstenberg", "quad_points", 64));
    if (G < 64) throw ConfigError("field furstenberg.grid: must be >= 64");
    if (max_iter < 1) throw ConfigError("field furstenberg.max_iter: must be >= 1");
    const auto md = MatrixDistribution::anderson(dist, energy, quad);
    const auto res = invariant_measure(md, G, tol, max_iter);
    nlohmann::json j;
    j["config_hash"] = cfg.hash_hex();
    j["energy"] = energy;
    j["grid"] = G;
    j["gamma"] = furstenberg_gamma(md, res.measure);
    j["residual"] = res.residual;
    j["max_bin_weight"] = res.measure.max_bin_weight();
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    write_output(out_path, j.dump(2) + "\n");
    return res.converged ? kExitOk : kExitUnconverged;
}

int run_spectrum(const anderson::ExperimentConfig& cfg, const std::string& out_path) {
    using namespace anderson;
    const auto dist = cfg.make_distribution();
    const int L = static_cast<int>(cfg.get_int("spectrum", "L", 100));
    const int reals = static_cast<int>(cfg.get_int("spectrum", "realizations", 10));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("spectrum", "seed", 1));
    if (L < 20) throw ConfigError("field spectrum.L: must be >= 20");
    if (reals < 1) throw ConfigError("field spectrum.realizations: must be >= 1");
    std::string payload = csv_preamble("spectrum", "realization,k,E,gamma,center,r2", cfg.hash_hex());
    for (const auto& row : localization_census(dist, L, reals, seed))
        payload += csv_row({std::to_string(row.realization), std::to_string(row.k),
                            fmt_g(row.energy), fmt_g(row.rate), std::to_string(row.center),
                            fmt_g(row.r_squared)});
    write_output(out_path, payload);
    return kExitOk;
}

int run_dynlocal(const anderson::ExperimentConfig& cfg, const std::string& out_path) {
    using namespace anderson;
    const auto dist = cfg.make_distribution();
    const int L = static_cast<int>(cfg.get_int("dynlocal", "L", 6));
    const int m_max = static_cast<int>(cfg.get_int("dynlocal", "m_max", 4));
    const int reals = static_cast<int>(cfg.get_int("dynlocal", "realizations", 1000));
    const int n_site = static_cast<int>(cfg.get_int("dynlocal", "n_site", 0));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("dynlocal", "seed", 1));
    if (L < 1) throw ConfigError("field dynlocal.L: must be >= 1");
    if (m_max < 0 || m_max > L) throw ConfigError("field dynlocal.m_max: need 0 <= m_max <= L");
    if (reals < 2) throw ConfigError("field dynlocal.realizations: must be >= 2");
    const auto t_grid = default_t_grid();
    std::string payload =
        csv_preamble("dynlocal", "m,rho_mean,rho_stderr,sup_sampled_mean", cfg.hash_hex());
    for (int m = 0; m <= m_max; ++m) {
        const auto est = rho_L_monte_carlo(dist, L, m, n_site, reals, seed);
        double sup_mean = 0.0;
        for (int r = 0; r < reals; ++r) {
            const auto path = sample_path(dist, seed, static_cast<std::uint64_t>(r), -L, L);
            sup_mean += sup_correlator_sampled(diagonalize(build_hamiltonian(path)), m, n_site, t_grid);
        }
        sup_mean /= reals;
        payload += csv_row({std::to_string(m), fmt_g(est.value), fmt_g(est.stderr_value),
                            fmt_g(sup_mean)});
    }
    write_output(out_path, payload);
    return kExitOk;
}

int run_spectral_avg(const anderson::ExperimentConfig& cfg, const std::string& out_path) {
    using namespace anderson;
    const auto dist = cfg.make_distribution();
    const int size = static_cast<int>(cfg.get_int("spectral_avg", "size", 21));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("spectral_avg", "seed", 1));
    const double lambda_max = cfg.get_real("spectral_avg", "lambda_max", 50.0);
    const auto z_parts = ExperimentConfig::parse_flat_list(cfg.get("spectral_avg", "z", "0.5,1"));
    if (size < 1 || size % 2 == 0) throw ConfigError("field spectral_avg.size: odd size required");
    if (z_parts.size() != 2 || z_parts[1] == 0.0)
        throw ConfigError("field spectral_avg.z: expected re,im with im != 0");
    const int L = size / 2;
    const auto path = sample_path(dist, seed, 0, -L, L);
    const auto h = build_hamiltonian(path);
    const auto res = spectral_average_check(h, 0, {z_parts[0], z_parts[1]}, lambda_max);
    nlohmann::json j;
    j["config_hash"] = cfg.hash_hex();
    j["integral_re"] = res.integral.real();
    j["integral_im"] = res.integral.imag();
    j["target_re"] = res.target.real();
    j["target_im"] = res.target.imag();
    j["defect"] = res.defect;
    j["tail_magnitude"] = res.tail_magnitude;
    j["evaluations"] = res.evaluations;
    write_output(out_path, j.dump(2) + "\n");
    return res.defect < 1e-6 ? kExitOk : kExitUnconverged;
}

int run_ks(const anderson::ExperimentConfig& cfg, const std::string& out_path,
           const std::string& norm_path) {
    using namespace anderson;
    const auto dist = cfg.make_distribution();
    const int L = static_cast<int>(cfg.get_int("ks", "L", 6));
    const int m_max = static_cast<int>(cfg.get_int("ks", "m_max", 4));
    const int grid_n = static_cast<int>(cfg.get_int("ks", "grid_N", 16384));
    const double grid_x = cfg.get_real("ks", "grid_X", 64.0);
    const int e_points = static_cast<int>(cfg.get_int("ks", "e_points", 64));
    const int mc_reals = static_cast<int>(cfg.get_int("ks", "mc_realizations", 2000));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("ks", "seed", 1));
    if (m_max < 1 || m_max > L) throw ConfigError("field ks.m_max: need 1 <= m_max <= L");
    if (e_points < 2) throw ConfigError("field ks.e_points: must be >= 2");
    const RealGrid grid(grid_x, grid_n);
    const auto rho = rho_operator_with_budget(dist, L, m_max, e_points, grid);
    std::string payload =
        csv_preamble("ks", "m,rho_operator,rho_mc,mc_stderr,budget", cfg.hash_hex());
    for (int m = 1; m <= m_max; ++m) {
        const auto mc = rho_L_monte_carlo(dist, L, m, 0, mc_reals, seed);
        payload += csv_row({std::to_string(m), fmt_g(rho.values[m - 1]), fmt_g(mc.value),
                            fmt_g(mc.stderr_value), fmt_g(rho.budgets[m - 1])});
    }
    write_output(out_path, payload);

    const auto rep = norm_certify(dist, e_points, grid);
    nlohmann::json j;
    j["config_hash"] = cfg.hash_hex();
    j["sup_t0_norm_1_to_1"] = rep.sup_t0_11;
    j["sup_t0_norm_1_to_2"] = rep.sup_t0_12;
    j["sup_t1_norm_2_to_2"] = rep.sup_t1_22;
    j["sup_t1sq_norm_2_to_2"] = rep.sup_t1sq_22;
    j["delta"] = rep.delta;
    j["delta_doubled_grid"] = rep.delta_doubled;
    j["budget"] = rep.budget;
    j["converged"] = rep.converged;
    write_output(norm_path.empty() ? out_path : norm_path, j.dump(2) + "\n");
    return rep.converged ? kExitOk : kExitUnconverged;
}

int run_check() {
    const auto results = anderson::run_invariant_checks();
    bool all = true;
    for (const auto& r : results) {
        std::printf("%s %s (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all = all && r.passed;
    }
    return all ? kExitOk : kExitUnconverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for 1D discrete random Schrodinger operators"};
    app.require_subcommand(1);
    app.fallthrough();  // global --config/--output may follow the subcommand

    std::string config_path, out_path, norm_path;
    app.add_option("--config", config_path, "experiment config file (key = value, [sections])");
    app.add_option("--output", out_path, "output path; '-' or empty for stdout");

    // Per-subcommand overrides are applied onto the config before running.
    struct Override {
        std::string section, key, value;
    };
    std::vector<Override> overrides;
    const auto add_override = [&overrides](CLI::App* sub, const std::string& flag,
                                           const std::string& section, const std::string& key,
                                           const std::string& help) {
        auto cb = [&overrides, section, key](const std::string& v) {
            overrides.push_back({section, key, v});
        };
        sub->add_option_function<std::string>(flag, cb, help);
    };

    auto* lyap = app.add_subcommand("lyapunov", "direct cocycle Lyapunov exponents over an energy grid");
    add_override(lyap, "--energy-grid", "lyapunov", "energy_grid", "a:b:step");
    add_override(lyap, "--steps", "lyapunov", "steps", "cocycle length n");
    add_override(lyap, "--realizations", "lyapunov", "realizations", "independent paths");
    add_override(lyap, "--seed", "lyapunov", "seed", "RNG seed");

    auto* furst = app.add_subcommand("furstenberg", "invariant measure and the exponent formula");
    add_override(furst, "--grid", "furstenberg", "grid", "projective bins G");
    add_override(furst, "--tol", "furstenberg", "tol", "TV tolerance");
    add_override(furst, "--max-iter", "furstenberg", "max_iter", "iteration cap");
    add_override(furst, "--energy", "furstenberg", "energy", "energy E");

    auto* spec = app.add_subcommand("spectrum", "finite-volume eigenvector decay census");
    add_override(spec, "--L", "spectrum", "L", "half width");
    add_override(spec, "--realizations", "spectrum", "realizations", "realizations");
    add_override(spec, "--seed", "spectrum", "seed", "RNG seed");

    auto* dyn = app.add_subcommand("dynlocal", "eigenfunction correlator moments");
    add_override(dyn, "--L", "dynlocal", "L", "half width");
    add_override(dyn, "--m-max", "dynlocal", "m_max", "largest offset m");
    add_override(dyn, "--realizations", "dynlocal", "realizations", "realizations");
    add_override(dyn, "--seed", "dynlocal", "seed", "RNG seed");

    auto* sav = app.add_subcommand("spectral-avg", "rank-one spectral averaging identity");
    add_override(sav, "--size", "spectral_avg", "size", "matrix size (odd)");
    add_override(sav, "--seed", "spectral_avg", "seed", "RNG seed");
    add_override(sav, "--z", "spectral_avg", "z", "re,im");
    add_override(sav, "--lambda-max", "spectral_avg", "lambda_max", "quadrature window");

    auto* ks = app.add_subcommand("ks", "Kunz-Souillard operator route and norm certificates");
    add_override(ks, "--L", "ks", "L", "half width");
    add_override(ks, "--m-max", "ks", "m_max", "largest offset m");
    add_override(ks, "--grid-N", "ks", "grid_N", "grid points");
    add_override(ks, "--grid-X", "ks", "grid_X", "grid half width");
    add_override(ks, "--e-points", "ks", "e_points", "energy quadrature points");
    ks->add_option("--norm-output", norm_path, "norm report path (JSON)");

    auto* chk = app.add_subcommand("check", "run the full invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        anderson::ExperimentConfig cfg = load_config(config_path);
        for (const auto& o : overrides) cfg.set(o.section, o.key, o.value);
        if (lyap->parsed()) return run_lyapunov(cfg, out_path);
        if (furst->parsed()) return run_furstenberg(cfg, out_path);
        if (spec->parsed()) return run_spectrum(cfg, out_path);
        if (dyn->parsed()) return run_dynlocal(cfg, out_path);
        if (sav->parsed()) return run_spectral_avg(cfg, out_path);
        if (ks->parsed()) return run_ks(cfg, out_path, norm_path);
        if (chk->parsed()) return run_check();
    } catch (const anderson::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUnconverged;
    }
    return kExitValidation;
}
