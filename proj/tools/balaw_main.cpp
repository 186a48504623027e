// Command-line driver: every subcommand reads a JSON config and writes CSV
// or JSON artifacts into the output directory. Exit codes: 0 success,
// 1 usage or config error, 2 failed verification.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "balaw/balance_solver.hpp"
#include "balaw/config_json.hpp"
#include "balaw/csv.hpp"
#include "balaw/flux_model.hpp"
#include "balaw/grid_solution.hpp"
#include "balaw/kinetic_geometry.hpp"
#include "balaw/matrix_decomp.hpp"
#include "balaw/regularity_estimator.hpp"
#include "balaw/verify.hpp"

namespace {

using balaw::cfg::json;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 2026;
    int threads = 1;
};

std::string out_path(const GlobalOpts& g, const std::string& name) {
    std::filesystem::create_directories(g.out_dir);
    return (std::filesystem::path(g.out_dir) / name).string();
}

json need_config(const GlobalOpts& g) {
    if (g.config_path.empty()) throw balaw::config_error("missing --config <path>");
    return balaw::cfg::load_file(g.config_path);
}

balaw::GridSolution load_solution(const json& j) {
    auto path = balaw::cfg::require<std::string>(j, "solution");
    if (!std::filesystem::exists(path))
        throw balaw::config_error("solution file not found: " + path);
    return balaw::io::read_solution(path);
}

int run_flux_report(const GlobalOpts& g) {
    auto j = need_config(g);
    auto flux = balaw::cfg::parse_flux(j.at("flux"));
    int n_dirs = balaw::cfg::optional<int>(j, "n_directions", 8 * flux.dim());
    std::vector<double> deltas;
    if (j.contains("delta_grid")) {
        deltas = balaw::cfg::require<std::vector<double>>(j, "delta_grid");
    } else {
        for (int i = 0; i < 25; ++i) deltas.push_back(1e-4 * std::pow(1e3, i / 24.0));
    }
    auto rep = balaw::fit_alpha(flux, n_dirs, deltas, g.seed, g.threads);

    balaw::CsvWriter csv(out_path(g, "flux_report.csv"),
                         {"direction", "component", "value"});
    for (std::size_t i = 0; i < rep.directions.size(); ++i)
        for (std::size_t c = 0; c < rep.directions[i].size(); ++c)
            csv.row({balaw::CsvWriter::num(static_cast<int>(i)),
                     balaw::CsvWriter::num(static_cast<int>(c)),
                     balaw::CsvWriter::num(rep.directions[i][c])});

    balaw::CsvWriter mcsv(out_path(g, "flux_measures.csv"),
                          {"direction", "delta", "measure"});
    for (std::size_t i = 0; i < rep.directions.size(); ++i)
        for (std::size_t k = 0; k < rep.deltas.size(); ++k)
            mcsv.row({balaw::CsvWriter::num(static_cast<int>(i)),
                      balaw::CsvWriter::num(rep.deltas[k]),
                      balaw::CsvWriter::num(rep.measures[i][k])});

    json out{{"alpha", rep.alpha},
             {"constant", rep.constant},
             {"conclusive", rep.conclusive},
             {"n_directions", rep.directions.size()}};
    std::ofstream(out_path(g, "flux_report.json")) << out.dump(2) << '\n';
    std::cout << "alpha = " << balaw::format_double(rep.alpha)
              << ", C = " << balaw::format_double(rep.constant) << '\n';
    return rep.conclusive ? 0 : 2;
}

int run_decompose(const GlobalOpts& g) {
    auto j = need_config(g);
    auto flux = balaw::cfg::parse_flux(j.at("flux"));
    double v = balaw::cfg::require<double>(j, "v");
    double h = balaw::cfg::require<double>(j, "h");
    auto a = balaw::cfg::require<std::vector<double>>(j, "a");
    auto variant = balaw::cfg::optional<std::string>(j, "variant", "improved");

    balaw::Decomposition dec;
    if (variant == "improved") {
        dec = balaw::decompose_improved(flux, v, h, a);
    } else if (variant == "general") {
        double alpha = balaw::cfg::optional<double>(j, "alpha", 1.0 / flux.dim());
        dec = balaw::decompose_general(flux, v, h, a, alpha);
    } else {
        throw balaw::config_error("bad value for key 'variant': expected improved or general");
    }

    json out{{"variant", variant},
             {"nodes", dec.nodes},
             {"coefficients", dec.coeffs},
             {"residual", dec.residual},
             {"bound_ratio", dec.bound_ratio},
             {"condition", dec.condition},
             {"coefficient_sum", dec.coeff_sum}};
    std::ofstream(out_path(g, "decomposition.json")) << out.dump(2) << '\n';
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_h_certify(const GlobalOpts& g) {
    auto j = need_config(g);
    int d = balaw::cfg::require<int>(j, "d");
    std::vector<double> hs;
    if (j.contains("h_list")) {
        hs = balaw::cfg::require<std::vector<double>>(j, "h_list");
    } else {
        int k_max = balaw::cfg::optional<int>(j, "h_dyadic_max", 12);
        for (int k = 0; k <= k_max; ++k) hs.push_back(std::ldexp(1.0, -k));
    }

    balaw::CsvWriter csv(out_path(g, "h_certify.csv"), {"h", "norm", "product"});
    for (const auto& r : balaw::inverse_norm_certificate(d, hs))
        csv.row({balaw::CsvWriter::num(r.h), balaw::CsvWriter::num(r.norm),
                 balaw::CsvWriter::num(r.product)});
    return 0;
}

int run_solve(const GlobalOpts& g) {
    auto j = need_config(g);
    balaw::SolverConfig cfg;
    cfg.flux = balaw::cfg::parse_flux(j.at("flux"));
    cfg.d = cfg.flux.dim();
    auto cells = balaw::cfg::require<std::vector<int>>(j, "cells");
    if (static_cast<int>(cells.size()) != cfg.d)
        throw balaw::config_error("bad value for key 'cells': need one entry per dimension");
    for (int a = 0; a < cfg.d; ++a) cfg.cells[a] = cells[a];
    auto extent = balaw::cfg::optional<std::vector<double>>(j, "extent",
                                                            std::vector<double>(cfg.d, 1.0));
    for (int a = 0; a < cfg.d; ++a) cfg.extent[a] = extent[a];
    cfg.cfl = balaw::cfg::optional<double>(j, "cfl", 0.45);
    cfg.output_times = balaw::cfg::require<std::vector<double>>(j, "output_times");
    cfg.threads = g.threads;

    auto init = j.at("initial");
    auto init_kind = balaw::cfg::require<std::string>(init, "kind");
    if (init_kind == "constant") {
        double c = balaw::cfg::require<double>(init, "value");
        cfg.initial = [c](std::span<const double>) { return c; };
    } else if (init_kind == "sine") {
        double mean = balaw::cfg::require<double>(init, "mean");
        double amp = balaw::cfg::require<double>(init, "amplitude");
        int freq = balaw::cfg::optional<int>(init, "frequency", 1);
        int d = cfg.d;
        cfg.initial = [mean, amp, freq, d](std::span<const double> x) {
            double s = 1.0;
            for (int a = 0; a < d; ++a) s *= std::sin(2.0 * M_PI * freq * x[a]);
            return mean + amp * s;
        };
    } else if (init_kind == "table") {
        auto values = balaw::cfg::require<std::vector<double>>(init, "values");
        auto shape = cfg.cells;
        int d = cfg.d;
        auto ext = cfg.extent;
        std::size_t need = 1;
        for (int a = 0; a < d; ++a) need *= static_cast<std::size_t>(shape[a]);
        if (values.size() != need)
            throw balaw::config_error("bad value for key 'values': expected " +
                                      std::to_string(need) + " samples");
        cfg.initial = [values, shape, d, ext](std::span<const double> x) {
            std::size_t lin = 0;
            for (int a = 0; a < d; ++a) {
                double dx = ext[a] / shape[a];
                int i = std::clamp(static_cast<int>(x[a] / dx), 0, shape[a] - 1);
                lin = lin * shape[a] + static_cast<std::size_t>(i);
            }
            return values[lin];
        };
    } else {
        throw balaw::config_error("unknown initial kind: " + init_kind);
    }

    if (j.contains("source")) {
        auto src = j.at("source");
        auto src_kind = balaw::cfg::require<std::string>(src, "kind");
        if (src_kind == "constant") {
            double c = balaw::cfg::require<double>(src, "value");
            cfg.source = [c](double, std::span<const double>) { return c; };
        } else if (src_kind != "zero") {
            throw balaw::config_error("unknown source kind: " + src_kind);
        }
    }

    auto sol = balaw::solve(cfg);
    std::string bin = out_path(g, "solution.bin");
    balaw::io::write_solution(bin, sol);

    json manifest{{"format", "balaw-solution"},
                  {"version", 1},
                  {"d", sol.d},
                  {"shape", std::vector<int>(sol.shape.begin(), sol.shape.begin() + sol.d)},
                  {"extent", std::vector<double>(sol.extent.begin(), sol.extent.begin() + sol.d)},
                  {"dx", sol.dx},
                  {"times", sol.times},
                  {"data_file", "solution.bin"}};
    std::ofstream(out_path(g, "solution.json")) << manifest.dump(2) << '\n';

    balaw::CsvWriter csv(out_path(g, "slices.csv"), {"slice", "time"});
    for (std::size_t k = 0; k < sol.times.size(); ++k)
        csv.row({balaw::CsvWriter::num(static_cast<int>(k)),
                 balaw::CsvWriter::num(sol.times[k])});
    std::cout << "wrote " << bin << " (" << sol.times.size() << " slices)\n";
    return 0;
}

int run_kinetic_verify(const GlobalOpts& g) {
    auto j = need_config(g);
    auto sol = load_solution(j);
    auto flux = balaw::cfg::parse_flux(j.at("flux"));
    double t0 = balaw::cfg::require<double>(j, "t0");
    double T = balaw::cfg::require<double>(j, "T");
    double g_bound = balaw::cfg::require<double>(j, "g_bound");

    balaw::CsvWriter csv(out_path(g, "kinetic_verify.csv"), {"lhs", "rhs", "pass"});
    bool all_pass = true;
    for (const auto& jb : j.at("boxes")) {
        balaw::KineticBox box;
        auto center = balaw::cfg::require<std::vector<double>>(jb, "center");
        for (int a = 0; a < sol.d; ++a) box.center[a] = center.at(a);
        box.r = balaw::cfg::require<double>(jb, "r");
        box.v0 = balaw::cfg::require<double>(jb, "v0");
        box.omega = balaw::cfg::require<double>(jb, "omega");
        auto chk = balaw::verify_transport_estimate(sol, flux, t0, box, T, g_bound);
        csv.row({balaw::CsvWriter::num(chk.lhs), balaw::CsvWriter::num(chk.rhs),
                 chk.pass ? "1" : "0"});
        all_pass = all_pass && chk.pass;
    }
    std::cout << (all_pass ? "all boxes pass\n" : "some boxes FAIL\n");
    return all_pass ? 0 : 2;
}

int run_hprofile(const GlobalOpts& g) {
    auto j = need_config(g);
    auto sol = load_solution(j);
    int t_index = balaw::cfg::optional<int>(j, "time_index", 0);
    auto radii = balaw::cfg::require<std::vector<double>>(j, "radii");
    auto geom = balaw::cfg::parse_geometry(j, "geometry", balaw::Geometry::cube);
    auto centers = balaw::cfg::require<std::vector<std::vector<double>>>(j, "centers");

    // One row block per center; inconclusive fits carry NaN in the fitted
    // columns.
    balaw::CsvWriter csv(out_path(g, "hprofile.csv"), {"r", "h_r", "gamma_hat", "c_hat"});
    for (const auto& c : centers) {
        if (static_cast<int>(c.size()) != sol.d)
            throw balaw::config_error("bad value for key 'centers': dimension mismatch");
        auto prof = balaw::oscillation_profile(sol, t_index, c, radii, geom);
        for (std::size_t i = 0; i < prof.radii.size(); ++i)
            csv.row({balaw::CsvWriter::num(prof.radii[i]),
                     balaw::CsvWriter::num(prof.values[i]),
                     balaw::CsvWriter::num(prof.gamma_hat),
                     balaw::CsvWriter::num(prof.c_hat)});
    }
    return 0;
}

int run_bootstrap(const GlobalOpts& g) {
    auto j = need_config(g);
    int d = balaw::cfg::require<int>(j, "d");
    auto variant = balaw::cfg::parse_variant(balaw::cfg::require<std::string>(j, "variant"));
    double alpha = balaw::cfg::optional<double>(j, "alpha", 1.0 / d);
    double tol = balaw::cfg::optional<double>(j, "tol", 1e-13);
    double g_norm = balaw::cfg::optional<double>(j, "g_norm", 0.0);

    auto sched = balaw::bootstrap_iterate(d, alpha, tol, variant, g_norm);
    balaw::CsvWriter csv(out_path(g, "bootstrap.csv"), {"n", "gamma_n", "c_n"});
    for (std::size_t n = 0; n < sched.gammas.size(); ++n)
        csv.row({balaw::CsvWriter::num(static_cast<int>(n)),
                 balaw::CsvWriter::num(sched.gammas[n]),
                 balaw::CsvWriter::num(n < sched.constants.size()
                                           ? sched.constants[n]
                                           : std::numeric_limits<double>::quiet_NaN())});
    std::cout << "limit " << balaw::format_double(sched.limit) << ", reached "
              << balaw::format_double(sched.gammas.back()) << " in " << sched.iterations
              << " iterations\n";
    return sched.converged ? 0 : 2;
}

int run_holder_check(const GlobalOpts& g) {
    auto j = need_config(g);
    auto sol = load_solution(j);
    int t_index = balaw::cfg::optional<int>(j, "time_index", 0);
    double gamma = balaw::cfg::require<double>(j, "gamma");
    int pairs = balaw::cfg::optional<int>(j, "pairs", 4000);
    double seminorm = balaw::empirical_holder(sol, t_index, gamma, pairs, g.seed);
    balaw::CsvWriter csv(out_path(g, "holder_check.csv"), {"gamma", "seminorm"});
    csv.row({balaw::CsvWriter::num(gamma), balaw::CsvWriter::num(seminorm)});
    std::cout << "seminorm " << balaw::format_double(seminorm) << '\n';
    return 0;
}

int run_verify_all(const GlobalOpts& g) {
    balaw::VerifyOptions opt;
    opt.seed = g.seed;
    opt.threads = g.threads;
    auto results = balaw::verify_all(opt);
    balaw::CsvWriter csv(out_path(g, "verify_all.csv"), {"check", "pass", "detail"});
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name;
        if (!r.detail.empty()) std::cout << "  [" << r.detail << "]";
        std::cout << '\n';
        csv.row({r.name, r.pass ? "1" : "0", r.detail});
        all = all && r.pass;
    }
    std::cout << (all ? "verify-all: all checks passed\n" : "verify-all: FAILURES\n");
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"balance-law regularity toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON configuration file");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "seed for randomized sampling");
    app.add_option("--threads", g.threads, "worker threads");

    auto* flux_report = app.add_subcommand("flux-report", "fit the sub-level exponent");
    auto* decompose = app.add_subcommand("decompose", "derivative-increment decomposition");
    auto* h_certify = app.add_subcommand("h-certify", "inverse node-matrix norm table");
    auto* solve = app.add_subcommand("solve", "run the finite-volume solver");
    auto* kinetic = app.add_subcommand("kinetic-verify", "transport estimate on a solution");
    auto* hprofile = app.add_subcommand("hprofile", "multiscale oscillation profiles");
    auto* bootstrap = app.add_subcommand("bootstrap", "exponent iteration schedule");
    auto* holder = app.add_subcommand("holder-check", "empirical Holder seminorm");
    auto* verify = app.add_subcommand("verify-all", "run every verification check");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (flux_report->parsed()) return run_flux_report(g);
        if (decompose->parsed()) return run_decompose(g);
        if (h_certify->parsed()) return run_h_certify(g);
        if (solve->parsed()) return run_solve(g);
        if (kinetic->parsed()) return run_kinetic_verify(g);
        if (hprofile->parsed()) return run_hprofile(g);
        if (bootstrap->parsed()) return run_bootstrap(g);
        if (holder->parsed()) return run_holder_check(g);
        if (verify->parsed()) return run_verify_all(g);
    } catch (const balaw::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
