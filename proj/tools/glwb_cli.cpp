// Command-line front end: annuity pricing, value surfaces, initiation
// regions, break-even bonus rates, Monte Carlo strategy valuation, and
// region comparisons.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glwb/breakeven.hpp"
#include "glwb/config.hpp"
#include "glwb/contract.hpp"
#include "glwb/grid.hpp"
#include "glwb/montecarlo.hpp"
#include "glwb/pde.hpp"
#include "glwb/region.hpp"

namespace {

const char* status_name(glwb::BreakevenStatus s) {
    switch (s) {
        case glwb::BreakevenStatus::converged: return "converged";
        case glwb::BreakevenStatus::always_initiate: return "always-initiate";
        default: return "always-wait";
    }
}

std::vector<glwb::ValueSurface> all_band_surfaces(const glwb::ContractParams& p,
                                                  const glwb::Grid& g) {
    std::vector<glwb::ValueSurface> out;
    out.reserve(p.schedule.bands.size());
    for (std::size_t b = 0; b < p.schedule.bands.size(); ++b)
        out.push_back(glwb::solve_v1(p, g, b));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GLWB optimal-initiation toolkit"};
    app.require_subcommand(1);

    std::string config_path, output_path, region_a, region_b, region_file;
    double age = 65.0, y = 1.0, delay = 5.0, tol = 1e-4;
    double bracket_lo = 0.0, bracket_hi = 0.20, min_init_age = -1.0;
    long ny = glwb::kDefaultNy, grid_steps = glwb::kDefaultStepsPerYear;
    long n_paths = 0;
    unsigned long long seed = 0;
    int steps_per_year = 0, threads = 0;
    std::string regime = "v0", method = "pde", strategy = "delay:0";
    std::size_t band = 0;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "parameter file")->required();
    };
    auto add_grid = [&](CLI::App* cmd) {
        cmd->add_option("--grid-ny", ny, "moneyness steps (default 400)");
        cmd->add_option("--grid-steps-per-year", grid_steps, "time steps per year (default 240)");
    };
    auto add_mc = [&](CLI::App* cmd) {
        cmd->add_option("--paths", n_paths, "Monte Carlo paths");
        cmd->add_option("--seed", seed, "Monte Carlo seed");
        cmd->add_option("--steps-per-year", steps_per_year, "accrual periods per year");
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    };

    auto* c_annuity = app.add_subcommand("annuity", "price a life annuity of 1 per year");
    add_config(c_annuity);
    c_annuity->add_option("--age", age, "age in years")->required();

    auto* c_solve = app.add_subcommand("solve", "emit a value surface as CSV");
    add_config(c_solve);
    add_grid(c_solve);
    c_solve->add_option("--regime", regime, "v0, v1 or v2")->required();
    c_solve->add_option("--band", band, "payout band for v1/v2 (default 0)");
    c_solve->add_option("--min-init-age", min_init_age, "earliest initiation age (v0)");
    c_solve->add_option("--output", output_path, "output CSV")->required();

    auto* c_region = app.add_subcommand("region", "emit the initiation region as CSV");
    add_config(c_region);
    add_grid(c_region);
    c_region->add_option("--min-init-age", min_init_age, "earliest initiation age");
    c_region->add_option("--output", output_path, "output CSV")->required();

    auto* c_breakeven = app.add_subcommand("breakeven", "break-even bonus rate for one query");
    add_config(c_breakeven);
    add_grid(c_breakeven);
    add_mc(c_breakeven);
    c_breakeven->add_option("--age", age, "current age")->required();
    c_breakeven->add_option("--y", y, "moneyness in (0,1]")->required();
    c_breakeven->add_option("--method", method, "pde or mc (default pde)");
    c_breakeven->add_option("--delay", delay, "waiting period in years (default 5)");
    c_breakeven->add_option("--tol", tol, "bisection tolerance on beta (default 1e-4)");
    c_breakeven->add_option("--bracket-lo", bracket_lo, "bracket lower end (default 0)");
    c_breakeven->add_option("--bracket-hi", bracket_hi, "bracket upper end (default 0.20)");

    auto* c_table1 = app.add_subcommand("table1", "break-even table, ages 55/65/75 x y 1.0/0.8/0.5");
    add_config(c_table1);
    add_grid(c_table1);
    add_mc(c_table1);
    c_table1->add_option("--output", output_path, "output CSV")->required();

    auto* c_mc = app.add_subcommand("mc", "Monte Carlo value of a fixed strategy");
    add_config(c_mc);
    add_mc(c_mc);
    c_mc->add_option("--age0", age, "start age")->required();
    c_mc->add_option("--y0", y, "initial moneyness in (0,1]")->required();
    c_mc->add_option("--strategy", strategy,
                     "delay:<years>, never, or region:<csv> (default delay:0)");
    c_mc->add_option("--output", output_path, "optional output CSV");

    auto* c_statics = app.add_subcommand("statics", "compare delay sets of two region CSVs");
    c_statics->add_option("--a", region_a, "first region CSV")->required();
    c_statics->add_option("--b", region_b, "second region CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(c_annuity)) {
            auto cfg = glwb::parse_config_file(config_path);
            std::printf("%.10f\n", glwb::annuity_price(cfg.params.mortality, cfg.params.r, age));
            return 0;
        }

        if (app.got_subcommand(c_solve)) {
            auto cfg = glwb::parse_config_file(config_path);
            glwb::require_dynamics(cfg.params);
            const glwb::Grid g = glwb::make_grid(cfg.params, ny, grid_steps);
            const double age0 = cfg.params.mortality.age0;
            if (regime == "v2") {
                const auto v2 = glwb::solve_v2(cfg.params, g, band);
                std::ofstream out(output_path);
                if (!out) throw std::invalid_argument("cannot open '" + output_path + "'");
                out << "age,value\n";
                for (long i = 0; i < g.n_times(); ++i)
                    out << glwb::detail::fmt17(age0 + g.time(i)) << ','
                        << glwb::detail::fmt17(v2[static_cast<std::size_t>(i)]) << '\n';
            } else if (regime == "v1") {
                glwb::write_surface_csv(glwb::solve_v1(cfg.params, g, band), age0, output_path);
            } else if (regime == "v0") {
                const auto v1s = all_band_surfaces(cfg.params, g);
                const double min_t = min_init_age < 0.0 ? g.t0 : min_init_age - age0;
                const auto sol = glwb::solve_v0(cfg.params, g, v1s, min_t);
                glwb::write_surface_csv(sol.surface, age0, output_path);
            } else {
                throw std::invalid_argument("unknown regime '" + regime + "' (want v0, v1 or v2)");
            }
            std::printf("wrote %s\n", output_path.c_str());
            return 0;
        }

        if (app.got_subcommand(c_region)) {
            auto cfg = glwb::parse_config_file(config_path);
            glwb::require_dynamics(cfg.params);
            const glwb::Grid g = glwb::make_grid(cfg.params, ny, grid_steps);
            const double age0 = cfg.params.mortality.age0;
            const auto v1s = all_band_surfaces(cfg.params, g);
            const double min_t = min_init_age < 0.0 ? g.t0 : min_init_age - age0;
            const auto sol = glwb::solve_v0(cfg.params, g, v1s, min_t);
            glwb::export_region_csv(glwb::extract_region(sol, cfg.params), output_path);
            std::printf("wrote %s\n", output_path.c_str());
            return 0;
        }

        if (app.got_subcommand(c_breakeven)) {
            auto cfg = glwb::parse_config_file(config_path);
            glwb::BreakevenQuery q;
            q.age = age;
            q.y = y;
            q.delay = delay;
            q.tol = tol;
            q.bracket_lo = bracket_lo;
            q.bracket_hi = bracket_hi;
            q.ny = ny;
            q.steps_per_year = grid_steps;
            glwb::BreakevenResult res;
            if (method == "pde") {
                res = glwb::breakeven_bonus_pde(q, cfg.params);
                std::printf("break-even beta = %.4f%% (%s)\n", 100.0 * res.beta,
                            status_name(res.status));
            } else if (method == "mc") {
                glwb::McConfig mc;
                mc.n_paths = n_paths > 0 ? n_paths : cfg.n_paths.value_or(200000);
                mc.seed = seed != 0 ? seed : cfg.seed.value_or(1);
                mc.steps_per_year =
                    steps_per_year > 0 ? steps_per_year : cfg.steps_per_year.value_or(1);
                res = glwb::breakeven_bonus_mc(q, cfg.params, mc, threads);
                std::printf("break-even beta = %.4f%% (%s, gap stderr %.2e)\n", 100.0 * res.beta,
                            status_name(res.status), res.std_error);
            } else {
                throw std::invalid_argument("unknown method '" + method + "' (want pde or mc)");
            }
            return 0;
        }

        if (app.got_subcommand(c_table1)) {
            auto cfg = glwb::parse_config_file(config_path);
            glwb::McConfig mc;
            mc.n_paths = n_paths > 0 ? n_paths : cfg.n_paths.value_or(200000);
            mc.seed = seed != 0 ? seed : cfg.seed.value_or(1);
            mc.steps_per_year = steps_per_year > 0 ? steps_per_year : cfg.steps_per_year.value_or(1);
            const auto rows = glwb::run_table1(cfg.params, mc, threads, 5.0, ny, grid_steps);
            glwb::write_table1_csv(rows, output_path);
            std::printf("age     y    pde_beta   mc_beta\n");
            for (const auto& r : rows)
                std::printf("%3.0f  %4.1f   %7.4f%%  %7.4f%%\n", r.age, r.y, 100.0 * r.pde_beta,
                            100.0 * r.mc_beta);
            std::printf("wrote %s\n", output_path.c_str());
            return 0;
        }

        if (app.got_subcommand(c_mc)) {
            auto cfg = glwb::parse_config_file(config_path);
            glwb::McConfig mc;
            mc.n_paths = n_paths > 0 ? n_paths : cfg.n_paths.value_or(200000);
            mc.seed = seed != 0 ? seed : cfg.seed.value_or(1);
            mc.steps_per_year = steps_per_year > 0 ? steps_per_year : cfg.steps_per_year.value_or(1);
            glwb::Strategy strat = glwb::FixedDelay{0.0};
            if (strategy == "never") {
                strat = glwb::NeverInitiate{};
            } else if (strategy.rfind("delay:", 0) == 0) {
                strat = glwb::FixedDelay{std::stod(strategy.substr(6))};
            } else if (strategy.rfind("region:", 0) == 0) {
                auto reg = std::make_shared<glwb::InitiationRegion>(
                    glwb::import_region_csv(strategy.substr(7)));
                strat = glwb::RegionPolicy{reg};
            } else {
                throw std::invalid_argument("unknown strategy '" + strategy + "'");
            }
            const auto est = glwb::simulate_value(cfg.params, age, y, strat, mc, threads);
            std::printf("estimate = %.6f  stderr = %.6f  (paths %ld, steps/yr %d, seed %llu)\n",
                        est.value, est.std_error, mc.n_paths, mc.steps_per_year,
                        static_cast<unsigned long long>(mc.seed));
            if (!output_path.empty()) {
                std::ofstream out(output_path);
                if (!out) throw std::invalid_argument("cannot open '" + output_path + "'");
                out << "strategy,estimate,std_error\n"
                    << strategy << ',' << glwb::detail::fmt17(est.value) << ','
                    << glwb::detail::fmt17(est.std_error) << '\n';
            }
            return 0;
        }

        if (app.got_subcommand(c_statics)) {
            const auto ra = glwb::import_region_csv(region_a);
            const auto rb = glwb::import_region_csv(region_b);
            const auto rep = glwb::compare_regions(ra, rb);
            std::printf("delay(a) subset of delay(b): %s\n",
                        rep.a_delay_subset_of_b ? "yes" : "no");
            std::printf("delay(b) subset of delay(a): %s\n",
                        rep.b_delay_subset_of_a ? "yes" : "no");
            std::printf("differing cells: %ld\n", rep.differing_cells);
            for (const auto& [i, j] : rep.violations)
                std::printf("  delay in a only at row %ld node %ld\n", i, j);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const glwb::numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
