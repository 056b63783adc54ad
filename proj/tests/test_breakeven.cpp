#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "glwb/breakeven.hpp"

using namespace glwb;

namespace {

ContractParams base_params() {
    ContractParams p;
    p.r = 0.03;
    p.sigma = 0.20;
    p.alpha = 0.015;
    p.beta = 0.04;
    p.schedule.bands = {{50.0, 0.05}};
    p.mortality = {87.25, 9.5, 50.0, 120.0};
    return p;
}

BreakevenQuery coarse_query(double age, double y) {
    BreakevenQuery q;
    q.age = age;
    q.y = y;
    q.ny = 100;
    q.steps_per_year = 24;
    return q;
}

}  // namespace

TEST_CASE("waiting value is non-decreasing in the bonus rate") {
    auto p = base_params();
    p.mortality.age0 = 65.0;
    Grid g = make_grid(p, 100, 24);
    std::vector<ValueSurface> v1s;
    v1s.push_back(solve_v1(p, g, 0));
    double prev = -1.0;
    for (double beta : {0.0, 0.02, 0.06, 0.10, 0.16}) {
        auto pb = p;
        pb.beta = beta;
        const auto row = v0_initial_row(pb, g, v1s, g.t0 + 5.0);
        const double w = row[static_cast<std::size_t>(80)];  // y = 0.8
        CHECK(w >= prev - 1e-12);
        prev = w;
    }
}

TEST_CASE("pde break-even is deterministic and near the full-resolution value") {
    const auto q = coarse_query(65.0, 0.8);
    const auto a = breakeven_bonus_pde(q, base_params());
    const auto b = breakeven_bonus_pde(q, base_params());
    CHECK(a.beta == b.beta);  // bit-identical
    CHECK(a.status == BreakevenStatus::converged);
    CHECK(a.beta == Catch::Approx(0.0598).margin(0.004));  // coarse-grid wiggle room
}

TEST_CASE("bracket endpoints are reported, not clamped silently") {
    auto q = coarse_query(75.0, 0.5);
    q.bracket_lo = 0.0;
    q.bracket_hi = 0.005;  // far below the ~9% root: waiting never breaks even
    const auto low = breakeven_bonus_pde(q, base_params());
    CHECK(low.status == BreakevenStatus::always_initiate);
    CHECK(low.beta == q.bracket_hi);

    auto q2 = coarse_query(55.0, 1.0);
    q2.bracket_lo = 0.15;  // far above the ~3.5% root: waiting wins everywhere
    q2.bracket_hi = 0.20;
    const auto high = breakeven_bonus_pde(q2, base_params());
    CHECK(high.status == BreakevenStatus::always_wait);
    CHECK(high.beta == q2.bracket_lo);
}

TEST_CASE("query validation") {
    auto q = coarse_query(65.0, 0.0);
    CHECK_THROWS_AS(breakeven_bonus_pde(q, base_params()), std::invalid_argument);
    q = coarse_query(65.0, 0.8);
    q.bracket_lo = 0.2;
    q.bracket_hi = 0.1;
    CHECK_THROWS_AS(breakeven_bonus_pde(q, base_params()), std::invalid_argument);
    q = coarse_query(65.0, 0.8);
    q.tol = 0.0;
    CHECK_THROWS_AS(breakeven_bonus_pde(q, base_params()), std::invalid_argument);
}

TEST_CASE("mc break-even converges and reports a gap standard error") {
    BreakevenQuery q = coarse_query(65.0, 1.0);
    McConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 7;
    cfg.steps_per_year = 1;
    const auto res = breakeven_bonus_mc(q, base_params(), cfg);
    CHECK(res.status == BreakevenStatus::converged);
    CHECK(res.std_error > 0.0);
    CHECK(res.beta == Catch::Approx(0.0573).margin(0.01));

    const auto res2 = breakeven_bonus_mc(q, base_params(), cfg);
    CHECK(res.beta == res2.beta);  // deterministic for a fixed seed
}

TEST_CASE("table csv writer") {
    std::vector<Table1Row> rows = {{55.0, 1.0, 0.0362, 0.0397, BreakevenStatus::converged,
                                    BreakevenStatus::converged}};
    const std::string path = "table1_writer_test.csv";
    write_table1_csv(rows, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "age,y,pde_beta,mc_beta");
    std::getline(in, line);
    CHECK(line.rfind("55,", 0) == 0);
    in.close();
    std::remove(path.c_str());
}
