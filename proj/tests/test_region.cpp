#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "glwb/region.hpp"

using namespace glwb;

namespace {

ContractParams figure_params(double sigma = 0.20, double beta = 0.04, double alpha = 0.015,
                             double r = 0.03, double g = 0.05) {
    ContractParams p;
    p.r = r;
    p.sigma = sigma;
    p.alpha = alpha;
    p.beta = beta;
    p.schedule.bands = {{50.0, g}};
    p.mortality = {87.25, 9.5, 50.0, 120.0};
    return p;
}

InitiationRegion coarse_region(const ContractParams& p, long ny = 100, long spy = 24) {
    Grid g = make_grid(p, ny, spy);
    std::vector<ValueSurface> v1s;
    for (std::size_t b = 0; b < p.schedule.bands.size(); ++b) v1s.push_back(solve_v1(p, g, b));
    return extract_region(solve_v0(p, g, v1s, g.t0), p);
}

bool delay_subset(const InitiationRegion& a, const InitiationRegion& b) {
    return compare_regions(a, b).a_delay_subset_of_b;
}

}  // namespace

TEST_CASE("degenerate parameters classify every cell as initiate") {
    auto p = figure_params();
    p.alpha = 0.0;
    p.beta = 0.0;
    p.schedule.bands = {{50.0, 0.0}};
    const auto r = coarse_region(p, 40, 12);
    for (long i = 0; i <= r.grid.nt; ++i)
        for (long j = 0; j <= r.grid.ny; ++j) CHECK(r.at(i, j));
    CHECK(boundary_intervals(r, 60.0).empty());
    CHECK(boundary_intervals(r, 85.0).empty());
}

TEST_CASE("region compared with itself") {
    const auto r = coarse_region(figure_params(), 40, 12);
    const auto rep = compare_regions(r, r);
    CHECK(rep.a_delay_subset_of_b);
    CHECK(rep.b_delay_subset_of_a);
    CHECK(rep.differing_cells == 0);
}

TEST_CASE("ruin boundary cells always initiate") {
    const auto r = coarse_region(figure_params(), 60, 24);
    for (long i = 0; i <= r.grid.nt; ++i) CHECK(r.at(i, 0));
}

TEST_CASE("delay region grows with the bonus rate") {
    const auto r4 = coarse_region(figure_params(0.20, 0.04));
    const auto r6 = coarse_region(figure_params(0.20, 0.06));
    const auto r8 = coarse_region(figure_params(0.20, 0.08));
    CHECK(delay_subset(r4, r6));
    CHECK(delay_subset(r6, r8));
}

TEST_CASE("delay region grows with volatility, and the reverse containment fails") {
    const auto r10 = coarse_region(figure_params(0.10));
    const auto r20 = coarse_region(figure_params(0.20));
    const auto r30 = coarse_region(figure_params(0.30));
    CHECK(delay_subset(r10, r20));
    CHECK(delay_subset(r20, r30));
    CHECK_FALSE(delay_subset(r30, r10));
}

TEST_CASE("delay shrinks when fees rise, rates rise, or the payout drops") {
    const auto base = coarse_region(figure_params());
    CHECK(delay_subset(coarse_region(figure_params(0.20, 0.04, 0.03)), base));
    CHECK(delay_subset(coarse_region(figure_params(0.20, 0.04, 0.015, 0.05)), base));
    CHECK(delay_subset(coarse_region(figure_params(0.20, 0.04, 0.015, 0.03, 0.04)), base));
}

TEST_CASE("delay moneyness set shrinks with age in the constant-payout case") {
    const auto r = coarse_region(figure_params());
    auto delay_at = [&](double age) {
        std::vector<bool> d;
        const long i = r.row_for_age(age);
        for (long j = 0; j <= r.grid.ny; ++j) d.push_back(!r.at(i, j));
        return d;
    };
    for (double age : {60.0, 62.0, 64.0, 66.0, 68.0}) {
        const auto younger = delay_at(age), older = delay_at(age + 2.0);
        for (long j = 0; j <= r.grid.ny; ++j)
            if (older[static_cast<std::size_t>(j)]) CHECK(younger[static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("boundary intervals at ages with and without delay cells") {
    const auto r = coarse_region(figure_params());
    CHECK(boundary_intervals(r, 85.0).empty());  // old age: initiate everywhere
    const auto at60 = boundary_intervals(r, 60.0);
    REQUIRE_FALSE(at60.empty());
    CHECK(at60.back().second == 1.0);  // delay hugs the reflecting boundary
    CHECK_THROWS_AS(boundary_intervals(r, 140.0), std::invalid_argument);
    CHECK_THROWS_AS(boundary_intervals(r, 30.0), std::invalid_argument);
}

TEST_CASE("stepped schedule: delay interval just below a band jump") {
    auto p = figure_params();
    p.schedule.bands = {{50.0, 0.04}, {65.0, 0.05}, {75.0, 0.055}};
    const auto r = coarse_region(p, 100, 24);
    const auto just_below = boundary_intervals(r, 64.9);
    REQUIRE_FALSE(just_below.empty());
    // near-the-money delay present just under the jump
    bool near_money = false;
    for (const auto& [lo, hi] : just_below)
        if (hi >= 0.9) near_money = true;
    CHECK(near_money);
}

TEST_CASE("region csv export and import round-trip") {
    InitiationRegion r;
    r.grid = Grid{0.0, 1.0, 1, 1};
    r.start_age = 60.0;
    r.initiate = {1, 0, 1, 1};
    r.fingerprint = "test";
    const std::string path = "region_roundtrip_test.csv";
    export_region_csv(r, path);

    std::ifstream in(path);
    std::string line;
    long rows = 0;
    std::getline(in, line);
    CHECK(line == "age,y,initiate");
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
    in.close();

    const auto back = import_region_csv(path);
    CHECK(back.grid.nt == r.grid.nt);
    CHECK(back.grid.ny == r.grid.ny);
    CHECK(back.start_age == 60.0);
    for (long i = 0; i <= 1; ++i)
        for (long j = 0; j <= 1; ++j) CHECK(back.at(i, j) == r.at(i, j));
    std::remove(path.c_str());
}

TEST_CASE("all-initiate region exports no delay flags") {
    InitiationRegion r;
    r.grid = Grid{0.0, 1.0, 1, 1};
    r.start_age = 60.0;
    r.initiate = {1, 1, 1, 1};
    const std::string path = "region_allinit_test.csv";
    export_region_csv(r, path);
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find(",0\n") == std::string::npos);
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("mismatched grids cannot be compared") {
    const auto a = coarse_region(figure_params(), 40, 12);
    const auto b = coarse_region(figure_params(), 50, 12);
    CHECK_THROWS_AS(compare_regions(a, b), std::invalid_argument);
}
