#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "glwb/config.hpp"
#include "glwb/contract.hpp"

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

}  // namespace

TEST_CASE("payout rate, constant schedule") {
    PayoutSchedule s{{{0.0, 0.05}}};
    for (double age : {50.0, 63.2, 70.0, 119.0}) CHECK(payout_rate(s, age) == 0.05);
}

TEST_CASE("payout rate, banded schedule is left-closed") {
    PayoutSchedule s{{{0.0, 0.04}, {65.0, 0.05}}};
    CHECK(payout_rate(s, 65.0) == 0.05);
    CHECK(payout_rate(s, 64.999) == 0.04);
    CHECK(band_index(s, 70.0) == 1);
    CHECK(band_index(s, 65.0) == 1);
    CHECK(band_index(s, 50.0) == 0);
}

TEST_CASE("band index of constant schedule") {
    PayoutSchedule s{{{0.0, 0.05}}};
    CHECK(band_index(s, 70.0) == 0);
}

TEST_CASE("empty schedule is an error") {
    PayoutSchedule s;
    CHECK_THROWS_AS(payout_rate(s, 60.0), std::invalid_argument);
    CHECK_THROWS_AS(band_index(s, 60.0), std::invalid_argument);
}

TEST_CASE("payout rate is a non-decreasing step function consistent with band_index") {
    PayoutSchedule s{{{0.0, 0.04}, {60.0, 0.045}, {70.0, 0.05}, {80.0, 0.06}}};
    double prev = 0.0;
    for (double age = 0.0; age <= 119.0; age += 0.25) {
        const double g = payout_rate(s, age);
        CHECK(g >= prev);
        CHECK(g == s.bands[band_index(s, age)].rate);
        prev = g;
    }
}

TEST_CASE("validate accepts the base parameter set") {
    CHECK(validate(base_params()).empty());
}

TEST_CASE("validate flags degenerate volatility") {
    auto p = base_params();
    p.sigma = 0.0;
    CHECK_FALSE(validate(p).empty());
}

TEST_CASE("validate flags decreasing band rates") {
    auto p = base_params();
    p.schedule.bands = {{50.0, 0.05}, {65.0, 0.04}};
    CHECK_FALSE(validate(p).empty());
}

TEST_CASE("config parsing round-trips exact decimals") {
    std::stringstream ss(
        "# comment\n"
        "r = 0.03\n"
        "sigma = 0.2\n"
        "alpha = 0.015\n"
        "beta = 0.04\n"
        "gompertz_m = 87.25\n"
        "gompertz_b = 9.5\n"
        "age0 = 50\n"
        "age_cap = 120\n"
        "bands = 50:0.04,65:0.05\n"
        "n_paths = 200000\n"
        "seed = 20240801\n"
        "steps_per_year = 12\n");
    const auto cfg = parse_config(ss);
    CHECK(cfg.params.r == 0.03);
    CHECK(cfg.params.sigma == 0.2);
    CHECK(cfg.params.mortality.m == 87.25);
    REQUIRE(cfg.params.schedule.bands.size() == 2);
    CHECK(cfg.params.schedule.bands[1].start_age == 65.0);
    CHECK(cfg.params.schedule.bands[1].rate == 0.05);
    REQUIRE(cfg.n_paths.has_value());
    CHECK(*cfg.n_paths == 200000);
    REQUIRE(cfg.seed.has_value());
    CHECK(*cfg.seed == 20240801ULL);
    REQUIRE(cfg.steps_per_year.has_value());
    CHECK(*cfg.steps_per_year == 12);
    CHECK(validate(cfg.params).empty());
}

TEST_CASE("config parser rejects unknown keys and malformed input") {
    std::stringstream unknown("bands = 0:0.05\nnot_a_key = 1\n");
    CHECK_THROWS_AS(parse_config(unknown), std::invalid_argument);
    std::stringstream missing("r = 0.03\n");
    CHECK_THROWS_AS(parse_config(missing), std::invalid_argument);
    std::stringstream badband("bands = 0-0.05\n");
    CHECK_THROWS_AS(parse_config(badband), std::invalid_argument);
    std::stringstream badnum("bands = 0:0.05\nr = abc\n");
    CHECK_THROWS_AS(parse_config(badnum), std::invalid_argument);
    std::stringstream noeq("bands = 0:0.05\nsigma 0.2\n");
    CHECK_THROWS_AS(parse_config(noeq), std::invalid_argument);
}
