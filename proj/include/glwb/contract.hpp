#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "glwb/mortality.hpp"

namespace glwb {

// One payout band: the guaranteed payout rate earned when withdrawals are
// initiated at or after start_age (left-closed; the band ends where the
// next one starts).
struct PayoutBand {
    double start_age;  // years
    double rate;       // fraction of the guarantee base per year
};

// Piecewise-constant guaranteed payout rate by initiation age. The first
// band also covers ages below its start; the last extends to the age cap.
struct PayoutSchedule {
    std::vector<PayoutBand> bands;
};

inline std::size_t band_index(const PayoutSchedule& s, double age) {
    if (s.bands.empty())
        throw std::invalid_argument("band_index: empty payout schedule");
    std::size_t idx = 0;
    for (std::size_t k = 1; k < s.bands.size(); ++k)
        if (age >= s.bands[k].start_age) idx = k;
    return idx;
}

inline double payout_rate(const PayoutSchedule& s, double age) {
    if (!std::isfinite(age) || age < 0.0)
        throw std::invalid_argument("payout_rate: age must be finite and non-negative");
    return s.bands[band_index(s, age)].rate;
}

// Market and product constants for one contract.
struct ContractParams {
    double r = 0.03;       // risk-free rate per year
    double sigma = 0.20;   // account volatility per sqrt(year)
    double alpha = 0.015;  // insurance fee per year, fraction of the guarantee base
    double beta = 0.04;    // bonus (roll-up) rate per year while accumulating
    PayoutSchedule schedule;
    GompertzModel mortality;
};

// Returns the list of violated invariants; empty means valid.
inline std::vector<std::string> validate(const ContractParams& p) {
    std::vector<std::string> bad;
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(p.r) || p.r < 0.0) bad.push_back("r must be finite and >= 0");
    if (!finite(p.sigma) || p.sigma <= 0.0) bad.push_back("sigma must be finite and > 0");
    if (!finite(p.alpha) || p.alpha < 0.0) bad.push_back("alpha must be finite and >= 0");
    if (!finite(p.beta) || p.beta < 0.0) bad.push_back("beta must be finite and >= 0");
    if (!finite(p.mortality.b) || p.mortality.b <= 0.0) bad.push_back("gompertz_b must be > 0");
    if (!finite(p.mortality.m) || p.mortality.m <= 0.0) bad.push_back("gompertz_m must be > 0");
    if (!(p.mortality.age0 < p.mortality.age_cap)) bad.push_back("age0 must be below age_cap");
    if (p.schedule.bands.empty()) {
        bad.push_back("payout schedule must have at least one band");
    } else {
        for (std::size_t k = 0; k < p.schedule.bands.size(); ++k) {
            const auto& band = p.schedule.bands[k];
            if (!finite(band.rate) || band.rate <= 0.0 || band.rate >= 1.0)
                bad.push_back("band rates must lie in (0, 1)");
            if (k > 0 && !(band.start_age > p.schedule.bands[k - 1].start_age))
                bad.push_back("band start ages must be strictly increasing");
            if (k > 0 && band.rate < p.schedule.bands[k - 1].rate)
                bad.push_back("band rates must be non-decreasing (step-ups only)");
        }
    }
    return bad;
}

inline void require_valid(const ContractParams& p) {
    auto bad = validate(p);
    if (!bad.empty()) {
        std::string msg = "invalid contract parameters:";
        for (const auto& s : bad) msg += " " + s + ";";
        throw std::invalid_argument(msg);
    }
}

// Solver-level precondition: like require_valid but admits zero payout rates
// and zero fees, which the degenerate-parameter identities exercise.
inline void require_dynamics(const ContractParams& p) {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(p.r) || p.r < 0.0 || !finite(p.sigma) || p.sigma <= 0.0 || !finite(p.alpha) ||
        p.alpha < 0.0 || !finite(p.beta) || p.beta < 0.0)
        throw std::invalid_argument("invalid market parameters");
    if (!finite(p.mortality.b) || p.mortality.b <= 0.0 ||
        !(p.mortality.age0 < p.mortality.age_cap))
        throw std::invalid_argument("invalid mortality parameters");
    if (p.schedule.bands.empty())
        throw std::invalid_argument("payout schedule must have at least one band");
    for (std::size_t k = 0; k < p.schedule.bands.size(); ++k) {
        const auto& band = p.schedule.bands[k];
        if (!finite(band.rate) || band.rate < 0.0 || band.rate >= 1.0)
            throw std::invalid_argument("band rates must lie in [0, 1)");
        if (k > 0 && !(band.start_age > p.schedule.bands[k - 1].start_age))
            throw std::invalid_argument("band start ages must be strictly increasing");
    }
}

}  // namespace glwb
