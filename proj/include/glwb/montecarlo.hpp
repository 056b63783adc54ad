#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

#include "glwb/contract.hpp"
#include "glwb/mortality.hpp"
#include "glwb/region.hpp"
#include "glwb/rng.hpp"

namespace glwb {

struct McConfig {
    long n_paths = 100000;
    std::uint64_t seed = 1;
    int steps_per_year = 1;  // 1 = annual accrual convention; larger for convergence checks
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct FixedDelay {
    double years = 0.0;
};
struct NeverInitiate {};
struct RegionPolicy {
    std::shared_ptr<const InitiationRegion> region;
};
using Strategy = std::variant<FixedDelay, NeverInitiate, RegionPolicy>;

// Simulator-facing state of one contract path.
struct LocalState {
    double account = 1.0;   // X
    double base = 1.0;      // M, non-decreasing
    double stepup = 1.0;    // cumulative step-up factor (discrete local time)
    double survival = 1.0;  // N
    std::optional<double> initiation_time;
    std::optional<double> ruin_time;

    double moneyness() const { return base > 0.0 ? account / base : 0.0; }
};

// Cash-flow byproducts of one accrual period.
struct StepFlows {
    double withdrawal = 0.0;             // guaranteed amount due at the period start
    double account_after_deduction = 0.0;
    bool ruined = false;
};

// One accrual period of length h. Anniversary processing happens at the
// period start: bonus while accumulating, then fee and withdrawal deduction
// (ruin when the account cannot cover it); the remainder takes the period's
// lognormal return and the base steps up to the period-end account value.
inline StepFlows step_year(LocalState& s, const ContractParams& p, bool initiated,
                           double payout_g, double z, double h = 1.0) {
    StepFlows f;
    if (!initiated) s.base *= 1.0 + p.beta * h;
    const double gw = initiated ? payout_g : 0.0;
    const double deduction = s.base * (p.alpha + gw) * h;
    f.withdrawal = initiated ? s.base * payout_g * h : 0.0;
    if (s.account - deduction <= 0.0) {
        s.account = 0.0;
        f.ruined = true;
        return f;  // base frozen at ruin
    }
    s.account -= deduction;
    f.account_after_deduction = s.account;
    s.account *= std::exp((p.r - 0.5 * p.sigma * p.sigma) * h + p.sigma * std::sqrt(h) * z);
    if (s.account > s.base) {
        s.stepup *= s.account / s.base;
        s.base = s.account;
    }
    return f;
}

namespace detail {

struct McTables {
    long periods = 0;  // K; horizon = K * h
    double h = 1.0;
    std::vector<double> surv;   // N at period boundaries, surv[K] = 0
    std::vector<double> disc;   // e^{-r t_k}
    std::vector<double> abar;   // annuity factor at age0 + t_k
    std::vector<std::size_t> band;  // payout band by period index (snapped)
};

inline McTables make_mc_tables(const ContractParams& p, double age0, int steps_per_year) {
    McTables t;
    t.h = 1.0 / static_cast<double>(steps_per_year);
    t.periods = std::lround((p.mortality.age_cap - age0) * steps_per_year);
    if (t.periods < 1) throw std::invalid_argument("simulate: age0 at or beyond age_cap");
    const long K = t.periods;
    t.surv.resize(K + 1);
    t.disc.resize(K + 1);
    t.abar.resize(K + 1);
    t.band.assign(K + 1, 0);
    for (long k = 0; k <= K; ++k) {
        const double tk = static_cast<double>(k) * t.h;
        t.surv[k] = survival(p.mortality, age0, tk);
        t.disc[k] = std::exp(-p.r * tk);
        t.abar[k] = annuity_price(p.mortality, p.r, std::min(age0 + tk, p.mortality.age_cap));
    }
    for (std::size_t b = 1; b < p.schedule.bands.size(); ++b) {
        const long snap = std::lround((p.schedule.bands[b].start_age - age0) * steps_per_year);
        for (long k = std::max(snap, 0L); k <= K; ++k)
            t.band[k] = std::max(t.band[k], b);
    }
    return t;
}

struct ResolvedStrategy {
    long fixed_init_period = -1;               // >= 0 for fixed-delay
    const InitiationRegion* region = nullptr;  // region policy
    bool never = false;
};

inline ResolvedStrategy resolve_strategy(const Strategy& strat, double age0, const McTables& t) {
    ResolvedStrategy rs;
    if (const auto* fd = std::get_if<FixedDelay>(&strat)) {
        if (fd->years < 0.0) throw std::invalid_argument("strategy: delay must be >= 0");
        rs.fixed_init_period = std::lround(fd->years / t.h);
    } else if (std::get_if<NeverInitiate>(&strat)) {
        rs.never = true;
    } else {
        const auto& rp = std::get<RegionPolicy>(strat);
        if (!rp.region) throw std::invalid_argument("strategy: region policy without a region");
        if (std::fabs(rp.region->start_age - age0) > 1e-9)
            throw std::invalid_argument("strategy: region start age does not match age0");
        rs.region = rp.region.get();
    }
    return rs;
}

// Discounted, survival-weighted value of one path. Withdrawals are due at
// period starts; deaths during a period receive the average of the
// discounted post-deduction and period-end account; at ruin the remaining
// guarantee is closed with the annuity factor at the ruin age.
inline double run_path(std::uint64_t seed, long path, const ContractParams& p,
                       const McTables& t, const ResolvedStrategy& rs, double y0) {
    LocalState s;
    s.account = y0;
    s.base = 1.0;
    bool initiated = false;
    double gfix = 0.0;
    double value = 0.0;
    const long K = t.periods;
    for (long k = 0; k < K; ++k) {
        if (!initiated && !rs.never) {
            bool turn_on = false;
            if (rs.fixed_init_period >= 0) {
                turn_on = k >= rs.fixed_init_period;
            } else if (rs.region != nullptr) {
                const long i = std::min<long>(
                    std::lround(static_cast<double>(k) * t.h / rs.region->grid.dt()),
                    rs.region->grid.nt);
                long j = std::lround(s.moneyness() * static_cast<double>(rs.region->grid.ny));
                if (j < 0) j = 0;
                if (j > rs.region->grid.ny) j = rs.region->grid.ny;
                turn_on = rs.region->at(i, j);
            }
            if (turn_on) {
                initiated = true;
                s.initiation_time = static_cast<double>(k) * t.h;
                gfix = p.schedule.bands[t.band[k]].rate;
            }
        }
        const double z = normal_draw(seed, static_cast<std::uint64_t>(path),
                                     static_cast<std::uint64_t>(k));
        const StepFlows f = step_year(s, p, initiated, gfix, z, t.h);
        if (initiated) value += f.withdrawal * t.disc[k] * t.surv[k];
        if (f.ruined) {
            const double geff = initiated ? gfix : p.schedule.bands[t.band[k]].rate;
            value += t.disc[k] * t.surv[k] * geff * s.base * t.abar[k];
            s.ruin_time = static_cast<double>(k) * t.h;
            return value;
        }
        value += (t.surv[k] - t.surv[k + 1]) * 0.5 *
                 (t.disc[k] * f.account_after_deduction + t.disc[k + 1] * s.account);
        s.survival = t.surv[k + 1];
    }
    return value;  // surv[K] = 0 at the cap, nothing remains
}

}  // namespace detail

// Risk-neutral value of the hedge cash flows per dollar of initial guarantee
// under a fixed initiation strategy. Deterministic in (seed, n_paths,
// steps_per_year) regardless of thread count: chunked path sums are reduced
// in fixed chunk order. Optionally writes per-path values (for paired
// comparisons under common random numbers).
inline McEstimate simulate_value(const ContractParams& p, double age0, double y0,
                                 const Strategy& strategy, const McConfig& cfg,
                                 int n_threads = 0, std::vector<double>* per_path = nullptr) {
    require_dynamics(p);
    if (cfg.n_paths < 1) throw std::invalid_argument("simulate: n_paths must be >= 1");
    if (cfg.steps_per_year < 1) throw std::invalid_argument("simulate: steps_per_year must be >= 1");
    if (!(y0 > 0.0) || !(y0 <= 1.0)) throw std::invalid_argument("simulate: y0 must lie in (0, 1]");

    const detail::McTables tables = detail::make_mc_tables(p, age0, cfg.steps_per_year);
    const detail::ResolvedStrategy rs = detail::resolve_strategy(strategy, age0, tables);

    const long n = cfg.n_paths;
    constexpr long kChunk = 8192;
    const long nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> csum(nchunks, 0.0), csumsq(nchunks, 0.0);
    if (per_path) per_path->assign(static_cast<std::size_t>(n), 0.0);

    std::atomic<long> next{0};
    auto worker = [&]() {
        for (;;) {
            const long c = next.fetch_add(1);
            if (c >= nchunks) break;
            const long lo = c * kChunk;
            const long hi = std::min(n, lo + kChunk);
            double s = 0.0, s2 = 0.0;
            for (long i = lo; i < hi; ++i) {
                const double v = detail::run_path(cfg.seed, i, p, tables, rs, y0);
                s += v;
                s2 += v * v;
                if (per_path) (*per_path)[static_cast<std::size_t>(i)] = v;
            }
            csum[c] = s;
            csumsq[c] = s2;
        }
    };

    int nt = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nt < 1) nt = 1;
    nt = static_cast<int>(std::min<long>(nt, nchunks));
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double sum = 0.0, sumsq = 0.0;
    for (long c = 0; c < nchunks; ++c) {
        sum += csum[c];
        sumsq += csumsq[c];
    }
    McEstimate est;
    est.value = sum / static_cast<double>(n);
    if (n > 1) {
        const double var = std::max(0.0, (sumsq - sum * sum / n) / static_cast<double>(n - 1));
        est.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return est;
}

}  // namespace glwb
