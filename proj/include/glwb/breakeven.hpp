#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "glwb/contract.hpp"
#include "glwb/grid.hpp"
#include "glwb/montecarlo.hpp"
#include "glwb/pde.hpp"

namespace glwb {

enum class BreakevenStatus { converged, always_initiate, always_wait };

struct BreakevenResult {
    double beta = 0.0;
    BreakevenStatus status = BreakevenStatus::converged;
    double std_error = 0.0;  // standard error of the value gap at the root (MC only)
};

struct BreakevenQuery {
    double age = 65.0;
    double y = 1.0;       // moneyness at valuation, in (0, 1]
    double delay = 5.0;   // waiting period in years
    double bracket_lo = 0.0;
    double bracket_hi = 0.20;
    double tol = 1e-4;    // 1 basis point on beta
    long ny = kDefaultNy;                      // PDE grid
    long steps_per_year = kDefaultStepsPerYear;
};

namespace detail {

inline void check_query(const BreakevenQuery& q) {
    if (!(q.y > 0.0) || !(q.y <= 1.0))
        throw std::invalid_argument("breakeven: y must lie in (0, 1]");
    if (!(q.bracket_lo < q.bracket_hi))
        throw std::invalid_argument("breakeven: bracket_lo must be below bracket_hi");
    if (!(q.tol > 0.0)) throw std::invalid_argument("breakeven: tol must be positive");
    if (q.delay < 0.0) throw std::invalid_argument("breakeven: delay must be >= 0");
}

inline double interp_row(const std::vector<double>& row, const Grid& g, double y) {
    const double pos = y / g.dy();
    long j = static_cast<long>(std::floor(pos));
    if (j >= g.ny) j = g.ny - 1;
    if (j < 0) j = 0;
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * row[static_cast<std::size_t>(j)] + w * row[static_cast<std::size_t>(j) + 1];
}

// Root of f on [lo, hi] by bisection to tolerance `tol`; f is non-decreasing.
template <typename F>
inline BreakevenResult bisect_breakeven(F&& f, double lo, double hi, double tol) {
    BreakevenResult res;
    if (f(lo) >= 0.0) {
        res.beta = lo;
        res.status = BreakevenStatus::always_wait;
        return res;
    }
    if (f(hi) < 0.0) {
        res.beta = hi;
        res.status = BreakevenStatus::always_initiate;
        return res;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    res.beta = 0.5 * (lo + hi);
    res.status = BreakevenStatus::converged;
    return res;
}

}  // namespace detail

// Bonus rate at which one is indifferent between initiating now and waiting
// `delay` years then acting optimally, from the delay-constrained PDE value.
// The value of waiting is non-decreasing in beta, so bisection is well-posed;
// a bracket without a sign change is reported, never silently clamped.
inline BreakevenResult breakeven_bonus_pde(const BreakevenQuery& q, ContractParams p) {
    detail::check_query(q);
    p.mortality.age0 = q.age;
    require_dynamics(p);
    const Grid g = make_grid(p, q.ny, q.steps_per_year);

    std::vector<ValueSurface> v1s;  // beta-independent, one per band
    v1s.reserve(p.schedule.bands.size());
    for (std::size_t b = 0; b < p.schedule.bands.size(); ++b) v1s.push_back(solve_v1(p, g, b));

    const std::size_t band_now = band_index(p.schedule, q.age);
    const double initiate_now = interpolate(v1s[band_now], g.t0, q.y);

    auto gap = [&](double beta) {
        ContractParams pb = p;
        pb.beta = beta;
        const auto row = v0_initial_row(pb, g, v1s, g.t0 + q.delay);
        return detail::interp_row(row, g, q.y) - initiate_now;
    };
    return detail::bisect_breakeven(gap, q.bracket_lo, q.bracket_hi, q.tol);
}

// Monte Carlo counterpart: indifference between initiate-now and
// initiate-in-`delay`-years under annual-style accruals, with common random
// numbers across beta evaluations (both legs share the same draws), so the
// gap is a deterministic monotone function of beta for a fixed seed.
inline BreakevenResult breakeven_bonus_mc(const BreakevenQuery& q, ContractParams p,
                                          const McConfig& cfg, int n_threads = 0) {
    detail::check_query(q);
    p.mortality.age0 = q.age;
    require_dynamics(p);

    std::vector<double> now_vals, wait_vals;
    simulate_value(p, q.age, q.y, FixedDelay{0.0}, cfg, n_threads, &now_vals);

    double se_at_root = 0.0;
    auto gap = [&](double beta) {
        ContractParams pb = p;
        pb.beta = beta;
        simulate_value(pb, q.age, q.y, FixedDelay{q.delay}, cfg, n_threads, &wait_vals);
        const long n = cfg.n_paths;
        double s = 0.0, s2 = 0.0;
        for (long i = 0; i < n; ++i) {
            const double d = wait_vals[static_cast<std::size_t>(i)] -
                             now_vals[static_cast<std::size_t>(i)];
            s += d;
            s2 += d * d;
        }
        const double mean = s / static_cast<double>(n);
        if (n > 1) {
            const double var = std::max(0.0, (s2 - s * s / n) / static_cast<double>(n - 1));
            se_at_root = std::sqrt(var / static_cast<double>(n));
        }
        return mean;
    };
    BreakevenResult res = detail::bisect_breakeven(gap, q.bracket_lo, q.bracket_hi, q.tol);
    res.std_error = se_at_root;
    return res;
}

struct Table1Row {
    double age;
    double y;
    double pde_beta;
    double mc_beta;
    BreakevenStatus pde_status;
    BreakevenStatus mc_status;
};

// Break-even bonus rates at ages {55, 65, 75} x moneyness {1.0, 0.8, 0.5},
// PDE and MC methods side by side.
inline std::vector<Table1Row> run_table1(const ContractParams& params, const McConfig& cfg,
                                         int n_threads = 0, double delay = 5.0,
                                         long ny = kDefaultNy,
                                         long steps_per_year = kDefaultStepsPerYear) {
    std::vector<Table1Row> rows;
    for (double age : {55.0, 65.0, 75.0}) {
        for (double y : {1.0, 0.8, 0.5}) {
            BreakevenQuery q;
            q.age = age;
            q.y = y;
            q.delay = delay;
            q.ny = ny;
            q.steps_per_year = steps_per_year;
            const BreakevenResult pde = breakeven_bonus_pde(q, params);
            const BreakevenResult mc = breakeven_bonus_mc(q, params, cfg, n_threads);
            rows.push_back({age, y, pde.beta, mc.beta, pde.status, mc.status});
        }
    }
    return rows;
}

inline void write_table1_csv(const std::vector<Table1Row>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_table1_csv: cannot open '" + path + "'");
    out << "age,y,pde_beta,mc_beta\n";
    for (const auto& r : rows)
        out << detail::fmt17(r.age) << ',' << detail::fmt17(r.y) << ',' << detail::fmt17(r.pde_beta)
            << ',' << detail::fmt17(r.mc_beta) << '\n';
    if (!out) throw std::runtime_error("write_table1_csv: write failed for '" + path + "'");
}

}  // namespace glwb
