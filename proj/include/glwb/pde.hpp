#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "glwb/contract.hpp"
#include "glwb/grid.hpp"
#include "glwb/tridiagonal.hpp"

namespace glwb {

// Exercise-vs-continuation classification tolerance for the initiation mask.
inline constexpr double kTolExercise = 1e-9;

// Internal substeps for the backward ODE integrations (implicit Euler).
inline constexpr int kOdeSubsteps = 4;

// Boolean initiate/delay decision over the grid; 1 = initiate.
struct InitiationMask {
    Grid grid;
    std::vector<std::uint8_t> initiate;

    bool at(long i, long j) const {
        return initiate[static_cast<std::size_t>(i) * grid.n_nodes() + j] != 0;
    }
};

struct V0Solution {
    ValueSurface surface;
    InitiationMask mask;
};

namespace detail {

// Maps each grid time index to its payout band, with band-change ages
// snapped to the nearest grid time. With dt dividing one year, integer
// band ages land exactly on grid rows.
inline std::vector<std::size_t> band_row_map(const PayoutSchedule& s, double age0, const Grid& g) {
    if (s.bands.empty()) throw std::invalid_argument("band_row_map: empty payout schedule");
    std::vector<std::size_t> map(static_cast<std::size_t>(g.n_times()), 0);
    for (std::size_t k = 1; k < s.bands.size(); ++k) {
        const long snap = std::lround((s.bands[k].start_age - age0 - g.t0) / g.dt());
        for (long i = std::max(snap, 0L); i < g.n_times(); ++i)
            map[static_cast<std::size_t>(i)] = std::max(map[static_cast<std::size_t>(i)], k);
    }
    return map;
}

// Fully implicit backward step for
//   v_t + A(y) v_y + B(y) v_yy - c(t) v = -f(t, y)
// on y in [0,1]: upwinded convection, Dirichlet at y=0, Robin v = v_y at
// y=1 discretized with the second-order one-sided difference
//   v_y(1) ~ (3 v_N - 4 v_{N-1} + v_{N-2}) / (2 dy)
// folded into the last row by eliminating v_{N-2} with the interior row.
class ImplicitStepper {
public:
    ImplicitStepper(const Grid& g, std::span<const double> drift, std::span<const double> diffusion)
        : dt_(g.dt()), dy_(g.dy()), n_(g.n_nodes()),
          lower0_(n_), upper0_(n_), diag0_(n_),
          lower_(n_), upper_(n_), diag_(n_), rhs_(n_), scratch_() {
        for (long j = 0; j < n_; ++j) {
            const double a = drift[j];
            const double d = dt_ * diffusion[j] / (dy_ * dy_);
            const double up = std::max(a, 0.0), dn = std::max(-a, 0.0);
            lower0_[j] = -d - dt_ * dn / dy_;
            upper0_[j] = -d - dt_ * up / dy_;
            diag0_[j] = 1.0 + 2.0 * d + dt_ * (up + dn) / dy_;
        }
    }

    // Advances v one step backward in time; v holds the later-time values on
    // entry and the earlier-time solution on exit.
    void step(double react, std::span<const double> source, double dirichlet0,
              std::vector<double>& v) {
        assemble(react, source, dirichlet0, v);
        tridiagonal_solve(lower_, diag_, upper_, rhs_, v, scratch_);
    }

    // Builds the full tridiagonal system for one step (boundary rows
    // included); kept separate so tests can cross-check against a dense solve.
    void assemble(double react, std::span<const double> source, double dirichlet0,
                  std::span<const double> v) {
        const long n = n_;
        std::copy(lower0_.begin(), lower0_.end(), lower_.begin());
        std::copy(upper0_.begin(), upper0_.end(), upper_.begin());
        for (long j = 0; j < n; ++j) {
            diag_[j] = diag0_[j] + dt_ * react;
            rhs_[j] = v[j] + dt_ * source[j];
        }
        diag_[0] = 1.0;
        upper_[0] = 0.0;
        rhs_[0] = dirichlet0;

        // Robin row: (2 dy - 3) v_N + 4 v_{N-1} - v_{N-2} = 0, with v_{N-2}
        // eliminated via the interior row at N-1.
        const double a = lower_[n - 2], b = diag_[n - 2], c = upper_[n - 2], d = rhs_[n - 2];
        lower_[n - 1] = 4.0 * a + b;
        diag_[n - 1] = a * (2.0 * dy_ - 3.0) + c;
        upper_[n - 1] = 0.0;
        rhs_[n - 1] = d;
    }

    std::span<const double> lower() const { return lower_; }
    std::span<const double> diag() const { return diag_; }
    std::span<const double> upper() const { return upper_; }
    std::span<const double> rhs() const { return rhs_; }

private:
    double dt_, dy_;
    long n_;
    std::vector<double> lower0_, upper0_, diag0_;
    std::vector<double> lower_, upper_, diag_, rhs_;
    std::vector<double> scratch_;
};

}  // namespace detail

// Annuity factor at every grid time, by backward implicit Euler of
// a' = (r + lambda_t) a - 1 from a(T) = 0 on `substeps` internal steps per
// grid step. Agrees with annuity_price to well below the PDE error.
inline std::vector<double> annuity_path(const ContractParams& p, const Grid& g,
                                        int substeps = kOdeSubsteps) {
    require_valid(g);
    const double age0 = p.mortality.age0;
    const double dt = g.dt();
    const double h = dt / substeps;
    std::vector<double> out(static_cast<std::size_t>(g.n_times()));
    double v = 0.0;
    out[static_cast<std::size_t>(g.nt)] = 0.0;
    for (long i = g.nt - 1; i >= 0; --i) {
        for (int k = 0; k < substeps; ++k) {
            const double t = g.time(i + 1) - (k + 1) * h;
            v = (v + h) / (1.0 + h * (p.r + hazard(p.mortality, age0 + t)));
        }
        out[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

// Post-ruin value for one payout band: v2(t) = g_band * abar(t), computed by
// backward implicit Euler of v' = (r + lambda_t) v - g from v(T) = 0.
inline std::vector<double> solve_v2(const ContractParams& p, const Grid& g, std::size_t band,
                                    int substeps = kOdeSubsteps) {
    require_dynamics(p);
    require_valid(g);
    if (band >= p.schedule.bands.size())
        throw std::invalid_argument("solve_v2: band index out of range");
    const double gpay = p.schedule.bands[band].rate;
    const double age0 = p.mortality.age0;
    const double dt = g.dt();
    const double h = dt / substeps;
    std::vector<double> out(static_cast<std::size_t>(g.n_times()));
    double v = 0.0;
    out[static_cast<std::size_t>(g.nt)] = 0.0;
    for (long i = g.nt - 1; i >= 0; --i) {
        for (int k = 0; k < substeps; ++k) {
            const double t = g.time(i + 1) - (k + 1) * h;
            v = (v + h * gpay) / (1.0 + h * (p.r + hazard(p.mortality, age0 + t)));
        }
        out[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

// Post-initiation, pre-ruin value for one payout band. Terminal v(T,y) = y,
// Dirichlet v(t,0) = v2(t), Robin v = v_y at y=1.
inline ValueSurface solve_v1(const ContractParams& p, const Grid& g, std::size_t band) {
    require_dynamics(p);
    require_valid(g);
    if (band >= p.schedule.bands.size())
        throw std::invalid_argument("solve_v1: band index out of range");
    const double gpay = p.schedule.bands[band].rate;
    const double age0 = p.mortality.age0;
    const long n = g.n_nodes();

    std::vector<double> drift(n), diff(n), src(n);
    for (long j = 0; j < n; ++j) {
        const double y = g.y(j);
        drift[j] = p.r * y - (gpay + p.alpha);
        diff[j] = 0.5 * p.sigma * p.sigma * y * y;
    }
    const std::vector<double> v2 = solve_v2(p, g, band);
    detail::ImplicitStepper stepper(g, drift, diff);

    ValueSurface s;
    s.grid = g;
    s.regime = Regime::v1;
    s.band = band;
    s.values.resize(static_cast<std::size_t>(g.n_times()) * n);

    std::vector<double> v(n);
    for (long j = 0; j < n; ++j) v[j] = g.y(j);
    std::copy(v.begin(), v.end(), s.row(g.nt));
    for (long i = g.nt - 1; i >= 0; --i) {
        const double lam = hazard(p.mortality, age0 + g.time(i));
        for (long j = 0; j < n; ++j) src[j] = gpay + lam * g.y(j);
        stepper.step(p.r + lam, src, v2[static_cast<std::size_t>(i)], v);
        std::copy(v.begin(), v.end(), s.row(i));
    }
    return s;
}

namespace detail {

struct V0Run {
    std::vector<double> row0;
    ValueSurface surface;
    InitiationMask mask;
};

inline V0Run run_v0(const ContractParams& p, const Grid& g,
                    std::span<const ValueSurface> v1_surfaces, double min_initiation_time,
                    bool keep_surface, bool keep_mask) {
    require_dynamics(p);
    require_valid(g);
    if (!(min_initiation_time >= g.t0 - 1e-12) || !(min_initiation_time <= g.T + 1e-12))
        throw std::invalid_argument("solve_v0: min_initiation_time outside [t0, T]");

    const double age0 = p.mortality.age0;
    const long n = g.n_nodes();
    const auto bands = band_row_map(p.schedule, age0, g);

    // one v1 surface per band active on [t0, T], on the same grid
    std::vector<const ValueSurface*> by_band(p.schedule.bands.size(), nullptr);
    for (const auto& s : v1_surfaces) {
        if (s.regime == Regime::v1 && s.band < by_band.size()) by_band[s.band] = &s;
    }
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const ValueSurface* s = by_band[bands[i]];
        if (s == nullptr)
            throw std::invalid_argument("solve_v0: missing v1 surface for band " +
                                        std::to_string(bands[i]));
        if (!(s->grid == g))
            throw std::invalid_argument("solve_v0: v1 surface grid mismatch");
    }

    std::vector<double> drift(n), diff(n), src(n);
    for (long j = 0; j < n; ++j) {
        const double y = g.y(j);
        drift[j] = (p.r - p.beta) * y - p.alpha;
        diff[j] = 0.5 * p.sigma * p.sigma * y * y;
    }
    const std::vector<double> abar = annuity_path(p, g);
    ImplicitStepper stepper(g, drift, diff);

    // first row index at which exercise applies
    const long i_min = std::max<long>(
        0, static_cast<long>(std::ceil((min_initiation_time - g.t0) / g.dt() - 1e-9)));

    V0Run run;
    if (keep_surface) {
        run.surface.grid = g;
        run.surface.regime = Regime::v0;
        run.surface.values.resize(static_cast<std::size_t>(g.n_times()) * n);
    }
    if (keep_mask) {
        run.mask.grid = g;
        run.mask.initiate.assign(static_cast<std::size_t>(g.n_times()) * n, 0);
    }

    std::vector<double> v(n);
    for (long j = 0; j < n; ++j) v[j] = g.y(j);

    auto apply_obstacle = [&](long i) {
        const double* ex = by_band[bands[static_cast<std::size_t>(i)]]->row(i);
        std::uint8_t* mrow =
            keep_mask ? run.mask.initiate.data() + static_cast<std::size_t>(i) * n : nullptr;
        for (long j = 0; j < n; ++j) {
            if (mrow && ex[j] >= v[j] - kTolExercise) mrow[j] = 1;
            if (ex[j] > v[j]) v[j] = ex[j];
        }
    };

    if (g.nt >= i_min) apply_obstacle(g.nt);
    if (keep_surface) std::copy(v.begin(), v.end(), run.surface.row(g.nt));

    for (long i = g.nt - 1; i >= 0; --i) {
        const double lam = hazard(p.mortality, age0 + g.time(i));
        for (long j = 0; j < n; ++j) src[j] = lam * g.y(j);
        const double gnow = p.schedule.bands[bands[static_cast<std::size_t>(i)]].rate;
        stepper.step(p.r + lam - p.beta, src, gnow * abar[static_cast<std::size_t>(i)], v);
        if (i >= i_min) apply_obstacle(i);
        if (keep_surface) std::copy(v.begin(), v.end(), run.surface.row(i));
    }
    run.row0 = std::move(v);
    return run;
}

}  // namespace detail

// Pre-initiation value by backward induction with the initiation obstacle.
// At each time with t >= min_initiation_time, one implicit step of the
// continuation PDE is followed by v0 <- max(v0, v1(t, band(t), y)); the mask
// records where exercise is (weakly) optimal. Pass min_initiation_time = t0
// for the unconstrained problem; later values give the delay-constrained
// variant (pure continuation before that time, mask false there).
inline V0Solution solve_v0(const ContractParams& p, const Grid& g,
                           std::span<const ValueSurface> v1_surfaces,
                           double min_initiation_time) {
    auto run = detail::run_v0(p, g, v1_surfaces, min_initiation_time, true, true);
    return {std::move(run.surface), std::move(run.mask)};
}

// Time-zero row of the delay-constrained v0 only; used by the break-even
// inversion where the full surface is not needed.
inline std::vector<double> v0_initial_row(const ContractParams& p, const Grid& g,
                                          std::span<const ValueSurface> v1_surfaces,
                                          double min_initiation_time) {
    return detail::run_v0(p, g, v1_surfaces, min_initiation_time, false, false).row0;
}

}  // namespace glwb
