#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "glwb/contract.hpp"

namespace glwb {

// Uniform (time, moneyness) grid. Time runs from t0 (the valuation date,
// age0) to T = age_cap - age0; moneyness covers [0, 1] with y=0 and y=1 as
// exact nodes.
struct Grid {
    double t0 = 0.0;
    double T = 70.0;
    long nt = 2;  // time steps
    long ny = 2;  // moneyness steps

    double dt() const { return (T - t0) / static_cast<double>(nt); }
    double dy() const { return 1.0 / static_cast<double>(ny); }
    double time(long i) const { return t0 + static_cast<double>(i) * dt(); }
    double y(long j) const { return static_cast<double>(j) * dy(); }
    long n_times() const { return nt + 1; }
    long n_nodes() const { return ny + 1; }

    bool operator==(const Grid& o) const {
        return t0 == o.t0 && T == o.T && nt == o.nt && ny == o.ny;
    }
};

inline void require_valid(const Grid& g) {
    if (g.nt < 2 || g.ny < 2 || !(g.T > g.t0))
        throw std::invalid_argument("grid: need nt >= 2, ny >= 2 and T > t0");
}

// Default production resolution: dy = 1/400, dt = 1/240 year.
inline constexpr long kDefaultNy = 400;
inline constexpr long kDefaultStepsPerYear = 240;

inline Grid make_grid(const ContractParams& p, long ny = kDefaultNy,
                      long steps_per_year = kDefaultStepsPerYear) {
    const double T = p.mortality.age_cap - p.mortality.age0;
    Grid g;
    g.t0 = 0.0;
    g.T = T;
    g.nt = static_cast<long>(std::lround(T * static_cast<double>(steps_per_year)));
    g.ny = ny;
    require_valid(g);
    return g;
}

enum class Regime { v0, v1, v2 };

// Discretized value function over the grid, row-major in time.
struct ValueSurface {
    Grid grid;
    Regime regime = Regime::v0;
    std::size_t band = 0;  // payout band, meaningful for v1/v2
    std::vector<double> values;

    double at(long i, long j) const { return values[static_cast<std::size_t>(i) * grid.n_nodes() + j]; }
    double* row(long i) { return values.data() + static_cast<std::size_t>(i) * grid.n_nodes(); }
    const double* row(long i) const { return values.data() + static_cast<std::size_t>(i) * grid.n_nodes(); }
};

// Bilinear interpolation; exact at grid nodes. Out-of-bounds queries are errors.
inline double interpolate(const ValueSurface& s, double t, double y) {
    const Grid& g = s.grid;
    const double eps = 1e-12;
    if (!(t >= g.t0 - eps) || !(t <= g.T + eps) || !(y >= -eps) || !(y <= 1.0 + eps))
        throw std::invalid_argument("interpolate: query outside grid bounds");
    double ti = (t - g.t0) / g.dt();
    double yj = y / g.dy();
    long i = static_cast<long>(std::floor(ti));
    long j = static_cast<long>(std::floor(yj));
    if (i >= g.nt) i = g.nt - 1;
    if (j >= g.ny) j = g.ny - 1;
    if (i < 0) i = 0;
    if (j < 0) j = 0;
    const double u = ti - static_cast<double>(i);
    const double w = yj - static_cast<double>(j);
    return (1.0 - u) * ((1.0 - w) * s.at(i, j) + w * s.at(i, j + 1)) +
           u * ((1.0 - w) * s.at(i + 1, j) + w * s.at(i + 1, j + 1));
}

namespace detail {
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace detail

// CSV layout: header row of y-grid values, then one row per time with a
// leading age column. 17 significant digits so doubles round-trip.
inline void write_surface_csv(const ValueSurface& s, double age0, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_surface_csv: cannot open '" + path + "'");
    out << "age";
    for (long j = 0; j < s.grid.n_nodes(); ++j) out << ',' << detail::fmt17(s.grid.y(j));
    out << '\n';
    for (long i = 0; i < s.grid.n_times(); ++i) {
        out << detail::fmt17(age0 + s.grid.time(i));
        for (long j = 0; j < s.grid.n_nodes(); ++j) out << ',' << detail::fmt17(s.at(i, j));
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_surface_csv: write failed for '" + path + "'");
}

}  // namespace glwb
