#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "glwb/grid.hpp"
#include "glwb/pde.hpp"

namespace glwb {

// Initiate/delay classification over (age, moneyness). true = initiate.
struct InitiationRegion {
    Grid grid;
    double start_age = 0.0;  // age at grid time t0
    std::vector<std::uint8_t> initiate;
    std::string fingerprint;

    bool at(long i, long j) const {
        return initiate[static_cast<std::size_t>(i) * grid.n_nodes() + j] != 0;
    }
    long row_for_age(double age) const {
        const double t = age - start_age;
        if (t < grid.t0 - 1e-9 || t > grid.T + 1e-9)
            throw std::invalid_argument("region: age outside grid range");
        long i = std::lround((t - grid.t0) / grid.dt());
        if (i < 0) i = 0;
        if (i > grid.nt) i = grid.nt;
        return i;
    }
};

inline std::string params_fingerprint(const ContractParams& p) {
    std::ostringstream os;
    os << "r=" << p.r << ";sigma=" << p.sigma << ";alpha=" << p.alpha << ";beta=" << p.beta
       << ";m=" << p.mortality.m << ";b=" << p.mortality.b << ";age0=" << p.mortality.age0
       << ";cap=" << p.mortality.age_cap << ";bands=";
    for (const auto& b : p.schedule.bands) os << b.start_age << ':' << b.rate << ',';
    return os.str();
}

// Packages the obstacle-active mask from solve_v0 as a region.
inline InitiationRegion extract_region(const V0Solution& sol, const ContractParams& p) {
    if (!(sol.surface.grid == sol.mask.grid))
        throw std::invalid_argument("extract_region: surface/mask grid mismatch");
    InitiationRegion r;
    r.grid = sol.mask.grid;
    r.start_age = p.mortality.age0;
    r.initiate = sol.mask.initiate;
    r.fingerprint = params_fingerprint(p);
    return r;
}

// Maximal contiguous moneyness intervals where delay is optimal at the given
// age row. Supports fragmented regions.
inline std::vector<std::pair<double, double>> boundary_intervals(const InitiationRegion& r,
                                                                 double age) {
    const long i = r.row_for_age(age);
    std::vector<std::pair<double, double>> out;
    const long n = r.grid.n_nodes();
    long start = -1;
    for (long j = 0; j <= n; ++j) {
        const bool delay = (j < n) && !r.at(i, j);
        if (delay && start < 0) start = j;
        if (!delay && start >= 0) {
            out.emplace_back(r.grid.y(start), r.grid.y(j - 1));
            start = -1;
        }
    }
    return out;
}

struct ContainmentReport {
    bool a_delay_subset_of_b = true;
    bool b_delay_subset_of_a = true;
    long differing_cells = 0;
    std::vector<std::pair<long, long>> violations;  // delay in a but not in b
};

// Compares delay sets cell by cell on identical grids.
inline ContainmentReport compare_regions(const InitiationRegion& a, const InitiationRegion& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("compare_regions: grid mismatch");
    ContainmentReport rep;
    for (long i = 0; i < a.grid.n_times(); ++i) {
        for (long j = 0; j < a.grid.n_nodes(); ++j) {
            const bool da = !a.at(i, j), db = !b.at(i, j);
            if (da != db) ++rep.differing_cells;
            if (da && !db) {
                rep.a_delay_subset_of_b = false;
                if (rep.violations.size() < 64) rep.violations.emplace_back(i, j);
            }
            if (db && !da) rep.b_delay_subset_of_a = false;
        }
    }
    return rep;
}

// CSV rows "age,y,initiate", age-major then y ascending.
inline void export_region_csv(const InitiationRegion& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("export_region_csv: cannot open '" + path + "'");
    out << "age,y,initiate\n";
    for (long i = 0; i < r.grid.n_times(); ++i)
        for (long j = 0; j < r.grid.n_nodes(); ++j)
            out << detail::fmt17(r.start_age + r.grid.time(i)) << ',' << detail::fmt17(r.grid.y(j))
                << ',' << (r.at(i, j) ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("export_region_csv: write failed for '" + path + "'");
}

inline InitiationRegion import_region_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("import_region_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("age,y,initiate", 0) != 0)
        throw std::invalid_argument("import_region_csv: bad header in '" + path + "'");
    std::vector<double> ages, ys;
    std::vector<std::uint8_t> flags;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, y, f;
        if (!std::getline(ss, a, ',') || !std::getline(ss, y, ',') || !std::getline(ss, f, ','))
            throw std::invalid_argument("import_region_csv: bad row '" + line + "'");
        ages.push_back(std::stod(a));
        ys.push_back(std::stod(y));
        flags.push_back(f == "1" ? 1 : 0);
    }
    if (flags.empty())
        throw std::invalid_argument("import_region_csv: no data rows in '" + path + "'");
    std::size_t ncols = 1;
    while (ncols < ys.size() && ys[ncols] > ys[ncols - 1]) ++ncols;
    if (flags.size() % ncols != 0)
        throw std::invalid_argument("import_region_csv: ragged rows in '" + path + "'");
    InitiationRegion r;
    r.grid.ny = static_cast<long>(ncols) - 1;
    r.grid.nt = static_cast<long>(flags.size() / ncols) - 1;
    r.grid.t0 = 0.0;
    r.grid.T = ages.back() - ages.front();
    r.start_age = ages.front();
    r.initiate = std::move(flags);
    r.fingerprint = path;
    return r;
}

}  // namespace glwb
