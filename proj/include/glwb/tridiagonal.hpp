#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "glwb/errors.hpp"

namespace glwb {

// Thomas elimination for a tridiagonal system. lower/diag/upper/rhs all have
// length n; lower[0] and upper[n-1] are ignored. Writes the solution into x
// using `scratch` (resized to n) as workspace. The implicit schemes here
// produce diagonally dominant systems, so a vanishing pivot signals a bug.
inline void tridiagonal_solve(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<const double> rhs,
                              std::span<double> x, std::vector<double>& scratch) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n)
        throw std::invalid_argument("tridiagonal_solve: inconsistent lengths");
    if (n == 0) return;
    scratch.resize(n);

    double piv = diag[0];
    if (!(std::fabs(piv) > 1e-300) || !std::isfinite(piv))
        throw numerical_error("tridiagonal_solve: zero pivot at row 0");
    x[0] = rhs[0] / piv;
    scratch[0] = upper[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * scratch[i - 1];
        if (!(std::fabs(piv) > 1e-300) || !std::isfinite(piv))
            throw numerical_error("tridiagonal_solve: zero pivot at row " + std::to_string(i));
        scratch[i] = upper[i] / piv;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] -= scratch[i] * x[i + 1];
}

// Allocating convenience overload.
inline std::vector<double> tridiagonal_solve(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
    std::vector<double> x(diag.size()), scratch;
    tridiagonal_solve(lower, diag, upper, rhs, x, scratch);
    return x;
}

}  // namespace glwb
