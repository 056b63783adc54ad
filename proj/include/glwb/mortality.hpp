#pragma once

#include <cmath>
#include <stdexcept>

namespace glwb {

// Gompertz mortality law, hazard(x) = (1/b) * exp((x - m) / b).
// Survival is truncated to zero at age_cap so every life-contingent
// integral has a finite horizon.
struct GompertzModel {
    double m = 87.25;        // modal age, years
    double b = 9.5;          // dispersion, years
    double age0 = 50.0;      // valuation start age, years
    double age_cap = 120.0;  // maximum attainable age, years
};

inline double hazard(const GompertzModel& g, double age) {
    if (!std::isfinite(age) || age < 0.0)
        throw std::invalid_argument("hazard: age must be finite and non-negative");
    return std::exp((age - g.m) / g.b) / g.b;
}

// P[alive at age + t | alive at age] = exp(-hazard(age) * b * (e^{t/b} - 1)),
// forced to 0 once age + t reaches the cap.
inline double survival(const GompertzModel& g, double age, double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("survival: t must be finite and non-negative");
    if (age + t >= g.age_cap) return 0.0;
    return std::exp(-hazard(g, age) * g.b * std::expm1(t / g.b));
}

// Price of a continuous life annuity paying 1 per year for life, starting at
// `age`: integral of e^{-r q} * survival(age, q) over [0, age_cap - age].
// Composite Simpson at step <= 1/365 year.
inline double annuity_price(const GompertzModel& g, double r, double age) {
    if (!std::isfinite(age) || age > g.age_cap)
        throw std::invalid_argument("annuity_price: age beyond age_cap");
    if (!std::isfinite(r) || r < 0.0)
        throw std::invalid_argument("annuity_price: r must be non-negative");
    const double horizon = g.age_cap - age;
    if (horizon <= 0.0) return 0.0;

    long n = static_cast<long>(std::ceil(horizon * 365.0));
    if (n % 2 != 0) ++n;
    const double h = horizon / static_cast<double>(n);
    auto f = [&](double q) { return std::exp(-r * q) * survival(g, age, q); };

    double odd = 0.0, even = 0.0;
    for (long k = 1; k < n; k += 2) odd += f(static_cast<double>(k) * h);
    for (long k = 2; k < n; k += 2) even += f(static_cast<double>(k) * h);
    return h / 3.0 * (f(0.0) + 4.0 * odd + 2.0 * even + f(horizon));
}

}  // namespace glwb
