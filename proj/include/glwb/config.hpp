#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "glwb/contract.hpp"

namespace glwb {

// Contents of a plain-text key/value parameter file. Monte Carlo settings
// are optional; everything else lands in `params`.
struct ParsedConfig {
    ContractParams params;
    std::optional<long> n_paths;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps_per_year;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view v, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + std::string(v));
    return out;
}

inline long long parse_int(std::string_view v, const std::string& key) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + std::string(v));
    return out;
}

// "50:0.04,65:0.05" -> bands
inline PayoutSchedule parse_bands(std::string_view v) {
    PayoutSchedule s;
    std::string item;
    std::stringstream ss{std::string(v)};
    while (std::getline(ss, item, ',')) {
        std::string_view t = trim(item);
        auto colon = t.find(':');
        if (colon == std::string_view::npos)
            throw std::invalid_argument("config: band entries must look like age:rate, got '" + std::string(t) + "'");
        s.bands.push_back({parse_double(trim(t.substr(0, colon)), "bands"),
                           parse_double(trim(t.substr(colon + 1)), "bands")});
    }
    if (s.bands.empty())
        throw std::invalid_argument("config: bands list is empty");
    return s;
}

}  // namespace detail

// Parses `key = value` lines; '#' starts a comment. Unknown keys are errors.
// Documented keys: r, sigma, alpha, beta, gompertz_m, gompertz_b, age0,
// age_cap, bands, and the optional n_paths, seed, steps_per_year.
inline ParsedConfig parse_config(std::istream& in, const std::string& origin = "<config>") {
    ParsedConfig cfg;
    bool have_bands = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s{line};
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key{detail::trim(s.substr(0, eq))};
        std::string_view val = detail::trim(s.substr(eq + 1));

        if (key == "r") cfg.params.r = detail::parse_double(val, key);
        else if (key == "sigma") cfg.params.sigma = detail::parse_double(val, key);
        else if (key == "alpha") cfg.params.alpha = detail::parse_double(val, key);
        else if (key == "beta") cfg.params.beta = detail::parse_double(val, key);
        else if (key == "gompertz_m") cfg.params.mortality.m = detail::parse_double(val, key);
        else if (key == "gompertz_b") cfg.params.mortality.b = detail::parse_double(val, key);
        else if (key == "age0") cfg.params.mortality.age0 = detail::parse_double(val, key);
        else if (key == "age_cap") cfg.params.mortality.age_cap = detail::parse_double(val, key);
        else if (key == "bands") { cfg.params.schedule = detail::parse_bands(val); have_bands = true; }
        else if (key == "n_paths") cfg.n_paths = static_cast<long>(detail::parse_int(val, key));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(val, key));
        else if (key == "steps_per_year") cfg.steps_per_year = static_cast<int>(detail::parse_int(val, key));
        else throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!have_bands)
        throw std::invalid_argument(origin + ": missing required key 'bands'");
    return cfg;
}

inline ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    return parse_config(in, path);
}

}  // namespace glwb
