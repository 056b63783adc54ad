#pragma once

#include <stdexcept>
#include <string>

namespace glwb {

// Thrown when a linear solve or time-stepping scheme breaks down
// (zero pivot, non-finite values). Distinct from std::invalid_argument,
// which covers bad user input.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace glwb
