#pragma once

#include <stdexcept>
#include <string>

namespace syl {

// Error hierarchy. The CLI maps these onto exit codes:
// inadmissible input -> 2, numerical failure -> 3.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameter or argument outside the admissible set (bad (n,k), h out of range, ...).
struct InadmissibleInput : Error {
    explicit InadmissibleInput(const std::string& msg) : Error(msg) {}
};

// The slope variable reached |1 - xi_dot^2| below the guard while k >= 2,
// where the equation degenerates.
struct DegenerateSlope : Error {
    explicit DegenerateSlope(const std::string& msg) : Error(msg) {}
};

// Step-size underflow or other integrator breakdown.
struct IntegrationFailure : Error {
    explicit IntegrationFailure(const std::string& msg) : Error(msg) {}
};

// Period detection failed (no second minimum in span, or phase did not return).
struct NoPeriod : Error {
    explicit NoPeriod(const std::string& msg) : Error(msg) {}
};

// Shared tolerance bundle. Defaults are the project-wide contract:
// relative 1e-10 / absolute 1e-12 for time stepping, slope guard 1e-13,
// event location to 1e-12 in t. max_step keeps the cubic Hermite dense
// output at the same accuracy level as the steps themselves.
struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
    double max_step = 0.02;
    double guard = 1e-13;
    double event = 1e-12;
};

} // namespace syl
