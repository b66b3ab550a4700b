#pragma once

#include <stdexcept>
#include <string>

namespace wicknls {

// Quadrature/transform grid too small for the degree of the integrand.
class aliasing_error : public std::runtime_error {
public:
    explicit aliasing_error(const std::string& what) : std::runtime_error(what) {}
};

// Lattice or sample sizes beyond what brute-force paths are willing to handle.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive integrator drove the step size below representable resolution.
class stiffness_error : public std::runtime_error {
public:
    explicit stiffness_error(const std::string& what) : std::runtime_error(what) {}
};

// Degenerate Monte Carlo state (e.g. all importance weights zero).
class estimation_error : public std::runtime_error {
public:
    explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wicknls
