#pragma once

#include <stdexcept>
#include <string>

namespace rydosc {

/// Population leaked into the guard levels of the truncated Fock space.
class TruncationError : public std::runtime_error {
public:
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid physical or angular-momentum input.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive step-size control collapsed below the step floor.
class StiffnessError : public std::runtime_error {
public:
    explicit StiffnessError(const std::string& what) : std::runtime_error(what) {}
};

/// Phase-space grid does not contain the state.
class GridError : public std::runtime_error {
public:
    explicit GridError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rydosc
