#pragma once

#include <stdexcept>
#include <string>

namespace billiard {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad period, non-positive axis, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The curve is not embedded or not strictly convex where it must be.
class ConvexityError : public Error {
public:
    using Error::Error;
};

/// A phase point lies outside the twist domain of the billiard map.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative solver failed to converge.
class SolverError : public Error {
public:
    SolverError(const std::string& what, int iterations)
        : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

/// A step of a trajectory failed; carries the index of the failing step.
class StepError : public Error {
public:
    StepError(const std::string& what, int step)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

    int step() const noexcept { return step_; }

private:
    int step_;
};

} // namespace billiard
