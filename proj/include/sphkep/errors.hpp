// sphkep/errors.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace sphkep {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on plain arguments was violated (bad elements, bad radius, ...).
class InvalidArgument final : public Error {
public:
    using Error::Error;
};

/// Central projection requested for a point at or below the equator.
class HemisphereError final : public Error {
public:
    using Error::Error;
};

/// Evaluation at (or within tolerance of) one of the two poles.
class PoleSingularity final : public Error {
public:
    using Error::Error;
};

/// A solve has no solution for the given inputs.
class NoSolution final : public Error {
public:
    using Error::Error;
};

/// Inputs are degenerate (e.g. zero chord and zero radius sum).
class DegenerateInput final : public Error {
public:
    using Error::Error;
};

/// A quadrature did not reach the requested tolerance.
class QuadratureFailure final : public Error {
public:
    using Error::Error;
};

/// Operation is defined only for unit sphere radius.
class UnsupportedRadius final : public Error {
public:
    using Error::Error;
};

/// Adaptive integration could not take an acceptable step.
class StepFailure final : public Error {
public:
    using Error::Error;
};

/// A trajectory left the open northern hemisphere.
class HemisphereExit final : public Error {
public:
    using Error::Error;
};

/// Level-set scan produced no bin with at least two members.
class EmptyBins final : public Error {
public:
    using Error::Error;
};

} // namespace sphkep
