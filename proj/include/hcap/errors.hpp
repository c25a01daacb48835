#pragma once

#include <stdexcept>
#include <string>

namespace hcap {

/// Base for every error the library raises deliberately.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Expression evaluated outside its domain (sqrt of negative, division by
/// zero, log of nonpositive). Carries the offending node's printed form.
struct EvalError : Error {
    using Error::Error;
};

/// S-expression text that does not parse.
struct ParseError : Error {
    using Error::Error;
};

/// Jet combined with an incompatible jet (dimension mismatch) or a partial
/// requested beyond the truncation order.
struct JetError : Error {
    using Error::Error;
};

/// Graph height nonpositive, point outside the declared domain, or a chart
/// that fails the immersion test.
struct GeometryError : Error {
    using Error::Error;
};

/// Point outside the source model of a model map, or at its pole.
struct DomainError : Error {
    using Error::Error;
};

/// Requested neighborhood cannot be written as a vertical graph. Carries the
/// largest parameter radius that passed the graph test.
struct NonGraphicalError : Error {
    double admissible_radius = 0.0;
    NonGraphicalError(const std::string& what, double radius)
        : Error(what), admissible_radius(radius) {}
};

/// Hessian of rho is not positive definite where the positive-definite
/// branch is required.
struct BranchError : Error {
    using Error::Error;
};

/// A stated precondition of an estimate operation fails (vicinity bounds,
/// isothermal chart, umbilic exclusion).
struct PreconditionError : Error {
    using Error::Error;
};

/// Umbilic degeneracy: H^2 - K below the caller's floor, so the kappa_1
/// gradient formula's denominator vanishes.
struct DegeneracyError : PreconditionError {
    using PreconditionError::PreconditionError;
};

/// Newton iteration failed: damping underflow or unusable initial iterate.
struct SolveError : Error {
    using Error::Error;
};

}  // namespace hcap
