#pragma once

#include <stdexcept>
#include <string>

namespace ckn {

/// Base class for numerical failures raised by the library. Precondition
/// violations use std::invalid_argument / std::domain_error instead.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of its subdivision budget.
class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Integrand behaves like t^sigma with sigma <= -1 at a finite endpoint.
class SingularityTooStrong : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A weighted integral is infinite for the given profile and space.
class NonIntegrable : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A denominator term of the CKN ratio vanished.
class DivisionDegenerate : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Requested extremal family does not match the parameter classification.
class CaseMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ckn
