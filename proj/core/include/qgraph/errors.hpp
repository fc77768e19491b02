#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

/// Base class of everything thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structurally invalid input: malformed graphs, non-self-adjoint vertex
/// conditions, coordinates outside an edge.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed graph description documents.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Mathematically excluded requests: k = 0, poles, scars where a regular
/// value does not exist, degenerate eigenspaces.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation was requested at (or numerically indistinguishable from) a pole
/// of the resolvent. Carries the best available estimate of the offending
/// eigen-wavenumber.
class PoleError : public DomainError {
public:
    PoleError(const std::string& message, double nearest)
        : DomainError(message), nearest_k(nearest) {}
    double nearest_k;
};

/// A multi-dimensional eigenspace or scar space was found where the requested
/// operation supports only the non-degenerate case.
class DegeneracyError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The eigenvalue scan produced a different root set when the grid was
/// refined; the requested step cannot be trusted.
class ScanError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace qgraph
