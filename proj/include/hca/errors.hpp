#pragma once

#include <stdexcept>
#include <string>

namespace hca {

// Base class for all library errors. Subclasses map onto the CLI exit-code
// contract: configuration/validation problems exit 2, solver failures exit 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user-supplied values: dimension mismatches, invalid distribution
// parameters, unknown names, malformed files.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Ill-formed model structure, e.g. a cyclic causal graph.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& msg) : Error(msg) {}
};

// Dataset and model do not share provenance (wrong source, seed mismatch).
class ProvenanceError : public Error {
public:
    explicit ProvenanceError(const std::string& msg) : Error(msg) {}
};

// A solution vector expected to be a 0/1 code has entries too far from
// integral to round.
class DegenerateSolutionError : public Error {
public:
    explicit DegenerateSolutionError(const std::string& msg) : Error(msg) {}
};

// Requested estimator/feature combination is not implemented.
class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

// An operation's precondition does not hold (e.g. attacking with a
// non-integral parameterization, or a brute-force size guard tripped).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// Internal solver failure (iteration cap, numerical breakdown). Distinct from
// an LP being infeasible or unbounded, which is a status, not an error.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

} // namespace hca
