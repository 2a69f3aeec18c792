#pragma once

#include <stdexcept>
#include <string>

namespace decay {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Root finding failed (non-convergence, duplicate roots, count mismatch).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normalization denominator vanished.
struct DegenerateStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation too close to a pole of the Green's function.
struct PoleProximityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A representation was used outside its validity (e.g. improper pole in the split form).
struct RepresentationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Computed data violates an invariant (e.g. P < S).
struct DataIntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace decay
