#pragma once

#include <stdexcept>
#include <string>

namespace parity_qaoa {

/// Bad argument to a public operation (wrong arity, out-of-range count, ...).
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An input document or object failed validation. Maps to CLI exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A brute-force or dense-simulation cap was exceeded. Maps to CLI exit code 3.
struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SynthesisFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PrioritizationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSpectrum : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace parity_qaoa
