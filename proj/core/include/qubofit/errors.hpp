#pragma once

#include <stdexcept>
#include <string>

namespace qubofit {

/// Bad input: violated precondition or type invariant. The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A coefficient lies outside the range of a fixed-point format.
class OutOfRange : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// min == max where a min-max normalization needs a nonempty range.
class DegenerateRange : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Exhaustive enumeration requested on a problem that is too large.
class TooLarge : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// External sampler failed to run or produced an unusable reply. CLI exit code 3.
class ExternalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// External sampler reported an energy that does not match its bits.
class EnergyMismatch : public ExternalFailure {
public:
    using ExternalFailure::ExternalFailure;
};

}  // namespace qubofit
