#pragma once

#include <stdexcept>
#include <string>

namespace segchain {

// Base of every error the library throws. The CLI maps the subclasses onto
// exit codes: ParseError -> 2, BudgetExceeded -> 3, InvariantViolation -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: unparsable rationals, bad documents, rows that do not sum
// to one, unknown state labels.
class ParseError : public Error {
public:
    using Error::Error;
};

// Arguments that do not fit together (vectors of different lengths, horizons
// that disagree, parameters out of range).
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// An enumeration or trajectory cap was hit; the instance is too large for
// the exact method that was asked for.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

// A mathematical invariant failed to hold on an exact computation. Carries a
// human-readable witness.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

} // namespace segchain
