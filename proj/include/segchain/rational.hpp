#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace segchain {

// Exact rational scalar. Every probability in the library is one of these.
using Rational = mpq_class;

// Parses "num/den" or an integer string ("3", "-2"). Whitespace around the
// tokens is not accepted. Throws ParseError.
Rational parse_rational(std::string_view text);

// Canonical form: "num/den", or "num" when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

// Checks 0 <= value <= 1.
bool is_probability(const Rational& value);

Rational power(const Rational& base, std::uint64_t exponent);

// Simplest rational (smallest denominator) inside
// [value * (1 - rel_tol), value * (1 + rel_tol)]. Used to bring irrational
// parameters such as sqrt(2)/2 or ln-based schedules into exact arithmetic.
Rational snap_to_rational(double value, double rel_tol);

} // namespace segchain
