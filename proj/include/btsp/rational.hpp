#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace btsp {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p", "-p" or "p/q". Throws std::invalid_argument on malformed text or q == 0.
Rational parse_rational(std::string_view text);

// Canonical "p/q" rendering (q > 0, gcd 1). Integers are written as "p/1".
std::string to_fraction(const Rational& value);

// Fixed-point decimal rendering, rounded half away from zero.
std::string to_decimal(const Rational& value, int digits = 6);

}  // namespace btsp
