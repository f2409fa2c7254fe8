#pragma once

#include <gmpxx.h>

#include <string>

namespace stacl {

using Rational = mpq_class;

// Accepts "p/q", "p" and rejects anything else.  Result is in lowest terms.
Rational parse_rational(const std::string& text);

// Lowest terms with an explicit denominator: "1/1", "0/1", "33/160".
std::string rational_string(const Rational& r);

}  // namespace stacl
