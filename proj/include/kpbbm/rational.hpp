#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace kpbbm {

// Exact rational numbers. GMP keeps them reduced with a positive denominator.
using Rational = mpq_class;

// Accepts "p", "p/q" and finite decimals such as "-0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

Rational pow(const Rational& base, long exponent);
bool is_integer(const Rational& q);
int sign(const Rational& q);
Rational abs(const Rational& q);

// Exact square root when q is a perfect square, otherwise false.
bool exact_sqrt(const Rational& q, Rational& root);
// Real n-th root when it is rational (negative q allowed for odd n).
bool exact_root(const Rational& q, unsigned n, Rational& root);

}  // namespace kpbbm
