#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>

namespace roundoff {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

// Exact value of a decimal or scientific literal such as "6.36", "20e3", "17." or "-1.3e-23".
Rational parse_decimal(const std::string& text);

// Accepts "p", "p/q" and decimal literals.
Rational parse_rational(const std::string& text);

// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

Rational pow2(int k);

// Largest dyadic value with a `bits`-bit significand that is <= q (resp. smallest >= q).
Rational round_down(const Rational& q, int bits);
Rational round_up(const Rational& q, int bits);

// True when q has a binary significand of at most `precision` bits (exponent range ignored).
bool is_representable(const Rational& q, int precision);

// Round-to-nearest-even to a `precision`-bit binary significand.
Rational round_nearest(const Rational& q, int precision);

// Total bit size of numerator and denominator.
std::size_t bit_size(const Rational& q);

// Best rational approximation of x with denominator at most max_den (continued fractions).
Rational rationalize(double x, const Integer& max_den);

Rational abs(const Rational& q);

}  // namespace roundoff
