#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace csplab {

// Exact fractions. mpq_class keeps results canonical after every operation.
using Rational = mpq_class;
using BigInt = mpz_class;

// Accepts "a", "a/b" and plain decimals such as "0.45".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);

BigInt lcm(const BigInt& a, const BigInt& b);
BigInt ceil_div(const BigInt& num, const BigInt& den);
BigInt ceil(const Rational& q);

}  // namespace csplab

namespace csplab {

// num/den in lowest terms.
inline Rational make_rational(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace csplab
