#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace slicelab {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Parses "a", "-a", "a/b". Throws std::invalid_argument on malformed text
/// or a zero denominator. The result is canonical.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" text; integers are written without a denominator.
std::string to_string(const Rational& q);

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// num/den in canonical form. Throws std::domain_error when den == 0.
Rational ratio(const BigInt& num, const BigInt& den);

double to_double(const Rational& q);

/// binom(n, r) for integer n >= 0; zero when r < 0 or r > n.
BigInt binomial(long n, long r);

/// a(a-1)...(a-b+1), the empty product for b == 0. a may be negative.
BigInt falling_factorial(long a, long b);

Rational power(const Rational& base, unsigned exponent);

}  // namespace slicelab
