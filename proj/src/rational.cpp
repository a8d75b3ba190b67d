#include "slicelab/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace slicelab {

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den) || den[0] == '-' || den[0] == '+') {
    throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
  }
  const std::string num_s(num[0] == '+' ? num.substr(1) : num);
  BigInt n(num_s, 10);
  BigInt d(std::string(den), 10);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

double to_double(const Rational& q) { return q.get_d(); }

Rational ratio(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("division by zero");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

BigInt binomial(long n, long r) {
  if (n < 0) throw std::domain_error("binomial with negative upper index");
  if (r < 0 || r > n) return 0;
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
  return out;
}

BigInt falling_factorial(long a, long b) {
  if (b < 0) throw std::domain_error("falling factorial with negative length");
  BigInt out = 1;
  for (long j = 0; j < b; ++j) out *= a - j;
  return out;
}

Rational power(const Rational& base, unsigned exponent) {
  Rational out(1);
  Rational b = base;
  while (exponent) {
    if (exponent & 1U) out *= b;
    exponent >>= 1U;
    if (exponent) b *= b;
  }
  return out;
}

}  // namespace slicelab
