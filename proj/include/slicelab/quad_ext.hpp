#pragma once

#include <stdexcept>
#include <string>

#include "slicelab/rational.hpp"

namespace slicelab {

/// Element a + b*sqrt(D) of Q(sqrt(D)) for a fixed positive rational D.
/// Cube Fourier coefficients live here with D = p(1-p).
class QuadExt {
 public:
  QuadExt() = default;
  QuadExt(Rational a, Rational b, Rational radicand)
      : a_(std::move(a)), b_(std::move(b)), d_(std::move(radicand)) {}
  static QuadExt rational(Rational a, Rational radicand) {
    return QuadExt(std::move(a), 0, std::move(radicand));
  }

  const Rational& rational_part() const { return a_; }
  const Rational& radical_part() const { return b_; }
  const Rational& radicand() const { return d_; }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }

  /// Throws std::domain_error when the radical part is nonzero.
  const Rational& as_rational() const {
    if (b_ != 0) throw std::domain_error("value is not rational");
    return a_;
  }

  double to_double() const;
  std::string to_string() const;

  QuadExt& operator+=(const QuadExt& o);
  QuadExt& operator-=(const QuadExt& o);
  QuadExt& operator*=(const QuadExt& o);
  QuadExt& operator*=(const Rational& s) {
    a_ *= s;
    b_ *= s;
    return *this;
  }

  friend QuadExt operator+(QuadExt x, const QuadExt& y) { return x += y; }
  friend QuadExt operator-(QuadExt x, const QuadExt& y) { return x -= y; }
  friend QuadExt operator*(QuadExt x, const QuadExt& y) { return x *= y; }
  friend QuadExt operator*(QuadExt x, const Rational& s) { return x *= s; }
  friend bool operator==(const QuadExt& x, const QuadExt& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && (x.b_ == 0 || x.d_ == y.d_);
  }

 private:
  void check_compatible(const QuadExt& o) const;

  Rational a_ = 0;
  Rational b_ = 0;
  Rational d_ = 1;
};

}  // namespace slicelab
