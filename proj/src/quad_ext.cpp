#include "slicelab/quad_ext.hpp"

#include <cmath>

namespace slicelab {

void QuadExt::check_compatible(const QuadExt& o) const {
  if (d_ != o.d_ && b_ != 0 && o.b_ != 0) {
    throw std::invalid_argument("QuadExt operands use different radicands");
  }
}

QuadExt& QuadExt::operator+=(const QuadExt& o) {
  check_compatible(o);
  if (b_ == 0) d_ = o.d_;
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QuadExt& QuadExt::operator-=(const QuadExt& o) {
  check_compatible(o);
  if (b_ == 0) d_ = o.d_;
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QuadExt& QuadExt::operator*=(const QuadExt& o) {
  check_compatible(o);
  if (b_ == 0) d_ = o.d_;
  Rational a = a_ * o.a_ + b_ * o.b_ * d_;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

double QuadExt::to_double() const {
  return a_.get_d() + b_.get_d() * std::sqrt(d_.get_d());
}

std::string QuadExt::to_string() const {
  if (b_ == 0) return slicelab::to_string(a_);
  std::string out;
  if (a_ != 0) out = slicelab::to_string(a_) + " + ";
  return out + "(" + slicelab::to_string(b_) + ")*sqrt(" + slicelab::to_string(d_) + ")";
}

}  // namespace slicelab
