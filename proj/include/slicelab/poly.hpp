#pragma once

#include <map>
#include <span>
#include <variant>
#include <vector>

#include "slicelab/bits.hpp"
#include "slicelab/quad_ext.hpp"
#include "slicelab/rational.hpp"

namespace slicelab {

/// Sparse multilinear polynomial over x_1..x_n (n <= 64) with exact
/// rational coefficients. Terms are keyed by variable masks; zero
/// coefficients are never stored, so == is mathematical equality.
class MultilinearPoly {
 public:
  using TermMap = std::map<Mask, Rational>;

  explicit MultilinearPoly(int n = 0);

  static MultilinearPoly constant(int n, const Rational& c);
  static MultilinearPoly variable(int n, int i);
  static MultilinearPoly monomial(int n, Mask vars, const Rational& c = 1);
  /// x_i - x_j
  static MultilinearPoly difference(int n, int i, int j);

  int n() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Rational coefficient(Mask vars) const;
  void add_term(Mask vars, const Rational& c);

  /// Largest monomial degree; 0 for constants and for the zero polynomial.
  int degree() const;
  /// Union of all variables that appear.
  Mask support() const;

  MultilinearPoly& operator+=(const MultilinearPoly& o);
  MultilinearPoly& operator-=(const MultilinearPoly& o);
  MultilinearPoly& operator*=(const Rational& s);

  friend MultilinearPoly operator+(MultilinearPoly a, const MultilinearPoly& b) { return a += b; }
  friend MultilinearPoly operator-(MultilinearPoly a, const MultilinearPoly& b) { return a -= b; }
  friend MultilinearPoly operator-(MultilinearPoly a) { return a *= Rational(-1); }
  friend MultilinearPoly operator*(MultilinearPoly a, const Rational& s) { return a *= s; }
  friend MultilinearPoly operator*(const Rational& s, MultilinearPoly a) { return a *= s; }

  /// Syntactic product. Throws std::domain_error if some pair of terms
  /// shares a variable (the result would not be multilinear).
  friend MultilinearPoly operator*(const MultilinearPoly& a, const MultilinearPoly& b);

  friend bool operator==(const MultilinearPoly& a, const MultilinearPoly& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  void check_same_n(const MultilinearPoly& o) const;

  int n_;
  TermMap terms_;
};

/// Product followed by the reduction x_i^2 -> x_i. Agrees with f*g on
/// every point of {0,1}^n, hence on every slice.
MultilinearPoly boolean_product(const MultilinearPoly& f, const MultilinearPoly& g);

Rational evaluate(const MultilinearPoly& f, std::span<const Rational> x);
double evaluate(const MultilinearPoly& f, std::span<const double> x);
/// Evaluation at the 0/1 point whose ones are the bits of x.
Rational evaluate_boolean(const MultilinearPoly& f, Mask x);

MultilinearPoly partial_derivative(const MultilinearPoly& f, int i);
/// sum_i df/dx_i
MultilinearPoly derivative_sum(const MultilinearPoly& f);
bool is_harmonic(const MultilinearPoly& f);

/// f with x_i and x_j exchanged.
MultilinearPoly swap_variables(const MultilinearPoly& f, int i, int j);

/// prod_{i in s} (x_i - p): the character omega_S times (p(1-p))^{|S|/2}.
MultilinearPoly centered_monomial(int n, Mask s, const Rational& p);

/// f = sum_S fhat(S) omega_S with omega_S = prod_{i in S} (x_i - p)/sqrt(p(1-p)).
/// Each fhat(S) lies in Q(sqrt(p(1-p))); only nonzero coefficients are kept.
struct CubeFourierExpansion {
  int n = 0;
  Rational p;
  std::map<Mask, QuadExt> coeffs;

  Rational radicand() const { return p * (1 - p); }
  QuadExt coefficient(Mask s) const;
  /// sum_S fhat(S)^2, which is always rational.
  Rational parseval_sum() const;
  /// sum_{|S| = d} fhat(S)^2
  Rational weight(int d) const;
  int degree() const;
};

CubeFourierExpansion cube_fourier(const MultilinearPoly& f, const Rational& p);
/// Inverse of cube_fourier. Throws std::domain_error if the expansion
/// does not describe a polynomial with rational coefficients.
MultilinearPoly from_cube_fourier(const CubeFourierExpansion& e);

struct MonomialDegree {};
struct CharacterDegree {
  Rational p;
};
using DegreeMode = std::variant<MonomialDegree, CharacterDegree>;

/// f^{=d}: degree-d monomials, or sum_{|S|=d} fhat(S) omega_S re-expanded.
MultilinearPoly homogeneous_part(const MultilinearPoly& f, int d, const DegreeMode& mode);

/// Throws std::invalid_argument unless 0 < p < 1.
void check_bias(const Rational& p);

}  // namespace slicelab
