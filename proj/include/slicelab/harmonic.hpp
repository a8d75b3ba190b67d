#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "slicelab/measures.hpp"
#include "slicelab/poly.hpp"

namespace slicelab {

/// Strictly increasing b_1 < ... < b_d in [n] with b_i >= 2i.
class TopSet {
 public:
  /// Throws std::invalid_argument unless the sequence is a top set.
  TopSet(int n, std::vector<int> indices);

  int n() const { return n_; }
  int size() const { return static_cast<int>(b_.size()); }
  const std::vector<int>& indices() const { return b_; }
  Mask mask() const { return mask_of(b_); }
  /// prod_i binom(b_i - 2(i-1), 2)
  Rational normalization() const;

  friend bool operator==(const TopSet&, const TopSet&) = default;
  friend auto operator<=>(const TopSet&, const TopSet&) = default;

 private:
  int n_;
  std::vector<int> b_;
};

/// All top sets of length d in [n], lexicographic. Throws if 2d > n.
std::vector<TopSet> enumerate_top_sets(int n, int d);

struct HarmonicBasisElement {
  TopSet top_set;
  MultilinearPoly chi;
  Rational c_B;
};

/// chi_B expanded as a polynomial; memoized per (n, B) and thread-safe.
HarmonicBasisElement chi_B(const TopSet& b);

/// chi_B at a 0/1 point in O(n) without expanding the polynomial.
BigInt chi_value(const TopSet& b, Mask x);

/// ||chi_d||^2 for chi_d = chi_{(2,4,...,2d)}.
Rational chi_d_norm_sq(const MeasureSpec& m, int d);

/// Function on the slice given by one exact value per k-subset.
class SliceFunction {
 public:
  SliceFunction(int n, int k, std::map<Mask, Rational> values);

  static SliceFunction from_poly(const MultilinearPoly& f, int k);
  static SliceFunction from_callable(int n, int k, const std::function<Rational(Mask)>& f);

  int n() const { return n_; }
  int k() const { return k_; }
  const std::map<Mask, Rational>& values() const { return values_; }
  const Rational& at(Mask x) const;

 private:
  int n_, k_;
  std::map<Mask, Rational> values_;
};

/// Execution choice for enumeration kernels. Serial is the reference.
enum class Exec { serial, parallel };

/// f = sum_B coeff_B chi_B on the slice, listing only nonzero coefficients.
struct HarmonicExpansion {
  int n = 0;
  int k = 0;
  std::vector<std::pair<TopSet, Rational>> coeffs;

  /// sum_{|B| = d} coeff_B^2 ||chi_B||^2 under nu_k, for d = 0..min(k, n-k).
  std::vector<Rational> degree_weights() const;
  int degree() const;
  MultilinearPoly polynomial() const;
};

HarmonicExpansion harmonic_expansion(const SliceFunction& f, Exec exec = Exec::parallel);

/// Unique harmonic multilinear polynomial of degree <= min(k, n-k) that
/// agrees with f on the slice.
MultilinearPoly harmonic_projection(const SliceFunction& f, Exec exec = Exec::parallel);
MultilinearPoly harmonic_projection(const MultilinearPoly& f, int k, Exec exec = Exec::parallel);

/// (n - 2d + 1) / (n - d + 1)
Rational monomial_projection_coefficient(int n, int d);

int slice_degree(const SliceFunction& f);

}  // namespace slicelab
