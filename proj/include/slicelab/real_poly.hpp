#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slicelab/poly.hpp"

namespace slicelab {

/// Floating-point multilinear polynomial over any number of variables.
/// Used by the Monte Carlo paths, where n is far beyond the 64-variable
/// exact cap. Variables are stored 0-based and sorted inside each term.
struct RealTerm {
  std::vector<std::uint32_t> vars;
  double coeff = 0;
};

class RealPoly {
 public:
  explicit RealPoly(std::size_t n = 0) : n_(n) {}

  static RealPoly from_exact(const MultilinearPoly& f);

  std::size_t n() const { return n_; }
  const std::vector<RealTerm>& terms() const { return terms_; }
  /// vars are 0-based; they are sorted and checked for repeats.
  void add_term(std::vector<std::uint32_t> vars, double coeff);

  int degree() const;
  double evaluate(std::span<const double> x) const;
  /// Evaluation at a 0/1 point given as a byte vector.
  double evaluate_indicator(std::span<const std::uint8_t> x) const;

  /// True when sum_i df/dx_i vanishes up to tol * (max |coeff|).
  bool is_harmonic(double tol = 1e-12) const;

  /// Var-to-term incidence lists (0-based variable -> term indices).
  std::vector<std::vector<std::size_t>> incidence() const;

  RealPoly& operator*=(double s);

 private:
  std::size_t n_;
  std::vector<RealTerm> terms_;
};

}  // namespace slicelab
