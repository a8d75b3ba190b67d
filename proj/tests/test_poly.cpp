#include <doctest.h>

#include <vector>

#include "oracle.hpp"
#include "slicelab/poly.hpp"

using namespace slicelab;

namespace {

MultilinearPoly x(int n, int i) { return MultilinearPoly::variable(n, i); }

}  // namespace

TEST_CASE("evaluate: worked points") {
  {
    const MultilinearPoly f = x(3, 1) * x(3, 2);
    const std::vector<Rational> pt = {1, 1, 0};
    CHECK(evaluate(f, std::span<const Rational>(pt)) == 1);
  }
  {
    const MultilinearPoly f = MultilinearPoly::difference(2, 1, 2);
    const std::vector<Rational> pt = {1, 0};
    CHECK(evaluate(f, std::span<const Rational>(pt)) == 1);
  }
  {
    const MultilinearPoly f = Rational(2) * (x(3, 1) * x(3, 3)) - x(3, 2);
    const std::vector<Rational> pt = {1, 1, 1};
    CHECK(evaluate(f, std::span<const Rational>(pt)) == 1);
    const std::vector<double> dp = {1, 1, 1};
    CHECK(evaluate(f, std::span<const double>(dp)) == doctest::Approx(1.0));
  }
}

TEST_CASE("evaluate rejects a wrong dimension") {
  const std::vector<Rational> pt = {1, 0};
  CHECK_THROWS_AS(evaluate(x(3, 1), std::span<const Rational>(pt)), std::invalid_argument);
}

TEST_CASE("partial derivatives") {
  CHECK(partial_derivative(x(2, 1) * x(2, 2), 1) == x(2, 2));
  CHECK(partial_derivative(x(2, 2), 1).is_zero());
  const MultilinearPoly f = MultilinearPoly::difference(4, 1, 2) * MultilinearPoly::difference(4, 3, 4);
  CHECK(partial_derivative(f, 3) == MultilinearPoly::difference(4, 1, 2));
  CHECK_THROWS_AS(partial_derivative(f, 5), std::out_of_range);
}

TEST_CASE("harmonicity") {
  CHECK(is_harmonic(MultilinearPoly::difference(2, 1, 2)));
  CHECK_FALSE(is_harmonic(x(1, 1)));
  CHECK(is_harmonic(MultilinearPoly::difference(4, 1, 2) * MultilinearPoly::difference(4, 3, 4)));
  CHECK(is_harmonic(MultilinearPoly::constant(3, 7)));
}

TEST_CASE("canonical form drops zero coefficients") {
  MultilinearPoly f = x(3, 1) + x(3, 2);
  f -= x(3, 1);
  CHECK(f == x(3, 2));
  CHECK(f.size() == 1);
  CHECK_THROWS_AS(x(2, 1) * x(2, 1), std::domain_error);
  CHECK_THROWS_AS(MultilinearPoly(65), std::invalid_argument);
}

TEST_CASE("cube Fourier: worked examples") {
  const Rational half(1, 2);
  const auto one = cube_fourier(MultilinearPoly::constant(3, 1), half);
  CHECK(one.coeffs.size() == 1);
  CHECK(one.coefficient(0) == QuadExt::rational(1, one.radicand()));

  for (const Rational p : {Rational(1, 3), Rational(1, 2), Rational(2, 7)}) {
    const auto e = cube_fourier(x(1, 1), p);
    CHECK(e.coefficient(0) == QuadExt(p, 0, p * (1 - p)));
    // sqrt(p(1-p)) is the radical unit.
    CHECK(e.coefficient(1) == QuadExt(0, 1, p * (1 - p)));
  }
  // x1 x2 = (1/2 + w1/2)(1/2 + w2/2)
  const auto e = cube_fourier(x(2, 1) * x(2, 2), half);
  const Rational q(1, 4);
  CHECK(e.coefficient(0).to_double() == doctest::Approx(0.25));
  CHECK(e.coefficient(1).to_double() == doctest::Approx(0.25));
  CHECK(e.coefficient(2).to_double() == doctest::Approx(0.25));
  CHECK(e.coefficient(3).to_double() == doctest::Approx(0.25));
  CHECK(e.coefficient(3) == QuadExt(q, 0, q));  // f^(12) = (1/4) w1 w2, even size: rational
}

TEST_CASE("cube Fourier round trip on random polynomials") {
  Rng rng(11, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const MultilinearPoly f = oracle::random_poly(n, 6, rng);
    for (const Rational p : {Rational(1, 3), Rational(1, 2)}) {
      CHECK(from_cube_fourier(cube_fourier(f, p)) == f);
    }
  }
}

TEST_CASE("Parseval against exhaustive enumeration") {
  Rng rng(12, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const MultilinearPoly f = oracle::random_poly(n, 5, rng);
    for (const Rational p : {Rational(1, 3), Rational(1, 2), Rational(3, 4)}) {
      const Rational direct = oracle::cube_mean([&](Mask m) -> Rational {
        const Rational v = oracle::eval01(f, m);
        return v * v;
      }, n, p);
      CHECK(cube_fourier(f, p).parseval_sum() == direct);
    }
  }
}

TEST_CASE("homogeneous parts") {
  const MultilinearPoly f = MultilinearPoly::difference(2, 1, 2) + MultilinearPoly::constant(2, 5);
  CHECK(homogeneous_part(f, 1, MonomialDegree{}) == MultilinearPoly::difference(2, 1, 2));
  const MultilinearPoly g = homogeneous_part(x(1, 1), 1, CharacterDegree{Rational(1, 2)});
  CHECK(g == x(1, 1) - MultilinearPoly::constant(1, Rational(1, 2)));

  Rng rng(13, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const MultilinearPoly h = oracle::random_harmonic(n, 3, 3, rng);
    for (int d = 0; d <= 3; ++d) {
      for (const Rational p : {Rational(1, 3), Rational(1, 2)}) {
        CHECK(homogeneous_part(h, d, MonomialDegree{}) == homogeneous_part(h, d, CharacterDegree{p}));
      }
    }
  }
}

TEST_CASE("ring laws pointwise on the cube") {
  Rng rng(14, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const MultilinearPoly f = oracle::random_poly(n, 4, rng);
    const MultilinearPoly g = oracle::random_poly(n, 4, rng);
    const MultilinearPoly s = f + g;
    const MultilinearPoly pr = boolean_product(f, g);
    for (Mask m = 0; m < (Mask{1} << n); ++m) {
      CHECK(evaluate_boolean(s, m) == oracle::eval01(f, m) + oracle::eval01(g, m));
      CHECK(evaluate_boolean(pr, m) == oracle::eval01(f, m) * oracle::eval01(g, m));
    }
  }
}

TEST_CASE("bias validation") {
  CHECK_THROWS_AS(cube_fourier(x(1, 1), Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(cube_fourier(x(1, 1), Rational(1)), std::invalid_argument);
}
