#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "slicelab/harmonic.hpp"
#include "slicelab/measures.hpp"
#include "slicelab/noise.hpp"

using namespace slicelab;

namespace {

MultilinearPoly x(int n, int i) { return MultilinearPoly::variable(n, i); }

// P(X <= h, Y <= h) for rho-correlated standard normals by integrating the
// conditional law of Y given X; independent of the library's quadrature.
double quadrant_oracle(double mu, double rho) {
  const auto Phi = [](double v) { return 0.5 * std::erfc(-v / std::sqrt(2.0)); };
  double lo = -10, hi = 10;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (Phi(mid) < mu ? lo : hi) = mid;
  }
  const double h = (lo + hi) / 2;
  const double s = std::sqrt(1 - rho * rho);
  const double a = -12;
  const int steps = 20000;
  const double w = (h - a) / steps;
  double acc = 0;
  for (int i = 0; i <= steps; ++i) {
    const double t = a + i * w;
    const double c = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
    acc += c * std::exp(-t * t / 2) / std::sqrt(2 * M_PI) * Phi((h - rho * t) / s);
  }
  return acc * w / 3;
}

}  // namespace

TEST_CASE("cube influence: worked examples") {
  const Rational half(1, 2);
  const MultilinearPoly omega = Rational(2) * x(1, 1) - MultilinearPoly::constant(1, 1);
  CHECK(cube_influence(omega, half, 1) == 4);
  CHECK(cube_influence(x(2, 2), half, 1) == 0);
  CHECK(cube_influence(x(2, 1) * x(2, 2), half, 1) == Rational(1, 2));
}

TEST_CASE("cube influence matches the flip definition") {
  Rng rng(41, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(7));
    const MultilinearPoly f = oracle::random_poly(n, 4, rng);
    const Rational p(1, 3);
    for (int i = 1; i <= n; ++i) {
      const Mask b = Mask{1} << (i - 1);
      // ||f - f^[i]||^2 uses the flip; the derivative form gives the same value.
      const Rational want = oracle::cube_mean([&](Mask m) -> Rational {
        const Rational d = oracle::eval01(f, m | b) - oracle::eval01(f, m & ~b);
        return d * d;
      }, n, p);
      CHECK(cube_influence(f, p, i) == want);
    }
  }
}

TEST_CASE("slice influence: worked examples") {
  const SliceFunction f = SliceFunction::from_poly(MultilinearPoly::difference(4, 1, 2), 2);
  CHECK(slice_influence_pair(f, 1, 2) == Rational(8, 3));
  const SliceFunction g = SliceFunction::from_poly(x(4, 3), 2);
  CHECK(slice_influence_pair(g, 1, 2) == 0);
  const SliceFunction c = SliceFunction::from_poly(MultilinearPoly::constant(4, 3), 2);
  CHECK(total_slice_influence(c) == 0);
}

TEST_CASE("slice Poincare: exact spectral identity and normalized bounds") {
  Rng rng(42, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(5));
    const int k = 2 + static_cast<int>(rng.below(n - 3));
    const MultilinearPoly f = oracle::random_harmonic(n, std::min({3, k, n - k}), 3, rng);
    const SliceFunction s = SliceFunction::from_poly(f, k);
    const SpectralProfile prof = slice_spectral_profile(s);
    Rational identity = 0;
    for (std::size_t d = 0; d < prof.weights.size(); ++d) {
      identity += Rational(4 * static_cast<long>(d) * (n + 1 - static_cast<long>(d))) / n * prof.weights[d];
    }
    const Rational inf = total_slice_influence(s);
    CHECK(inf == identity);
    const Rational v = variance(f, slice_measure(n, k));
    CHECK(v <= inf / 4);
    CHECK(inf / 4 <= Rational(f.degree()) * v);
  }
}

TEST_CASE("cube Poincare") {
  Rng rng(43, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const MultilinearPoly f = oracle::random_poly(n, 4, rng);
    for (const Rational p : {Rational(1, 3), Rational(1, 2)}) {
      const Rational v = variance(f, cube_measure(p));
      const Rational mid = p * (1 - p) * total_cube_influence(f, p);
      CHECK(v <= mid);
      CHECK(mid <= Rational(cube_fourier(f, p).degree()) * v);
    }
  }
}

TEST_CASE("cube influences are controlled by slice influences") {
  Rng rng(44, 0);
  for (int n : {8, 12, 16, 20}) {
    const int k = n / 2;
    const MultilinearPoly f = oracle::random_harmonic(n, 3, 3, rng);
    if (f.degree() == 0) continue;
    const SliceFunction s = SliceFunction::from_poly(f, k);
    const Rational v = variance(f, slice_measure(n, k));
    const Rational p = make_rational(k, n);
    for (int i = 1; i <= n; ++i) {
      const Rational rhs = 10 * (Rational(f.degree(), n) * v + slice_influence(s, i));
      CHECK(cube_influence(f, p, i) <= rhs);
    }
  }
}

TEST_CASE("closed-form linear slice influence matches enumeration") {
  MultilinearPoly f(8);
  for (int i = 1; i <= 8; ++i) f += Rational(i % 2 ? 1 : -1) * Rational(i) * x(8, i);
  const SliceFunction s = SliceFunction::from_poly(f, 3);
  const RealPoly g = RealPoly::from_exact(f);
  for (int i = 1; i <= 8; ++i) {
    CHECK(linear_slice_influence(g, 3, static_cast<std::size_t>(i - 1)) == doctest::Approx(to_double(slice_influence(s, i))));
  }
}

TEST_CASE("noise operator exponents") {
  const MultilinearPoly f1 = MultilinearPoly::difference(4, 1, 2);
  const RealPoly h1 = noise_operator(f1, 0.5, NoiseKind::H, std::nullopt, 4);
  for (const auto& t : h1.terms()) CHECK(std::abs(t.coeff) == doctest::Approx(0.5));
  const MultilinearPoly f2 = chi_B(TopSet(4, {2, 4})).chi;
  const RealPoly h2 = noise_operator(f2, 0.5, NoiseKind::H, std::nullopt, 4);
  for (const auto& t : h2.terms()) CHECK(std::abs(t.coeff) == doctest::Approx(std::pow(0.5, 1.5)));
  CHECK(slice_noise_exponent(2, 4) == doctest::Approx(1.5));
  // H_0 keeps the constant only
  const RealPoly h0 = noise_operator(f2 + MultilinearPoly::constant(4, 3), 0.0, NoiseKind::H, std::nullopt, 4);
  REQUIRE(h0.terms().size() == 1);
  CHECK(h0.terms()[0].coeff == 3);
}

TEST_CASE("cube noise semantics exactly, n <= 6") {
  Rng rng(45, 0);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const MultilinearPoly f = oracle::random_poly(n, 4, rng);
    const Rational p = trial % 2 ? Rational(1, 3) : Rational(1, 2);
    const Rational rho(static_cast<long>(1 + rng.below(4)), 5);
    for (NoiseKind kind : {NoiseKind::T, NoiseKind::U}) {
      const MultilinearPoly t = noise_operator_exact(f, rho, kind, p);
      for (Mask m = 0; m < (Mask{1} << n); ++m) {
        const Rational want = oracle::cube_noisy_expectation(f, m, rho, p);
        CHECK(evaluate_boolean(t, m) == want);
        CHECK(cube_conditional_expectation(f, m, rho, p) == want);
      }
    }
  }
}

TEST_CASE("slice resampling matches H_rho statistically") {
  const int n = 6, k = 3;
  const MultilinearPoly f = chi_B(TopSet(n, {2, 4})).chi + chi_B(TopSet(n, {3})).chi;
  const double rho = 0.6;
  const RealPoly h = noise_operator(f, rho, NoiseKind::H, std::nullopt, n);
  const RealPoly g = RealPoly::from_exact(f);
  const std::vector<double> x0 = {1, 0, 1, 0, 1, 0};
  Rng rng(46, 0);
  std::vector<double> y(n);
  const int draws = 200000;
  double s = 0, s2 = 0;
  for (int t = 0; t < draws; ++t) {
    resample_noise(x0, rho, slice_measure(n, k), rng, y);
    const double v = g.evaluate(y);
    s += v;
    s2 += v * v;
  }
  const double mean = s / draws;
  const double se = std::sqrt((s2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - h.evaluate(x0)) <= 3 * se);
}

TEST_CASE("gaussian resampling matches U_rho statistically") {
  const MultilinearPoly f = x(3, 1) * x(3, 2) + x(3, 3);
  const Rational p(1, 3);
  const double rho = 0.5;
  const RealPoly u = noise_operator(f, rho, NoiseKind::U, p, 3);
  const RealPoly g = RealPoly::from_exact(f);
  const std::vector<double> x0 = {0.7, -0.2, 1.4};
  Rng rng(47, 0);
  std::vector<double> y(3);
  const int draws = 200000;
  double s = 0, s2 = 0;
  for (int t = 0; t < draws; ++t) {
    resample_noise(x0, rho, gaussian_measure(p), rng, y);
    const double v = g.evaluate(y);
    s += v;
    s2 += v * v;
  }
  const double mean = s / draws;
  const double se = std::sqrt((s2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - u.evaluate(x0)) <= 3 * se);
}

TEST_CASE("resampling edge cases") {
  Rng rng(48, 0);
  std::vector<double> x0 = {1, 0, 1, 0}, y(4);
  resample_noise(x0, 1.0, slice_measure(4, 2), rng, y);
  CHECK(y == x0);
  resample_noise(x0, 1.0, cube_measure(Rational(1, 2)), rng, y);
  CHECK(y == x0);
  resample_noise(x0, 0.0, slice_measure(4, 2), rng, y);
  CHECK(y[0] + y[1] + y[2] + y[3] == 2);
}

TEST_CASE("stability: spectral example and monotonicity") {
  const MultilinearPoly f = MultilinearPoly::difference(4, 1, 2);
  const Rational nrm = norm_sq(f, slice_measure(4, 2));
  const SpectralProfile prof = slice_spectral_profile(f, 2);
  CHECK(stability(prof, 0.5) / to_double(nrm) == doctest::Approx(0.5));
  Rng rng(49, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const MultilinearPoly g = oracle::random_harmonic(8, 3, 3, rng);
    const SpectralProfile pr = slice_spectral_profile(g, 4);
    double prev = -1;
    for (int r = 0; r <= 10; ++r) {
      const double s = stability(pr, r / 10.0);
      CHECK(s >= prev - 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("gamma_rho: limits and quadrant oracle") {
  for (double mu : {0.1, 0.3, 0.5, 0.8}) {
    CHECK(gamma_rho(mu, 0.0) == doctest::Approx(mu * mu).epsilon(1e-10));
    CHECK(gamma_rho(mu, 1.0) == doctest::Approx(mu).epsilon(1e-10));
    for (double rho : {0.2, 0.5, 0.9}) CHECK(gamma_rho(mu, rho) == doctest::Approx(quadrant_oracle(mu, rho)).epsilon(1e-8));
  }
  CHECK(std::abs(gamma_rho(0.5, 0.5) - 1.0 / 3.0) < 1e-10);
}

TEST_CASE("gamma_rho against correlated Monte Carlo") {
  Rng rng(50, 0);
  const double rho = 0.5, h = normal_quantile(0.5);
  const int pairs = 10000000;
  std::uint64_t hits = 0;
  for (int t = 0; t < pairs; ++t) {
    const double a = rng.normal();
    const double b = rho * a + std::sqrt(1 - rho * rho) * rng.normal();
    hits += (a <= h && b <= h);
  }
  const double est = static_cast<double>(hits) / pairs;
  const double se = std::sqrt(est * (1 - est) / pairs);
  CHECK(std::abs(est - gamma_rho(0.5, rho)) <= 4 * se);
}

TEST_CASE("noise operator gap") {
  const auto lin = noise_operator_gap(MultilinearPoly::difference(8, 1, 2), 0.3, 8, slice_measure(8, 4));
  CHECK(lin.gap == doctest::Approx(0.0));
  const auto cst = noise_operator_gap(MultilinearPoly::constant(8, 2), 0.3, 8, slice_measure(8, 4));
  CHECK(cst.gap == doctest::Approx(0.0));
  const MultilinearPoly f = chi_B(TopSet(8, {2, 4})).chi;
  const auto g = noise_operator_gap(f, 0.3, 8, slice_measure(8, 4));
  const double rho = 0.7;
  const double want = std::abs(std::pow(rho, 2 * 7.0 / 8) - rho * rho) * std::sqrt(to_double(norm_sq(f, slice_measure(8, 4))));
  CHECK(g.gap == doctest::Approx(want));
  CHECK(g.holds);
}
