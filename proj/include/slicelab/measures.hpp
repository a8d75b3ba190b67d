#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slicelab/poly.hpp"
#include "slicelab/real_poly.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

struct CubeMeasure {
  Rational p;
};
struct SliceMeasure {
  int n = 0;
  int k = 0;
};
struct GaussianMeasure {
  Rational p;
};
/// G_p conditioned on the coordinate mean being q.
struct GaussianSliceMeasure {
  Rational p;
  double q = 0;
};

using MeasureSpec = std::variant<CubeMeasure, SliceMeasure, GaussianMeasure, GaussianSliceMeasure>;

/// Validating constructors.
MeasureSpec cube_measure(const Rational& p);
MeasureSpec slice_measure(int n, int k);
MeasureSpec gaussian_measure(const Rational& p);
MeasureSpec gaussian_slice_measure(const Rational& p, double q);

/// Parses "cube:P", "slice:N:K", "gaussian:P", "gaussian-slice:P:Q".
MeasureSpec parse_measure(const std::string& text);
std::string describe(const MeasureSpec& m);

/// Largest slice size enumerated exactly (binom(25,12) is about 5.2e6).
inline constexpr int kExactSliceCap = 25;
void check_slice_cap(int n);

/// Exact expectation. Cube and Gaussian use p^{|S|}; the slice uses
/// k^{|S| falling} / n^{|S| falling}. The Gaussian-slice measure has no
/// exact path here and throws std::invalid_argument.
Rational expectation(const MultilinearPoly& f, const MeasureSpec& m);
/// <f, g> = E[f g]. Valid for multilinear f, g under all exact measures
/// because E[x_i^2] = E[x_i] under both mu_p and G_p.
Rational inner_product(const MultilinearPoly& f, const MultilinearPoly& g, const MeasureSpec& m);
Rational norm_sq(const MultilinearPoly& f, const MeasureSpec& m);
Rational variance(const MultilinearPoly& f, const MeasureSpec& m);

/// Exact expectation by enumerating {0,1}^n (cube) or the slice. Used as
/// an independent oracle for the closed forms.
Rational enumerate_expectation(const std::function<Rational(Mask)>& f, const MeasureSpec& m, int n);

struct Estimate {
  double value = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// One sample of dimension n written into out (out.size() == n).
/// For the slice, n must equal the measure's n.
void sample_into(const MeasureSpec& m, Rng& rng, std::span<double> out);
std::vector<double> sample(const MeasureSpec& m, int n, Rng& rng);

/// Stateful slice sampler: a persistent permutation reshuffled partially
/// for each draw, giving a uniform k-subset in O(min(k, n-k)) swaps.
class SliceSampler {
 public:
  SliceSampler(int n, int k);
  /// Indicator of the current draw (0/1 per coordinate).
  const std::vector<std::uint8_t>& draw(Rng& rng);
  const std::vector<std::uint8_t>& current() const { return x_; }

 private:
  int n_, k_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint8_t> x_;
};

/// Monte Carlo estimate of E[g(x)] with x ~ m, in chunks of chunk_size
/// samples on independent substreams. Bit-reproducible for fixed
/// (seed, samples, chunk_size) regardless of thread count.
Estimate monte_carlo_mean(const MeasureSpec& m, int n, std::uint64_t samples, std::uint64_t seed,
                          const std::function<double(std::span<const double>)>& g,
                          std::uint64_t chunk_size = 1 << 14, bool parallel = true);

/// Sample of g(x), x ~ m, sorted; the building block of the invariance lab.
std::vector<double> monte_carlo_values(const MeasureSpec& m, int n, std::uint64_t samples,
                                       std::uint64_t seed,
                                       const std::function<double(std::span<const double>)>& g,
                                       std::uint64_t chunk_size = 1 << 14, bool parallel = true);

class EmpiricalDistribution {
 public:
  EmpiricalDistribution(std::vector<double> values, std::uint64_t seed = 0);
  const std::vector<double>& values() const { return values_; }
  std::size_t count() const { return values_.size(); }
  std::uint64_t seed() const { return seed_; }
  /// Right-continuous ECDF: fraction of values <= x.
  double cdf(double x) const;
  /// Fraction of values < x.
  double cdf_left(double x) const;

 private:
  std::vector<double> values_;
  std::uint64_t seed_;
};

using ExactCdf = std::function<double(double)>;

double levy_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);
double levy_distance(const EmpiricalDistribution& a, const ExactCdf& g);
double cdf_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);
double cdf_distance(const EmpiricalDistribution& a, const ExactCdf& g);

/// Dvoretzky–Kiefer–Wolfowitz radius at confidence 1 - alpha.
double dkw_radius(std::size_t count, double alpha = 0.05);

struct JuntaCloseness {
  Rational slice_probability;
  Rational cube_probability;
  Rational bound;
  bool holds = false;
};

/// event: assignments to x_1..x_J, each a J-bit mask (bit i-1 = x_i).
/// Compares nu_{pn} with mu_p. Requires J^2 <= n and pn integral.
JuntaCloseness junta_event_closeness(const std::vector<Mask>& event, int J, int n, const Rational& p);

}  // namespace slicelab
