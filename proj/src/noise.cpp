#include "slicelab/noise.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "slicelab/errors.hpp"
#include "slicelab/parallel.hpp"

namespace slicelab {

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0,1]");
}

int measure_slice_n(const MeasureSpec& m) {
  if (const auto* s = std::get_if<SliceMeasure>(&m)) return s->n;
  return 0;
}

/// Degree-d parts of f used by the noise operators.
std::vector<MultilinearPoly> degree_parts(const MultilinearPoly& f, const std::optional<Rational>& p, bool harmonic) {
  std::vector<MultilinearPoly> parts;
  const int top = f.degree();
  for (int d = 0; d <= top; ++d) {
    if (harmonic) {
      parts.push_back(homogeneous_part(f, d, MonomialDegree{}));
    } else {
      parts.push_back(homogeneous_part(f, d, CharacterDegree{*p}));
    }
  }
  return parts;
}

}  // namespace

Rational SpectralProfile::total() const {
  Rational t = 0;
  for (const auto& w : weights) t += w;
  return t;
}

int SpectralProfile::degree() const {
  for (int d = static_cast<int>(weights.size()) - 1; d >= 0; --d) {
    if (weights[d] != 0) return d;
  }
  return 0;
}

Rational SpectralProfile::tail(int kcut) const {
  Rational t = 0;
  for (int d = std::max(kcut + 1, 0); d < static_cast<int>(weights.size()); ++d) t += weights[d];
  return t;
}

SpectralProfile cube_spectral_profile(const MultilinearPoly& f, const Rational& p) {
  const auto e = cube_fourier(f, p);
  SpectralProfile out{CubeMeasure{p}, {}};
  for (int d = 0; d <= e.degree(); ++d) out.weights.push_back(e.weight(d));
  return out;
}

SpectralProfile slice_spectral_profile(const SliceFunction& f) {
  return SpectralProfile{SliceMeasure{f.n(), f.k()}, harmonic_expansion(f).degree_weights()};
}

SpectralProfile slice_spectral_profile(const MultilinearPoly& f, int k) {
  return slice_spectral_profile(SliceFunction::from_poly(f, k));
}

SpectralProfile spectral_profile(const MultilinearPoly& f, const MeasureSpec& m) {
  if (const auto* c = std::get_if<CubeMeasure>(&m)) return cube_spectral_profile(f, c->p);
  if (const auto* g = std::get_if<GaussianMeasure>(&m)) {
    auto prof = cube_spectral_profile(f, g->p);
    prof.measure = m;
    return prof;
  }
  if (const auto* s = std::get_if<SliceMeasure>(&m)) {
    if (s->n != f.n()) throw std::invalid_argument("polynomial and slice dimensions differ");
    return slice_spectral_profile(f, s->k);
  }
  throw std::invalid_argument("spectral profiles are exact on cube, gaussian and slice measures only");
}

Rational cube_influence(const MultilinearPoly& f, const Rational& p, int i) {
  const Rational direct = norm_sq(partial_derivative(f, i), CubeMeasure{p});
  const auto e = cube_fourier(f, p);
  QuadExt acc = QuadExt::rational(0, e.radicand());
  for (const auto& [s, c] : e.coeffs) {
    if (contains(s, i)) acc += c * c;
  }
  const Rational spectral = acc.as_rational() / (p * (1 - p));
  if (spectral != direct) {
    throw AssertionFailure("cube influence routes disagree: " + to_string(direct) + " vs " + to_string(spectral));
  }
  return direct;
}

Rational total_cube_influence(const MultilinearPoly& f, const Rational& p) {
  Rational t = 0;
  for (int i = 1; i <= f.n(); ++i) t += cube_influence(f, p, i);
  return t;
}

Rational slice_influence_pair(const SliceFunction& f, int i, int j) {
  const int n = f.n();
  if (i < 1 || i > n || j < 1 || j > n) throw std::out_of_range("influence index out of range");
  if (i == j) throw std::invalid_argument("pair influence needs i != j");
  check_slice_cap(n);
  const Mask bi = bit_of(i), bj = bit_of(j);
  Rational acc = 0;
  for (const auto& [x, v] : f.values()) {
    const bool xi = x & bi, xj = x & bj;
    if (xi == xj) continue;
    const Mask y = x ^ bi ^ bj;
    const Rational diff = v - f.at(y);
    acc += diff * diff;
  }
  return acc / Rational(binomial(n, f.k()));
}

Rational slice_influence(const SliceFunction& f, int i) {
  Rational acc = 0;
  for (int j = 1; j <= f.n(); ++j) {
    if (j != i) acc += slice_influence_pair(f, i, j);
  }
  return acc / f.n();
}

Rational total_slice_influence(const SliceFunction& f) {
  Rational acc = 0;
  for (int i = 1; i <= f.n(); ++i) acc += slice_influence(f, i);
  return acc;
}

double linear_slice_influence(const RealPoly& f, int k, std::size_t i) {
  const std::size_t n = f.n();
  if (f.degree() > 1) throw std::invalid_argument("closed-form influence needs a linear polynomial");
  if (i >= n) throw std::out_of_range("influence index out of range");
  if (n < 2) return 0.0;
  std::vector<double> a(n, 0.0);
  for (const auto& t : f.terms()) {
    if (t.vars.size() == 1) a[t.vars[0]] += t.coeff;
  }
  double sum = 0, sum_sq = 0;
  for (double v : a) {
    sum += v;
    sum_sq += v * v;
  }
  const double nn = static_cast<double>(n);
  const double spread = nn * a[i] * a[i] - 2 * a[i] * sum + sum_sq;
  const double pair = 2.0 * k * (nn - k) / (nn * (nn - 1));
  return spread * pair / nn;
}

Estimate sampled_slice_influence(const RealPoly& f, int k, std::size_t i, std::uint64_t samples, std::uint64_t seed) {
  const std::size_t n = f.n();
  if (i >= n) throw std::out_of_range("influence index out of range");
  const std::uint64_t chunk = 1 << 14;
  const std::size_t chunks = chunk_count(samples, chunk);
  struct Acc {
    double sum = 0, sum_sq = 0;
  };
  auto body = [&](std::size_t c) {
    Rng rng(seed, c);
    SliceSampler sampler(static_cast<int>(n), k);
    std::vector<double> x(n);
    Acc acc;
    const std::uint64_t count = std::min<std::uint64_t>(chunk, samples - c * chunk);
    for (std::uint64_t t = 0; t < count; ++t) {
      const auto& ind = sampler.draw(rng);
      for (std::size_t q = 0; q < n; ++q) x[q] = ind[q];
      const std::size_t j = rng.below(n);
      double v = 0;
      if (x[i] != x[j]) {
        const double before = f.evaluate(x);
        std::swap(x[i], x[j]);
        const double diff = before - f.evaluate(x);
        v = diff * diff;
      }
      acc.sum += v;
      acc.sum_sq += v * v;
    }
    return acc;
  };
  const auto parts = map_chunks<Acc>(chunks, body);
  Acc total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double N = static_cast<double>(samples);
  const double mean = total.sum / N;
  const double var = samples > 1 ? std::max(0.0, (total.sum_sq - N * mean * mean) / (N - 1)) : 0.0;
  return Estimate{mean, std::sqrt(var / N), samples, seed};
}

double slice_noise_exponent(int d, int n) {
  if (n <= 0) throw std::invalid_argument("H_rho needs n >= 1");
  return d * (1.0 - static_cast<double>(d - 1) / n);
}

MultilinearPoly noise_operator_exact(const MultilinearPoly& f, const Rational& rho, NoiseKind kind, const Rational& p) {
  if (rho < 0 || rho > 1) throw std::invalid_argument("rho must lie in [0,1]");
  if (kind == NoiseKind::H) throw std::invalid_argument("H_rho has irrational factors; use the floating-point form");
  check_bias(p);
  MultilinearPoly out(f.n());
  const auto parts = degree_parts(f, p, false);
  for (std::size_t d = 0; d < parts.size(); ++d) out += parts[d] * power(rho, static_cast<unsigned>(d));
  return out;
}

RealPoly noise_operator(const MultilinearPoly& f, double rho, NoiseKind kind, std::optional<Rational> p, int n_slice) {
  check_rho(rho);
  const bool harmonic = is_harmonic(f);
  if (p) check_bias(*p);
  if (!harmonic && !p) throw std::invalid_argument("noise on a non-harmonic polynomial needs the bias p");
  if (kind == NoiseKind::H && n_slice <= 0) throw std::invalid_argument("H_rho needs the number of coordinates n");
  // Harmonic f: monomial and character parts coincide, so either works.
  const auto parts = degree_parts(f, p, harmonic);
  RealPoly out(static_cast<std::size_t>(f.n()));
  std::map<Mask, double> acc;
  for (std::size_t d = 0; d < parts.size(); ++d) {
    const double e = kind == NoiseKind::H ? slice_noise_exponent(static_cast<int>(d), n_slice) : static_cast<double>(d);
    // H_0 keeps only the constant part: 0^0 = 1 and 0^e = 0 for e > 0.
    const double factor = std::pow(rho, e);
    for (const auto& [m, c] : parts[d].terms()) acc[m] += factor * c.get_d();
  }
  for (const auto& [m, c] : acc) {
    std::vector<std::uint32_t> vars;
    for (int i : indices_of(m)) vars.push_back(static_cast<std::uint32_t>(i - 1));
    out.add_term(std::move(vars), c);
  }
  return out;
}

void resample_noise(std::span<const double> x, double rho, const MeasureSpec& m, Rng& rng, std::span<double> y) {
  check_rho(rho);
  const std::size_t n = x.size();
  if (y.size() != n) throw std::invalid_argument("output dimension mismatch");
  std::copy(x.begin(), x.end(), y.begin());
  if (const auto* c = std::get_if<CubeMeasure>(&m)) {
    const double p = to_double(c->p);
    for (std::size_t i = 0; i < n; ++i) {
      if (!rng.bernoulli(rho)) y[i] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
    return;
  }
  if (const auto* s = std::get_if<SliceMeasure>(&m)) {
    if (static_cast<std::size_t>(s->n) != n) throw std::invalid_argument("point dimension does not match the slice");
    if (n < 2 || rho == 1.0) return;
    if (rho == 0.0) {
      // Fresh uniform point with the same number of ones.
      for (std::size_t i = n - 1; i > 0; --i) std::swap(y[i], y[rng.below(i + 1)]);
      return;
    }
    const double mean = (static_cast<double>(n) - 1.0) / 2.0 * std::log(1.0 / rho);
    const std::uint64_t swaps = rng.poisson(mean);
    for (std::uint64_t t = 0; t < swaps; ++t) {
      const std::uint64_t i = rng.below(n);
      std::uint64_t j = rng.below(n - 1);
      if (j >= i) ++j;
      std::swap(y[i], y[j]);
    }
    return;
  }
  if (const auto* g = std::get_if<GaussianMeasure>(&m)) {
    const double p = to_double(g->p);
    const double sd = std::sqrt(p * (1 - p));
    const double mix = std::sqrt(1 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) y[i] = (1 - rho) * p + rho * x[i] + mix * sd * rng.normal();
    return;
  }
  throw std::invalid_argument("resampling is not defined for the gaussian-slice measure");
}

Rational cube_conditional_expectation(const MultilinearPoly& f, Mask x, const Rational& rho, const Rational& p) {
  check_bias(p);
  if (rho < 0 || rho > 1) throw std::invalid_argument("rho must lie in [0,1]");
  const int n = f.n();
  if (n > 12) throw CapExceeded("conditional expectation enumeration is limited to n <= 12");
  // Each coordinate is kept (rho), refreshed to 1 ((1-rho)p) or to 0 ((1-rho)(1-p)).
  const Rational w_keep = rho, w_one = (1 - rho) * p, w_zero = (1 - rho) * (1 - p);
  std::vector<int> outcome(n, 0);
  Rational acc = 0;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    long c = code;
    Rational weight = 1;
    Mask y = 0;
    for (int i = 0; i < n; ++i) {
      const int o = static_cast<int>(c % 3);
      c /= 3;
      if (o == 0) {
        weight *= w_keep;
        if (x & bit_of(i + 1)) y |= bit_of(i + 1);
      } else if (o == 1) {
        weight *= w_one;
        y |= bit_of(i + 1);
      } else {
        weight *= w_zero;
      }
      if (weight == 0) break;
    }
    if (weight != 0) acc += weight * evaluate_boolean(f, y);
  }
  return acc;
}

double stability(const SpectralProfile& profile, double rho) {
  check_rho(rho);
  const int n = measure_slice_n(profile.measure);
  if (std::holds_alternative<GaussianSliceMeasure>(profile.measure)) {
    throw std::invalid_argument("stability is not defined for the gaussian-slice measure");
  }
  double acc = 0;
  for (std::size_t d = 0; d < profile.weights.size(); ++d) {
    const double e = n > 0 ? slice_noise_exponent(static_cast<int>(d), n) : static_cast<double>(d);
    acc += std::pow(rho, e) * profile.weights[d].get_d();
  }
  return acc;
}

Rational stability_exact(const SpectralProfile& profile, const Rational& rho) {
  if (rho < 0 || rho > 1) throw std::invalid_argument("rho must lie in [0,1]");
  if (!std::holds_alternative<CubeMeasure>(profile.measure) && !std::holds_alternative<GaussianMeasure>(profile.measure)) {
    throw std::invalid_argument("exact stability is available for cube and gaussian profiles only");
  }
  Rational acc = 0;
  for (std::size_t d = 0; d < profile.weights.size(); ++d) acc += power(rho, static_cast<unsigned>(d)) * profile.weights[d];
  return acc;
}

Estimate stability_monte_carlo(const PointFunction& f, int n, double rho, const MeasureSpec& m, std::uint64_t pairs,
                               std::uint64_t seed, bool parallel) {
  check_rho(rho);
  if (pairs == 0) throw std::invalid_argument("pair count must be positive");
  const std::uint64_t chunk = 1 << 14;
  const std::size_t chunks = chunk_count(pairs, chunk);
  struct Acc {
    double sum = 0, sum_sq = 0;
  };
  auto body = [&](std::size_t c) {
    Rng rng(seed, c);
    std::vector<double> x(n), y(n);
    std::optional<SliceSampler> sampler;
    if (const auto* s = std::get_if<SliceMeasure>(&m)) sampler.emplace(s->n, s->k);
    Acc acc;
    const std::uint64_t count = std::min<std::uint64_t>(chunk, pairs - c * chunk);
    for (std::uint64_t t = 0; t < count; ++t) {
      if (sampler) {
        const auto& ind = sampler->draw(rng);
        for (int q = 0; q < n; ++q) x[q] = ind[q];
      } else {
        sample_into(m, rng, x);
      }
      resample_noise(x, rho, m, rng, y);
      const double v = f(x) * f(y);
      acc.sum += v;
      acc.sum_sq += v * v;
    }
    return acc;
  };
  const auto parts = parallel ? map_chunks<Acc>(chunks, body) : map_chunks_serial<Acc>(chunks, body);
  Acc total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double N = static_cast<double>(pairs);
  const double mean = total.sum / N;
  const double var = pairs > 1 ? std::max(0.0, (total.sum_sq - N * mean * mean) / (N - 1)) : 0.0;
  return Estimate{mean, std::sqrt(var / N), pairs, seed};
}

Estimate stability_monte_carlo(const RealPoly& f, double rho, const MeasureSpec& m, std::uint64_t pairs,
                               std::uint64_t seed, bool parallel) {
  return stability_monte_carlo([&f](std::span<const double> x) { return f.evaluate(x); }, static_cast<int>(f.n()), rho,
                               m, pairs, seed, parallel);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::domain_error("normal quantile needs 0 < mu < 1");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * mu);
}

double gamma_rho(double mu, double rho) {
  check_rho(rho);
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in [0,1]");
  if (mu == 0.0) return 0.0;
  if (mu == 1.0) return 1.0;
  const double h = normal_quantile(mu);
  const double base = mu * mu;
  if (rho == 0.0) return base;
  // Plackett: d/d(rho) of the quadrant probability is the bivariate density
  // at (h, h); with rho = sin(theta) the integrand is smooth on [0, asin rho].
  auto integrand = [h](double theta) { return std::exp(-h * h / (1.0 + std::sin(theta))); };
  double error = 0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::asin(rho), 15, 1e-12, &error);
  return base + integral / (2.0 * std::numbers::pi);
}

NoiseGap noise_operator_gap(const MultilinearPoly& f, double delta, int n, const MeasureSpec& m) {
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2)");
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (2 * f.degree() > n) throw std::invalid_argument("noise gap needs deg f <= n/2");
  std::vector<Rational> weights;
  if (is_harmonic(f)) {
    for (int d = 0; d <= f.degree(); ++d) weights.push_back(norm_sq(homogeneous_part(f, d, MonomialDegree{}), m));
  } else {
    weights = spectral_profile(f, m).weights;
  }
  const double rho = 1.0 - delta;
  double gap_sq = 0, norm = 0;
  for (std::size_t d = 0; d < weights.size(); ++d) {
    const double diff = std::pow(rho, slice_noise_exponent(static_cast<int>(d), n)) - std::pow(rho, static_cast<double>(d));
    gap_sq += diff * diff * weights[d].get_d();
    norm += weights[d].get_d();
  }
  NoiseGap out;
  out.gap = std::sqrt(gap_sq);
  out.envelope = 32.0 / (delta * delta) / n * std::sqrt(norm);
  out.holds = out.gap <= out.envelope;
  return out;
}

}  // namespace slicelab
