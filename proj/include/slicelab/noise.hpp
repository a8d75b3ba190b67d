#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "slicelab/harmonic.hpp"
#include "slicelab/measures.hpp"
#include "slicelab/poly.hpp"
#include "slicelab/real_poly.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

/// Per-degree squared norms ||f^{=d}||^2 under a measure.
struct SpectralProfile {
  MeasureSpec measure;
  std::vector<Rational> weights;

  Rational total() const;
  int degree() const;
  /// Weight above degree kcut.
  Rational tail(int kcut) const;
};

/// Cube: character-degree parts. Gaussian: the same numbers (moments agree).
SpectralProfile cube_spectral_profile(const MultilinearPoly& f, const Rational& p);
/// Slice: weights of the harmonic expansion of f restricted to the slice.
SpectralProfile slice_spectral_profile(const SliceFunction& f);
SpectralProfile slice_spectral_profile(const MultilinearPoly& f, int k);
/// Dispatches on the measure kind (cube, gaussian or slice).
SpectralProfile spectral_profile(const MultilinearPoly& f, const MeasureSpec& m);

/// ||df/dx_i||^2 under mu_p, computed directly and from the Fourier
/// weights; throws AssertionFailure if they disagree.
Rational cube_influence(const MultilinearPoly& f, const Rational& p, int i);
Rational total_cube_influence(const MultilinearPoly& f, const Rational& p);

/// E_{nu_k}[(f - f^{(ij)})^2] by enumeration.
Rational slice_influence_pair(const SliceFunction& f, int i, int j);
/// (1/n) sum_j Inf_{ij}
Rational slice_influence(const SliceFunction& f, int i);
Rational total_slice_influence(const SliceFunction& f);

/// Closed form of Inf_i for a linear f = c + sum a_j x_j on slice(n,k):
/// (1/n) sum_j (a_i - a_j)^2 * 2k(n-k)/(n(n-1)). Works for any n.
double linear_slice_influence(const RealPoly& f, int k, std::size_t i);

/// Monte Carlo estimate of Inf_i: draws x ~ nu_k and j uniform in [n]
/// (j = i contributes 0) and averages (f(x) - f(x^{(ij)}))^2.
Estimate sampled_slice_influence(const RealPoly& f, int k, std::size_t i, std::uint64_t samples,
                                 std::uint64_t seed);

enum class NoiseKind { T, H, U };

/// T_rho and U_rho scale character-degree parts by rho^d (exact).
MultilinearPoly noise_operator_exact(const MultilinearPoly& f, const Rational& rho, NoiseKind kind,
                                     const Rational& p);
/// General form in floating point. H scales degree-d parts by
/// rho^{d(1 - (d-1)/n)}: monomial-degree parts when f is harmonic, and the
/// character-degree(p) parts otherwise (p is then required).
RealPoly noise_operator(const MultilinearPoly& f, double rho, NoiseKind kind, std::optional<Rational> p,
                        int n_slice);

/// Exponent applied to the degree-d part by H_rho on n coordinates.
double slice_noise_exponent(int d, int n);

/// One noisy partner of x. Cube: keep each x_i w.p. rho else resample.
/// Slice: Po((n-1)/2 log(1/rho)) uniform transpositions; rho = 0 gives a
/// fresh uniform point. Gaussian: (1-rho)p + rho x + sqrt(1-rho^2) N(0,p(1-p)).
void resample_noise(std::span<const double> x, double rho, const MeasureSpec& m, Rng& rng,
                    std::span<double> y);

/// Exact E[f(y) | x] for the cube resampling semantics, enumerating which
/// coordinates are kept and the fresh values of the others (n <= 16).
Rational cube_conditional_expectation(const MultilinearPoly& f, Mask x, const Rational& rho, const Rational& p);

/// sum_d rho^d w_d (cube, Gaussian) or sum_d rho^{d(1-(d-1)/n)} w_d (slice).
double stability(const SpectralProfile& profile, double rho);
/// Exact cube or Gaussian stability for rational rho.
Rational stability_exact(const SpectralProfile& profile, const Rational& rho);

/// Monte Carlo E[f(x) f(y)] with y a noisy partner of x.
using PointFunction = std::function<double(std::span<const double>)>;
Estimate stability_monte_carlo(const PointFunction& f, int n, double rho, const MeasureSpec& m,
                               std::uint64_t pairs, std::uint64_t seed, bool parallel = true);
Estimate stability_monte_carlo(const RealPoly& f, double rho, const MeasureSpec& m, std::uint64_t pairs,
                               std::uint64_t seed, bool parallel = true);

/// P[X <= t, Y <= t] for standard normals with correlation rho, t = Phi^{-1}(mu).
double gamma_rho(double mu, double rho);
double normal_cdf(double x);
double normal_quantile(double mu);

struct NoiseGap {
  double gap = 0;
  double envelope = 0;
  bool holds = false;
};

/// ||H_{1-delta} f - U_{1-delta} f|| under m (slice or cube) with the
/// envelope 32 delta^{-2} / n ||f||.
NoiseGap noise_operator_gap(const MultilinearPoly& f, double delta, int n, const MeasureSpec& m);

}  // namespace slicelab
