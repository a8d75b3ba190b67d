#include "slicelab/ekr.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "slicelab/errors.hpp"
#include "slicelab/harmonic.hpp"
#include "slicelab/noise.hpp"
#include "slicelab/parallel.hpp"

namespace slicelab {

namespace {

/// binom(a, b) for any integer a; zero when b < 0.
BigInt gbinom(long a, long b) {
  if (b < 0) return 0;
  BigInt fact = 1;
  for (long j = 2; j <= b; ++j) fact *= j;
  return falling_factorial(a, b) / fact;
}

void check_wilson_params(int n, int k, int t) {
  if (t < 2) throw std::invalid_argument("Wilson eigenvalues need t >= 2");
  if (k < t + 1) throw std::invalid_argument("Wilson eigenvalues need k >= t+1");
  if (n < (t + 1) * (k - t + 1)) {
    throw std::invalid_argument("Wilson eigenvalues need n >= (t+1)(k-t+1) = " + std::to_string((t + 1) * (k - t + 1)));
  }
}

}  // namespace

SetFamily::SetFamily(int n, int k, std::set<Mask> members) : n_(n), k_(k) {
  if (n < 1 || n > kMaxExactVars || k < 0 || k > n) throw std::invalid_argument("invalid family dimensions");
  for (Mask s : members) insert(s);
}

void SetFamily::insert(Mask s) {
  if ((s & ~full_mask(n_)) != 0 || popcount(s) != k_) {
    throw std::invalid_argument("family member is not a " + std::to_string(k_) + "-subset of [" + std::to_string(n_) + "]");
  }
  members_.insert(s);
}

Rational wilson_eigenvalue(int n, int k, int t, int e) {
  check_wilson_params(n, k, t);
  if (e < 0) throw std::invalid_argument("eigenvalue index must be nonnegative");
  Rational sum = 0;
  for (int i = 0; i < t; ++i) {
    const BigInt num = gbinom(k - 1 - i, k - t) * gbinom(k - e, i) * gbinom(n - k - e + i, k - e);
    if (num == 0) continue;
    const BigInt den = gbinom(n - k - t + i, k - t);
    const Rational term = ratio(num, den);
    if (i % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return (t - 1 - e) % 2 == 0 ? Rational(1 + sum) : Rational(1 - sum);
}

Rational wilson_eigenvalue_alt(int n, int k, int t) {
  check_wilson_params(n, k, t);
  Rational sum = 0;
  for (int i = 0; i < t; ++i) {
    const BigInt num = 2 * gbinom(t - 1, i) * gbinom(k - t, i + 2);
    if (num == 0) continue;
    sum += ratio(num, (i + 2) * gbinom(n - k - t + i, i + 2));
  }
  return 1 - Rational(gbinom(t + 1, 2)) * sum;
}

WilsonSpectrum wilson_spectrum(int n, int k, int t) {
  WilsonSpectrum s{n, k, t, {}};
  for (int e = 0; e <= k; ++e) s.eigenvalues.push_back(wilson_eigenvalue(n, k, t, e));
  return s;
}

SetFamily t_star(int n, int k, int t, Mask j) {
  if (popcount(j) != t) throw std::invalid_argument("a t-star needs |J| = t");
  if ((j & ~full_mask(n)) != 0) throw std::invalid_argument("J is not a subset of [n]");
  SetFamily f(n, k);
  for (Mask s : k_subsets(n, k)) {
    if ((s & j) == j) f.insert(s);
  }
  return f;
}

SetFamily frankl_family(int n, int k, int t, Mask j) {
  if (popcount(j) != t + 2) throw std::invalid_argument("a Frankl family needs |J| = t+2");
  if (k < t + 1) throw std::invalid_argument("a Frankl family needs k >= t+1");
  if ((j & ~full_mask(n)) != 0) throw std::invalid_argument("J is not a subset of [n]");
  SetFamily f(n, k);
  for (Mask s : k_subsets(n, k)) {
    if (popcount(s & j) >= t + 1) f.insert(s);
  }
  return f;
}

Rational family_measure(const SetFamily& f) {
  return ratio(BigInt(static_cast<unsigned long>(f.size())), binomial(f.n(), f.k()));
}

bool is_t_intersecting(const SetFamily& f, int t) {
  const std::vector<Mask> m(f.members().begin(), f.members().end());
  auto row = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (popcount(m[i] & m[j]) < t) return 0;
    }
    return 1;
  };
  const auto ok = map_chunks<int>(m.size(), row);
  // A single member is t-intersecting with itself when k >= t.
  if (m.size() == 1 && f.k() < t) return false;
  return std::all_of(ok.begin(), ok.end(), [](int v) { return v == 1; });
}

Rational star_frankl_deficit_raw(int n, int k, int t) {
  const BigInt m = binomial(n - t, k - t);
  const BigInt m1 = (t + 2) * binomial(n - t - 2, k - t - 1) + binomial(n - t - 2, k - t - 2);
  return ratio(m - m1, m);
}

Rational star_frankl_deficit(int n, int k, int t) {
  if (t < 1 || k < t + 1) throw std::invalid_argument("deficit needs k >= t+1 >= 2");
  const long r = n - static_cast<long>(t + 1) * (k - t + 1);
  if (r < 0) throw std::invalid_argument("deficit needs n >= (t+1)(k-t+1)");
  const Rational closed = ratio(BigInt(r) * (r + static_cast<long>(t) * (k - t) + 1),
                                BigInt(n - t) * (n - t - 1));
  const Rational raw = star_frankl_deficit_raw(n, k, t);
  if (closed != raw) {
    throw AssertionFailure("deficit closed form " + to_string(closed) + " differs from raw " + to_string(raw));
  }
  return closed;
}

namespace {

TailCertificate tail_parts(const SetFamily& f, int t) {
  check_wilson_params(f.n(), f.k(), t);
  if (!is_t_intersecting(f, t)) throw std::invalid_argument("family is not " + std::to_string(t) + "-intersecting");
  const SliceFunction fn = SliceFunction::from_callable(f.n(), f.k(), [&](Mask x) {
    return Rational(f.contains(x) ? 1 : 0);
  });
  TailCertificate c;
  c.tail = slice_spectral_profile(fn).tail(t);
  c.expectation = family_measure(f);
  c.star_measure = ratio(binomial(f.n() - t, f.k() - t), binomial(f.n(), f.k()));
  c.lambda = wilson_eigenvalue(f.n(), f.k(), t, t + 2);
  c.min_realised_lambda = c.lambda;
  bool any = false;
  for (int e = t + 1; e <= std::min(f.k(), f.n() - f.k()); ++e) {
    const Rational v = wilson_eigenvalue(f.n(), f.k(), t, e);
    if (!any || v < c.min_realised_lambda) c.min_realised_lambda = v;
    any = true;
  }
  c.expectation_ok = c.expectation <= c.star_measure;
  return c;
}

}  // namespace

TailCertificate spectral_tail_certificate(const SetFamily& f, int t) {
  check_wilson_params(f.n(), f.k(), t);
  if (f.n() == (t + 1) * (f.k() - t + 1)) {
    throw std::invalid_argument("lambda_{t+2} = 0 at the boundary n = (t+1)(k-t+1); use the division-free inequality");
  }
  TailCertificate c = tail_parts(f, t);
  c.bound = (c.star_measure - c.expectation) / c.lambda;
  c.holds = c.expectation_ok && c.tail <= *c.bound;
  return c;
}

TailCertificate spectral_tail_inequality(const SetFamily& f, int t) {
  TailCertificate c = tail_parts(f, t);
  if (c.lambda > 0) c.bound = (c.star_measure - c.expectation) / c.lambda;
  c.holds = c.expectation_ok && c.lambda * c.tail <= c.star_measure - c.expectation;
  return c;
}

CrossCheck cross_intersecting_check(const SetFamily& f, const SetFamily& g) {
  const int n = f.n();
  const int a = f.k();
  const int b = g.k();
  if (g.n() != n) throw std::invalid_argument("dimension hypothesis violated: families live on different ground sets");
  if (n < a + b) throw std::invalid_argument("dimension hypothesis violated: need n >= a + b");
  if (b < a) throw std::invalid_argument("dimension hypothesis violated: need b >= a");
  for (Mask x : f.members()) {
    for (Mask y : g.members()) {
      if ((x & y) == 0) throw NotCrossIntersecting("families are not cross-intersecting");
    }
  }
  CrossCheck c;
  c.sum = f.size() + g.size();
  // With F empty only |G| <= binom(n, b) survives; the sharper bound needs F nonempty.
  c.f_empty = f.size() == 0;
  c.bound = c.f_empty ? binomial(n, b) : binomial(n, b) - binomial(n - a, b) + 1;
  c.holds = BigInt(static_cast<unsigned long>(c.sum)) <= c.bound;
  return c;
}

SetFamily greedy_maximal_family(int n, int k, int t, Rng& rng) {
  const auto all = k_subsets(n, k);
  SetFamily f(n, k);
  std::vector<Mask> candidates = all;
  while (!candidates.empty()) {
    const Mask pick = candidates[rng.below(candidates.size())];
    f.insert(pick);
    std::vector<Mask> next;
    for (Mask s : candidates) {
      if (s != pick && popcount(s & pick) >= t) next.push_back(s);
    }
    candidates.swap(next);
  }
  return f;
}

std::pair<SetFamily, SetFamily> greedy_cross_intersecting(int n, int a, int b, Rng& rng) {
  SetFamily f(n, a), g(n, b);
  std::vector<std::pair<int, Mask>> candidates;
  for (Mask s : k_subsets(n, a)) candidates.emplace_back(0, s);
  for (Mask s : k_subsets(n, b)) candidates.emplace_back(1, s);
  bool first = true;  // the first pick comes from F so that F is nonempty
  while (!candidates.empty()) {
    const std::size_t range = first ? binomial(n, a).get_ui() : candidates.size();
    first = false;
    const auto [side, pick] = candidates[rng.below(range)];
    (side == 0 ? f : g).insert(pick);
    std::vector<std::pair<int, Mask>> next;
    for (const auto& [sd, s] : candidates) {
      if (sd == side && s == pick) continue;
      if (sd != side && (s & pick) == 0) continue;
      next.emplace_back(sd, s);
    }
    candidates.swap(next);
  }
  return {f, g};
}

}  // namespace slicelab
