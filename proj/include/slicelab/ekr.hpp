#pragma once

#include <optional>
#include <set>
#include <vector>

#include "slicelab/poly.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

/// Family of k-subsets of [n], stored as masks.
class SetFamily {
 public:
  SetFamily(int n, int k, std::set<Mask> members = {});

  int n() const { return n_; }
  int k() const { return k_; }
  const std::set<Mask>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(Mask s) const { return members_.count(s) != 0; }
  void insert(Mask s);

 private:
  int n_, k_;
  std::set<Mask> members_;
};

/// Wilson's lambda_e from the alternating binomial sum. Requires t >= 2,
/// k >= t+1, n >= (t+1)(k-t+1), e >= 0. For e > k the formula value is
/// returned (it equals 1); such e carry no harmonic part.
Rational wilson_eigenvalue(int n, int k, int t, int e);
/// lambda_{t+2} from the second closed form.
Rational wilson_eigenvalue_alt(int n, int k, int t);

struct WilsonSpectrum {
  int n = 0, k = 0, t = 0;
  std::vector<Rational> eigenvalues;  // e = 0..k
};
WilsonSpectrum wilson_spectrum(int n, int k, int t);

/// {A : J subset of A}, |J| = t.
SetFamily t_star(int n, int k, int t, Mask j);
/// {A : |A cap J| >= t+1}, |J| = t+2.
SetFamily frankl_family(int n, int k, int t, Mask j);

Rational family_measure(const SetFamily& f);
bool is_t_intersecting(const SetFamily& f, int t);

/// (m - m1)/m by the closed form r(r + t(k-t) + 1)/((n-t)(n-t-1)), after
/// checking it against the raw binomials (AssertionFailure otherwise).
Rational star_frankl_deficit(int n, int k, int t);
/// (m - m1)/m from m = binom(n-t,k-t), m1 = (t+2)binom(n-t-2,k-t-1) + binom(n-t-2,k-t-2).
Rational star_frankl_deficit_raw(int n, int k, int t);

struct TailCertificate {
  Rational tail;         // ||f^{>t}||^2 under nu_k
  Rational expectation;  // E[f]
  Rational star_measure; // m
  Rational lambda;       // lambda_{t+2}
  std::optional<Rational> bound;  // (m - E f)/lambda when lambda > 0
  Rational min_realised_lambda;   // min lambda_e over t < e <= min(k, n-k), or lambda if none
  bool expectation_ok = false;    // E[f] <= m
  bool holds = false;
};

/// Requires F t-intersecting and lambda_{t+2} > 0.
TailCertificate spectral_tail_certificate(const SetFamily& f, int t);
/// lambda_{t+2} * tail <= m - E[f]; valid also at the boundary lambda = 0.
TailCertificate spectral_tail_inequality(const SetFamily& f, int t);

struct CrossCheck {
  std::size_t sum = 0;
  BigInt bound;  // binom(n,b) - binom(n-a,b) + 1, or binom(n,b) when F is empty
  bool f_empty = false;
  bool holds = false;
};

/// Throws std::invalid_argument for a dimension hypothesis failure and
/// NotCrossIntersecting when some pair of members is disjoint.
class NotCrossIntersecting : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
CrossCheck cross_intersecting_check(const SetFamily& f, const SetFamily& g);

/// Random maximal t-intersecting family: a random first set, then
/// uniformly random compatible sets until none remain.
SetFamily greedy_maximal_family(int n, int k, int t, Rng& rng);
/// Random maximal cross-intersecting pair (F in slice a, G in slice b), F nonempty.
std::pair<SetFamily, SetFamily> greedy_cross_intersecting(int n, int a, int b, Rng& rng);

}  // namespace slicelab
