#include "slicelab/harmonic.hpp"

#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "slicelab/errors.hpp"
#include "slicelab/parallel.hpp"

namespace slicelab {

TopSet::TopSet(int n, std::vector<int> indices) : n_(n), b_(std::move(indices)) {
  if (n < 0 || n > kMaxExactVars) throw std::invalid_argument("top set n out of range");
  for (std::size_t i = 0; i < b_.size(); ++i) {
    const int want = 2 * static_cast<int>(i + 1);
    if (b_[i] < want || b_[i] > n || (i > 0 && b_[i] <= b_[i - 1])) {
      std::string text;
      for (int v : b_) text += (text.empty() ? "" : ",") + std::to_string(v);
      throw std::invalid_argument("(" + text + ") is not a top set of [" + std::to_string(n) + "]");
    }
  }
}

Rational TopSet::normalization() const {
  BigInt c = 1;
  for (std::size_t i = 0; i < b_.size(); ++i) c *= binomial(b_[i] - 2 * static_cast<long>(i), 2);
  return Rational(c);
}

std::vector<TopSet> enumerate_top_sets(int n, int d) {
  if (d < 0 || 2 * d > n) {
    throw std::invalid_argument("top sets of length " + std::to_string(d) + " need 2d <= n = " + std::to_string(n));
  }
  std::vector<TopSet> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int i) {
    if (i == d) {
      out.emplace_back(n, cur);
      return;
    }
    const int lo = std::max(cur.empty() ? 1 : cur.back() + 1, 2 * (i + 1));
    for (int b = lo; b <= n - (d - i - 1); ++b) {
      cur.push_back(b);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

namespace {

MultilinearPoly expand_chi(const TopSet& b) {
  const auto& idx = b.indices();
  const int d = b.size();
  const Mask bmask = b.mask();
  std::unordered_map<Mask, long long> acc;
  // DFS over companions A (a_i < b_i, distinct, outside B) and, for each,
  // over the 2^d monomials of prod_i (x_{a_i} - x_{b_i}).
  std::vector<int> a(d);
  std::function<void(int, Mask)> choose = [&](int i, Mask used) {
    if (i == d) {
      for (Mask pick = 0; pick < (Mask{1} << d); ++pick) {
        Mask m = 0;
        int minus = 0;
        for (int t = 0; t < d; ++t) {
          if ((pick >> t) & 1U) {
            m |= bit_of(idx[t]);
            ++minus;
          } else {
            m |= bit_of(a[t]);
          }
        }
        acc[m] += (minus % 2) ? -1 : 1;
      }
      return;
    }
    for (int j = 1; j < idx[i]; ++j) {
      const Mask bj = bit_of(j);
      if ((bmask & bj) || (used & bj)) continue;
      a[i] = j;
      choose(i + 1, used | bj);
    }
  };
  choose(0, 0);
  MultilinearPoly f(b.n());
  for (const auto& [m, c] : acc) {
    if (c != 0) f.add_term(m, Rational(static_cast<long>(c)));
  }
  return f;
}

/// chi_B(x) for n <= 25, where the count of companions fits in 64 bits.
long long chi_value_small(const std::vector<int>& idx, Mask not_b, Mask x) {
  long long value = 1;
  int used[2] = {0, 0};
  int sign = 0;
  for (int bi : idx) {
    const int color = static_cast<int>((x >> (bi - 1)) & 1U);
    const Mask below = not_b & (bit_of(bi) - 1);
    // Companion a_i must take the opposite value of x_{b_i}.
    const int cand = color ? std::popcount(below & ~x) : std::popcount(below & x);
    const int avail = cand - used[color];
    if (avail <= 0) return 0;
    value *= avail;
    ++used[color];
    sign ^= color;
  }
  return sign ? -value : value;
}

}  // namespace

HarmonicBasisElement chi_B(const TopSet& b) {
  static std::mutex mu;
  static std::map<std::pair<int, std::vector<int>>, std::shared_ptr<const HarmonicBasisElement>> cache;
  const auto key = std::make_pair(b.n(), b.indices());
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto elem = std::make_shared<const HarmonicBasisElement>(HarmonicBasisElement{b, expand_chi(b), b.normalization()});
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, elem);
  return *it->second;
}

BigInt chi_value(const TopSet& b, Mask x) {
  const Mask not_b = full_mask(b.n()) & ~b.mask();
  BigInt value = 1;
  int used[2] = {0, 0};
  int sign = 0;
  for (int bi : b.indices()) {
    const int color = static_cast<int>((x >> (bi - 1)) & 1U);
    const Mask below = not_b & (bit_of(bi) - 1);
    const int cand = color ? std::popcount(below & ~x) : std::popcount(below & x);
    const int avail = cand - used[color];
    if (avail <= 0) return 0;
    value *= avail;
    ++used[color];
    sign ^= color;
  }
  return sign ? BigInt(-value) : value;
}

Rational chi_d_norm_sq(const MeasureSpec& m, int d) {
  if (d < 0) throw std::invalid_argument("degree must be nonnegative");
  if (const auto* s = std::get_if<SliceMeasure>(&m)) {
    if (d > std::min(s->k, s->n - s->k)) {
      throw std::invalid_argument("degree " + std::to_string(d) + " exceeds min(k, n-k) on " + describe(m));
    }
    BigInt num = falling_factorial(s->k, d) * falling_factorial(s->n - s->k, d);
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(d));
    return ratio(num, falling_factorial(s->n, 2 * d));
  }
  Rational p;
  if (const auto* c = std::get_if<CubeMeasure>(&m)) p = c->p;
  if (const auto* g = std::get_if<GaussianMeasure>(&m)) p = g->p;
  // Harmonic polynomials have the same law under gamma_{p,q} as under G_p.
  if (const auto* g = std::get_if<GaussianSliceMeasure>(&m)) p = g->p;
  return power(2 * p * (1 - p), static_cast<unsigned>(d));
}

SliceFunction::SliceFunction(int n, int k, std::map<Mask, Rational> values)
    : n_(n), k_(k), values_(std::move(values)) {
  if (n < 1 || n > kMaxExactVars || k < 0 || k > n) throw std::invalid_argument("invalid slice dimensions");
  for (const auto& [x, v] : values_) {
    if ((x & ~full_mask(n)) != 0 || popcount(x) != k) {
      throw std::invalid_argument("slice function entry is not a " + std::to_string(k) + "-subset of [" +
                                  std::to_string(n) + "]");
    }
  }
  const BigInt expected = binomial(n, k);
  if (BigInt(static_cast<unsigned long>(values_.size())) != expected) {
    throw std::invalid_argument("slice function has " + std::to_string(values_.size()) + " entries, expected " +
                                expected.get_str());
  }
}

SliceFunction SliceFunction::from_poly(const MultilinearPoly& f, int k) {
  check_slice_cap(f.n());
  std::map<Mask, Rational> values;
  for (Mask x : k_subsets(f.n(), k)) values.emplace(x, evaluate_boolean(f, x));
  return SliceFunction(f.n(), k, std::move(values));
}

SliceFunction SliceFunction::from_callable(int n, int k, const std::function<Rational(Mask)>& f) {
  check_slice_cap(n);
  std::map<Mask, Rational> values;
  for (Mask x : k_subsets(n, k)) values.emplace(x, f(x));
  return SliceFunction(n, k, std::move(values));
}

const Rational& SliceFunction::at(Mask x) const {
  auto it = values_.find(x);
  if (it == values_.end()) throw std::out_of_range("point is not on the slice");
  return it->second;
}

std::vector<Rational> HarmonicExpansion::degree_weights() const {
  const int top = std::min(k, n - k);
  std::vector<Rational> w(top + 1, Rational(0));
  const MeasureSpec m = SliceMeasure{n, k};
  for (const auto& [b, c] : coeffs) w[b.size()] += c * c * b.normalization() * chi_d_norm_sq(m, b.size());
  return w;
}

int HarmonicExpansion::degree() const {
  int d = 0;
  for (const auto& [b, c] : coeffs) d = std::max(d, b.size());
  return d;
}

MultilinearPoly HarmonicExpansion::polynomial() const {
  MultilinearPoly out(n);
  for (const auto& [b, c] : coeffs) out += chi_B(b).chi * c;
  return out;
}

HarmonicExpansion harmonic_expansion(const SliceFunction& f, Exec exec) {
  const int n = f.n();
  const int k = f.k();
  check_slice_cap(n);
  std::vector<Mask> points;
  points.reserve(f.values().size());
  BigInt lcm = 1;
  for (const auto& [x, v] : f.values()) {
    points.push_back(x);
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den_mpz_t());
  }
  // Scale to integers so every inner product is an exact integer sum.
  std::vector<BigInt> scaled;
  scaled.reserve(points.size());
  for (const auto& [x, v] : f.values()) scaled.emplace_back(v.get_num() * (lcm / v.get_den()));

  std::vector<TopSet> basis;
  for (int d = 0; d <= std::min(k, n - k); ++d) {
    auto level = enumerate_top_sets(n, d);
    basis.insert(basis.end(), level.begin(), level.end());
  }
  auto body = [&](std::size_t t) {
    const auto& idx = basis[t].indices();
    const Mask not_b = full_mask(n) & ~basis[t].mask();
    BigInt acc = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const long long v = chi_value_small(idx, not_b, points[i]);
      if (v > 0) {
        mpz_addmul_ui(acc.get_mpz_t(), scaled[i].get_mpz_t(), static_cast<unsigned long>(v));
      } else if (v < 0) {
        mpz_submul_ui(acc.get_mpz_t(), scaled[i].get_mpz_t(), static_cast<unsigned long>(-v));
      }
    }
    return acc;
  };
  const auto sums = exec == Exec::parallel ? map_chunks<BigInt>(basis.size(), body)
                                           : map_chunks_serial<BigInt>(basis.size(), body);
  HarmonicExpansion out;
  out.n = n;
  out.k = k;
  const MeasureSpec m = SliceMeasure{n, k};
  const Rational total = Rational(binomial(n, k) * lcm);
  for (std::size_t t = 0; t < basis.size(); ++t) {
    if (sums[t] == 0) continue;
    const Rational norm = basis[t].normalization() * chi_d_norm_sq(m, basis[t].size());
    Rational c = Rational(sums[t]) / (total * norm);
    c.canonicalize();
    out.coeffs.emplace_back(basis[t], c);
  }
  return out;
}

MultilinearPoly harmonic_projection(const SliceFunction& f, Exec exec) {
  return harmonic_expansion(f, exec).polynomial();
}

MultilinearPoly harmonic_projection(const MultilinearPoly& f, int k, Exec exec) {
  return harmonic_projection(SliceFunction::from_poly(f, k), exec);
}

Rational monomial_projection_coefficient(int n, int d) {
  if (d < 0 || d > n) throw std::invalid_argument("monomial degree out of range");
  return make_rational(n - 2 * d + 1, n - d + 1);
}

int slice_degree(const SliceFunction& f) { return harmonic_expansion(f).degree(); }

}  // namespace slicelab
