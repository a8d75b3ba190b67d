#include "slicelab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slicelab/errors.hpp"
#include "slicelab/parallel.hpp"

namespace slicelab {

LipschitzFunctional LipschitzFunctional::clamp_window(double a, double b) {
  if (!(a <= b)) throw std::invalid_argument("clamp window needs a <= b");
  return {LipschitzKind::clamp_window, a, b};
}

LipschitzFunctional LipschitzFunctional::distance_to_interval(double a, double b) {
  if (!(a <= b)) throw std::invalid_argument("interval needs a <= b");
  return {LipschitzKind::distance_to_interval, a, b};
}

LipschitzFunctional LipschitzFunctional::clumped_square() { return {LipschitzKind::clumped_square, 0, 1}; }

LipschitzFunctional LipschitzFunctional::soft_threshold(double sigma, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("soft threshold needs eps > 0");
  return {LipschitzKind::soft_threshold, sigma, eps};
}

LipschitzFunctional LipschitzFunctional::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ':')) parts.push_back(cur);
  auto num = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing text");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number in functional '" + text + "'");
    }
  };
  if (parts.size() == 3 && parts[0] == "clamp") return clamp_window(num(1), num(2));
  if (parts.size() == 3 && parts[0] == "interval") return distance_to_interval(num(1), num(2));
  if (parts.size() == 1 && parts[0] == "sq") return clumped_square();
  if (parts.size() == 3 && parts[0] == "threshold") return soft_threshold(num(1), num(2));
  throw std::invalid_argument("unknown functional '" + text + "' (clamp:A:B, interval:A:B, sq, threshold:S:E)");
}

double LipschitzFunctional::operator()(double x) const {
  switch (kind_) {
    case LipschitzKind::clamp_window:
      return std::clamp(x, a_, b_);
    case LipschitzKind::distance_to_interval:
      return x < a_ ? a_ - x : (x > b_ ? x - b_ : 0.0);
    case LipschitzKind::clumped_square:
      return x <= 0 ? 0.0 : (x >= 1 ? 1.0 : x * x);
    case LipschitzKind::soft_threshold:
      return x <= a_ ? 0.0 : (x >= a_ + b_ ? 1.0 : (x - a_) / b_);
  }
  return 0.0;
}

double LipschitzFunctional::lipschitz_constant() const {
  switch (kind_) {
    case LipschitzKind::clamp_window:
    case LipschitzKind::distance_to_interval:
      return 1.0;
    case LipschitzKind::clumped_square:
      return 2.0;
    case LipschitzKind::soft_threshold:
      return 1.0 / b_;
  }
  return 0.0;
}

std::string LipschitzFunctional::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case LipschitzKind::clamp_window:
      os << "clamp:" << a_ << ":" << b_;
      break;
    case LipschitzKind::distance_to_interval:
      os << "interval:" << a_ << ":" << b_;
      break;
    case LipschitzKind::clumped_square:
      os << "sq";
      break;
    case LipschitzKind::soft_threshold:
      os << "threshold:" << a_ << ":" << b_;
      break;
  }
  return os.str();
}

std::pair<double, std::string> max_slice_influence(const RealPoly& f, int k, std::uint64_t samples,
                                                   std::uint64_t seed) {
  const std::size_t n = f.n();
  if (f.degree() <= 1) {
    double best = 0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, linear_slice_influence(f, k, i));
    return {best, "closed-form-linear"};
  }
  if (n <= 12) {
    const auto points = k_subsets(static_cast<int>(n), k);
    std::vector<double> x(n);
    std::vector<double> best_per(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0;
      for (Mask pt : points) {
        for (std::size_t q = 0; q < n; ++q) x[q] = (pt >> q) & 1U;
        for (std::size_t j = 0; j < n; ++j) {
          if (x[i] == x[j]) continue;
          const double before = f.evaluate(x);
          std::swap(x[i], x[j]);
          const double d = before - f.evaluate(x);
          std::swap(x[i], x[j]);
          acc += d * d;
        }
      }
      best_per[i] = acc / (static_cast<double>(points.size()) * static_cast<double>(n));
    }
    return {*std::max_element(best_per.begin(), best_per.end()), "exact-enumeration"};
  }
  double best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    best = std::max(best, sampled_slice_influence(f, k, i, samples, derive_seed(seed, i)).value);
  }
  return {best, "sampled-pairs"};
}

InvarianceReport run_invariance(const RealPoly& f, int k, const LipschitzFunctional& psi, std::uint64_t samples,
                                std::uint64_t seed, const InvarianceOptions& options) {
  const int n = static_cast<int>(f.n());
  if (n < 2 || k <= 0 || k >= n) throw std::invalid_argument("invariance needs 0 < k < n");
  if (!f.is_harmonic()) throw std::invalid_argument("invariance experiments need a harmonic polynomial");
  if (f.degree() > std::min(k, n - k)) throw std::invalid_argument("degree exceeds min(k, n-k)");
  if (samples == 0) throw std::invalid_argument("sample count must be positive");
  InvarianceReport r;
  r.n = n;
  r.k = k;
  r.p = make_rational(k, n);
  r.degree = f.degree();
  r.psi = psi.describe();
  r.lipschitz = psi.lipschitz_constant();
  r.samples = samples;
  r.seed = seed;
  const MeasureSpec ms[3] = {SliceMeasure{n, k}, CubeMeasure{r.p}, GaussianMeasure{r.p}};
  auto eval = [&f](std::span<const double> x) { return f.evaluate(x); };
  std::vector<EmpiricalDistribution> laws;
  const double pd = to_double(r.p);
  const double scale = std::sqrt(pd * (1 - pd) * n);
  for (int t = 0; t < 3; ++t) {
    auto values = monte_carlo_values(ms[t], n, samples, derive_seed(seed, t), eval);
    double sum = 0, sum_sq = 0;
    for (double v : values) {
      const double y = psi(v);
      sum += y;
      sum_sq += y * y;
    }
    const double N = static_cast<double>(samples);
    const double mean = sum / N;
    const double var = samples > 1 ? std::max(0.0, (sum_sq - N * mean * mean) / (N - 1)) : 0.0;
    MeasureSummary s;
    s.measure = describe(ms[t]);
    s.psi_mean = Estimate{mean, std::sqrt(var / N), samples, derive_seed(seed, t)};
    if (options.diagnostic_samples > 0) {
      auto sums = monte_carlo_values(ms[t], n, options.diagnostic_samples, derive_seed(seed, 10 + t),
                                     [&](std::span<const double> x) {
                                       double acc = 0;
                                       for (double v : x) acc += v;
                                       return (acc - n * pd) / scale;
                                     });
      double a = 0, b = 0;
      for (double v : sums) {
        a += v;
        b += v * v;
      }
      const double M = static_cast<double>(sums.size());
      s.normalized_sum_mean = a / M;
      s.normalized_sum_variance = M > 1 ? std::max(0.0, (b - M * (a / M) * (a / M)) / (M - 1)) : 0.0;
    }
    if (t == 0) {
      double m1 = 0, m2 = 0;
      for (double v : values) {
        m1 += v;
        m2 += v * v;
      }
      const double N2 = static_cast<double>(values.size());
      r.variance_slice = std::max(0.0, m2 / N2 - (m1 / N2) * (m1 / N2));
    }
    r.measures.push_back(s);
    if (options.keep_values) r.values.push_back(values);
    laws.emplace_back(std::move(values), derive_seed(seed, t));
  }
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& pr : pairs) {
    PairDistance d;
    d.first = r.measures[pr[0]].measure;
    d.second = r.measures[pr[1]].measure;
    d.levy = levy_distance(laws[pr[0]], laws[pr[1]]);
    d.cdf = cdf_distance(laws[pr[0]], laws[pr[1]]);
    r.distances.push_back(d);
  }
  if (options.compute_influences) {
    auto [tau, method] = max_slice_influence(f, k, options.influence_samples, derive_seed(seed, 20));
    r.max_influence = tau;
    r.influence_method = method;
  }
  return r;
}

std::vector<Rational> symmetric_junta_profile(const std::vector<Rational>& values_by_weight, int m, int n, int k) {
  if (m < 0 || m > n || k < 0 || k > n) throw std::invalid_argument("invalid junta dimensions");
  if (static_cast<int>(values_by_weight.size()) != m + 1) throw std::invalid_argument("need one value per weight 0..m");
  const int lo = std::max(0, k - (n - m));
  const int hi = std::min(m, k);
  std::vector<long> pts;
  std::vector<Rational> w;
  const BigInt total = binomial(n, k);
  for (int j = lo; j <= hi; ++j) {
    pts.push_back(j);
    w.push_back(ratio(binomial(m, j) * binomial(n - m, k - j), total));
  }
  const std::size_t s = pts.size();
  auto inner = [&](const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational acc = 0;
    for (std::size_t i = 0; i < s; ++i) acc += w[i] * a[i] * b[i];
    return acc;
  };
  std::vector<Rational> fv(s);
  for (std::size_t i = 0; i < s; ++i) fv[i] = values_by_weight[pts[i]];
  // Monic orthogonal polynomials in j by the three-term recurrence.
  const int top = std::min(static_cast<int>(s) - 1, std::min(k, n - k));
  std::vector<Rational> weights;
  std::vector<Rational> prev(s, Rational(0)), cur(s, Rational(1));
  Rational prev_norm = 1;
  for (int l = 0; l <= top; ++l) {
    const Rational norm = inner(cur, cur);
    const Rational proj = inner(fv, cur);
    weights.push_back(proj * proj / norm);
    if (l == top) break;
    Rational a = 0;
    for (std::size_t i = 0; i < s; ++i) a += w[i] * pts[i] * cur[i] * cur[i];
    a /= norm;
    const Rational b = l == 0 ? Rational(0) : Rational(norm / prev_norm);
    std::vector<Rational> next(s);
    for (std::size_t i = 0; i < s; ++i) next[i] = (pts[i] - a) * cur[i] - b * prev[i];
    prev.swap(cur);
    cur.swap(next);
    prev_norm = norm;
  }
  return weights;
}

MajorityReport majority_stablest_check(int m, int n, int k, double rho, std::uint64_t mc_pairs, std::uint64_t seed) {
  if (m < 1 || m % 2 == 0) throw std::invalid_argument("majority needs an odd number of inputs");
  if (m > n) throw std::invalid_argument("majority needs m <= n");
  if (k <= 0 || k >= n) throw std::invalid_argument("majority needs 0 < k < n");
  if (!(rho >= 0 && rho <= 1)) throw std::invalid_argument("rho must lie in [0,1]");
  MajorityReport r;
  r.m = m;
  r.n = n;
  r.k = k;
  r.rho = rho;
  std::vector<Rational> values(m + 1);
  for (int j = 0; j <= m; ++j) values[j] = 2 * j > m ? 1 : 0;
  r.weights = symmetric_junta_profile(values, m, n, k);
  // f is 0/1 valued, so E[f] = E[f^2] = total weight.
  r.mean = 0;
  for (const auto& v : r.weights) r.mean += v;
  SpectralProfile profile{SliceMeasure{n, k}, r.weights};
  r.stability = stability(profile, rho);
  r.gamma = gamma_rho(to_double(r.mean), rho);
  r.gap = r.stability - r.gamma;
  r.within_tolerance = r.stability <= r.gamma + r.tolerance;
  if (mc_pairs > 0) {
    auto maj = [m](std::span<const double> x) {
      double s = 0;
      for (int i = 0; i < m; ++i) s += x[i];
      return 2 * s > m ? 1.0 : 0.0;
    };
    r.monte_carlo = stability_monte_carlo(maj, n, rho, SliceMeasure{n, k}, mc_pairs, seed);
  }
  return r;
}

SliceFunction to_sign_function(const SliceFunction& f, bool& converted) {
  bool sign = true, zero_one = true;
  for (const auto& [x, v] : f.values()) {
    if (v != 1 && v != -1) sign = false;
    if (v != 0 && v != 1) zero_one = false;
  }
  converted = false;
  if (sign) return f;
  if (!zero_one) throw std::invalid_argument("Boolean slice functions must take values in {-1,+1} or {0,1}");
  std::map<Mask, Rational> values;
  for (const auto& [x, v] : f.values()) values.emplace(x, 2 * v - 1);
  converted = true;
  return SliceFunction(f.n(), f.k(), std::move(values));
}

BourgainReport bourgain_tail_check(const SliceFunction& input, int kcut) {
  if (kcut < 1) throw std::invalid_argument("kcut must be at least 1");
  BourgainReport r;
  const SliceFunction f = to_sign_function(input, r.converted_from_01);
  const auto profile = slice_spectral_profile(f);
  r.tail = profile.tail(kcut);
  r.variance = profile.tail(0);
  r.floor = to_double(r.variance) / std::sqrt(static_cast<double>(kcut));
  if (r.floor > 0) r.ratio = to_double(r.tail) / r.floor;
  for (int i = 1; i <= f.n(); ++i) r.max_influence = std::max(r.max_influence, to_double(slice_influence(f, i)));
  r.degree_at_most_kcut = r.tail == 0;
  return r;
}

JuntaFit kindler_safra_search(const SliceFunction& input, int kcut, int junta_cap, std::uint64_t budget) {
  if (junta_cap < 0 || junta_cap > 6) throw std::invalid_argument("junta search supports J <= 6");
  if (kcut < 0) throw std::invalid_argument("kcut must be nonnegative");
  bool converted = false;
  const SliceFunction f = to_sign_function(input, converted);
  const int n = f.n();
  const int k = f.k();
  check_slice_cap(n);
  const int J = std::min(junta_cap, n);
  // Feasible assignments to J coordinates on the slice.
  std::vector<Mask> patterns;
  for (Mask a = 0; a < (Mask{1} << J); ++a) {
    const int ones = popcount(a);
    if (ones <= k && J - ones <= n - k) patterns.push_back(a);
  }
  const std::size_t P = patterns.size();
  if (P >= 63 || (std::uint64_t{1} << P) > budget) {
    throw CapExceeded("junta search would try 2^" + std::to_string(P) + " truth tables, over the budget");
  }
  const std::uint64_t tables = std::uint64_t{1} << P;
  // Slice degree depends only on the table, not on which J coordinates carry it.
  std::vector<int> degree(tables);
  std::vector<int> pattern_index(std::size_t{1} << J, -1);
  for (std::size_t i = 0; i < P; ++i) pattern_index[patterns[i]] = static_cast<int>(i);
  auto table_function = [&](std::uint64_t table, const std::vector<int>& coords) {
    return SliceFunction::from_callable(n, k, [&](Mask x) {
      Mask a = 0;
      for (int t = 0; t < J; ++t) {
        if (contains(x, coords[t])) a |= Mask{1} << t;
      }
      return Rational(((table >> pattern_index[a]) & 1U) ? 1 : -1);
    });
  };
  std::vector<int> first(J);
  for (int t = 0; t < J; ++t) first[t] = t + 1;
  const auto degs = map_chunks<int>(tables, [&](std::size_t table) { return slice_degree(table_function(table, first)); });
  degree.assign(degs.begin(), degs.end());

  JuntaFit best{{}, {}, patterns, 0, Rational(-1), f, 0, converted};
  bool found = false;
  std::uint64_t best_table = 0;
  for (Mask t_mask : k_subsets(n, J)) {
    const auto coords = indices_of(t_mask);
    // Points of each sign per pattern.
    std::vector<long> plus(P, 0), minus(P, 0);
    for (const auto& [x, v] : f.values()) {
      Mask a = 0;
      for (int t = 0; t < J; ++t) {
        if (contains(x, coords[t])) a |= Mask{1} << t;
      }
      (v > 0 ? plus : minus)[pattern_index[a]]++;
    }
    for (std::uint64_t table = 0; table < tables; ++table) {
      if (degree[table] > kcut) continue;
      ++best.tables_checked;
      long wrong = 0;
      for (std::size_t i = 0; i < P; ++i) wrong += ((table >> i) & 1U) ? minus[i] : plus[i];
      const Rational dist = ratio(BigInt(4 * wrong), binomial(n, k));
      if (!found || dist < best.distance) {
        found = true;
        best.distance = dist;
        best.coordinates = coords;
        best_table = table;
      }
    }
  }
  if (!found) throw std::logic_error("no junta of the requested degree exists");
  best.degree = degree[best_table];
  best.truth_table.clear();
  for (std::size_t i = 0; i < P; ++i) best.truth_table.push_back(((best_table >> i) & 1U) ? 1 : -1);
  best.junta = table_function(best_table, best.coordinates);
  return best;
}

}  // namespace slicelab
