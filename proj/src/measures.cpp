#include "slicelab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slicelab/errors.hpp"
#include "slicelab/parallel.hpp"

namespace slicelab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

/// Probability that m specific coordinates are all 1 under the slice(n,k).
Rational slice_moment(int n, int k, int m) {
  return ratio(falling_factorial(k, m), falling_factorial(n, m));
}

}  // namespace

MeasureSpec cube_measure(const Rational& p) {
  check_bias(p);
  return CubeMeasure{p};
}

MeasureSpec slice_measure(int n, int k) {
  if (n < 1 || k < 0 || k > n) {
    throw std::invalid_argument("slice needs n >= 1 and 0 <= k <= n, got n=" + std::to_string(n) +
                                " k=" + std::to_string(k));
  }
  return SliceMeasure{n, k};
}

MeasureSpec gaussian_measure(const Rational& p) {
  check_bias(p);
  return GaussianMeasure{p};
}

MeasureSpec gaussian_slice_measure(const Rational& p, double q) {
  check_bias(p);
  if (!std::isfinite(q)) throw std::invalid_argument("gaussian-slice q must be finite");
  return GaussianSliceMeasure{p, q};
}

MeasureSpec parse_measure(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw std::invalid_argument("empty measure description");
  const auto& kind = parts[0];
  if (kind == "cube" && parts.size() == 2) return cube_measure(parse_rational(parts[1]));
  if (kind == "slice" && parts.size() == 3) return slice_measure(parse_int(parts[1]), parse_int(parts[2]));
  if (kind == "gaussian" && parts.size() == 2) return gaussian_measure(parse_rational(parts[1]));
  if (kind == "gaussian-slice" && parts.size() == 3) {
    return gaussian_slice_measure(parse_rational(parts[1]), to_double(parse_rational(parts[2])));
  }
  throw std::invalid_argument("unrecognised measure '" + text +
                              "' (expected cube:P, slice:N:K, gaussian:P or gaussian-slice:P:Q)");
}

std::string describe(const MeasureSpec& m) {
  return std::visit(
      overloaded{
          [](const CubeMeasure& c) { return "cube:" + to_string(c.p); },
          [](const SliceMeasure& s) { return "slice:" + std::to_string(s.n) + ":" + std::to_string(s.k); },
          [](const GaussianMeasure& g) { return "gaussian:" + to_string(g.p); },
          [](const GaussianSliceMeasure& g) {
            std::ostringstream os;
            os.precision(17);
            os << "gaussian-slice:" << to_string(g.p) << ":" << g.q;
            return os.str();
          },
      },
      m);
}

void check_slice_cap(int n) {
  if (n > kExactSliceCap) {
    throw CapExceeded("exact slice enumeration is limited to n <= " + std::to_string(kExactSliceCap) +
                      ", got n = " + std::to_string(n));
  }
}

Rational expectation(const MultilinearPoly& f, const MeasureSpec& m) {
  return std::visit(
      overloaded{
          [&](const CubeMeasure& c) {
            Rational acc = 0;
            for (const auto& [s, coeff] : f.terms()) acc += coeff * power(c.p, popcount(s));
            return acc;
          },
          [&](const GaussianMeasure& g) {
            Rational acc = 0;
            for (const auto& [s, coeff] : f.terms()) acc += coeff * power(g.p, popcount(s));
            return acc;
          },
          [&](const SliceMeasure& sl) {
            if (f.n() != sl.n) {
              throw std::invalid_argument("polynomial has n = " + std::to_string(f.n()) +
                                          " but the slice has n = " + std::to_string(sl.n));
            }
            Rational acc = 0;
            for (const auto& [s, coeff] : f.terms()) acc += coeff * slice_moment(sl.n, sl.k, popcount(s));
            return acc;
          },
          [&](const GaussianSliceMeasure&) -> Rational {
            throw std::invalid_argument("gaussian-slice expectations are Monte Carlo only");
          },
      },
      m);
}

Rational inner_product(const MultilinearPoly& f, const MultilinearPoly& g, const MeasureSpec& m) {
  return expectation(boolean_product(f, g), m);
}

Rational norm_sq(const MultilinearPoly& f, const MeasureSpec& m) { return inner_product(f, f, m); }

Rational variance(const MultilinearPoly& f, const MeasureSpec& m) {
  const Rational e = expectation(f, m);
  return norm_sq(f, m) - e * e;
}

Rational enumerate_expectation(const std::function<Rational(Mask)>& f, const MeasureSpec& m, int n) {
  if (const auto* c = std::get_if<CubeMeasure>(&m)) {
    if (n > 22) throw CapExceeded("cube enumeration is limited to n <= 22");
    const Rational q = 1 - c->p;
    std::vector<Rational> weight(n + 1);
    for (int w = 0; w <= n; ++w) weight[w] = power(c->p, w) * power(q, n - w);
    Rational acc = 0;
    for (Mask x = 0; x < (Mask{1} << n); ++x) acc += weight[popcount(x)] * f(x);
    return acc;
  }
  if (const auto* s = std::get_if<SliceMeasure>(&m)) {
    if (s->n != n) throw std::invalid_argument("slice dimension mismatch");
    check_slice_cap(n);
    Rational acc = 0;
    for (Mask x : k_subsets(n, s->k)) acc += f(x);
    return acc / Rational(binomial(n, s->k));
  }
  throw std::invalid_argument("enumeration is defined for cube and slice measures only");
}

SliceSampler::SliceSampler(int n, int k) : n_(n), k_(k), perm_(n), x_(n, 0) {
  if (n < 1 || k < 0 || k > n) throw std::invalid_argument("invalid slice parameters");
  for (int i = 0; i < n; ++i) perm_[i] = static_cast<std::uint32_t>(i);
  for (int i = 0; i < k; ++i) x_[i] = 1;
}

const std::vector<std::uint8_t>& SliceSampler::draw(Rng& rng) {
  // Partial Fisher-Yates on a persistent permutation: the first k entries
  // after the shuffle are a uniform k-subset whatever the starting order.
  // When k > n/2 the complement (last n-k entries) is shuffled instead.
  const bool ones = k_ <= n_ - k_;
  const int m = ones ? k_ : n_ - k_;
  const std::uint8_t chosen = ones ? 1 : 0;
  std::fill(x_.begin(), x_.end(), static_cast<std::uint8_t>(1 - chosen));
  for (int i = 0; i < m; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_ - i)));
    std::swap(perm_[i], perm_[j]);
    x_[perm_[i]] = chosen;
  }
  return x_;
}

void sample_into(const MeasureSpec& m, Rng& rng, std::span<double> out) {
  const int n = static_cast<int>(out.size());
  std::visit(overloaded{
                 [&](const CubeMeasure& c) {
                   const double p = to_double(c.p);
                   for (auto& v : out) v = rng.bernoulli(p) ? 1.0 : 0.0;
                 },
                 [&](const SliceMeasure& s) {
                   if (s.n != n) throw std::invalid_argument("slice sample dimension mismatch");
                   std::fill(out.begin(), out.end(), 0.0);
                   std::vector<std::uint32_t> perm(n);
                   for (int i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
                   for (int i = 0; i < s.k; ++i) {
                     const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
                     std::swap(perm[i], perm[j]);
                     out[perm[i]] = 1.0;
                   }
                 },
                 [&](const GaussianMeasure& g) {
                   const double p = to_double(g.p);
                   const double sd = std::sqrt(p * (1 - p));
                   for (auto& v : out) v = p + sd * rng.normal();
                 },
                 [&](const GaussianSliceMeasure& g) {
                   const double p = to_double(g.p);
                   const double sd = std::sqrt(p * (1 - p));
                   double sum = 0;
                   for (auto& v : out) {
                     v = p + sd * rng.normal();
                     sum += v;
                   }
                   const double shift = sum / n - g.q;
                   for (auto& v : out) v -= shift;
                 },
             },
             m);
}

std::vector<double> sample(const MeasureSpec& m, int n, Rng& rng) {
  std::vector<double> out(n);
  sample_into(m, rng, out);
  return out;
}

namespace {

/// Runs g on `count` samples drawn from stream `stream`, feeding each value
/// to sink. Slice draws reuse one SliceSampler per chunk.
template <class Sink>
void run_chunk(const MeasureSpec& m, int n, std::uint64_t count, std::uint64_t seed, std::uint64_t stream,
               const std::function<double(std::span<const double>)>& g, Sink&& sink) {
  Rng rng(seed, stream);
  std::vector<double> x(n);
  if (const auto* s = std::get_if<SliceMeasure>(&m)) {
    if (s->n != n) throw std::invalid_argument("slice sample dimension mismatch");
    SliceSampler sampler(n, s->k);
    for (std::uint64_t t = 0; t < count; ++t) {
      const auto& ind = sampler.draw(rng);
      for (int i = 0; i < n; ++i) x[i] = ind[i];
      sink(g(x));
    }
    return;
  }
  for (std::uint64_t t = 0; t < count; ++t) {
    sample_into(m, rng, x);
    sink(g(x));
  }
}

struct Moments {
  double sum = 0;
  double sum_sq = 0;
};

}  // namespace

Estimate monte_carlo_mean(const MeasureSpec& m, int n, std::uint64_t samples, std::uint64_t seed,
                          const std::function<double(std::span<const double>)>& g, std::uint64_t chunk_size,
                          bool parallel) {
  if (samples == 0) throw std::invalid_argument("sample count must be positive");
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be positive");
  const std::size_t chunks = chunk_count(samples, chunk_size);
  auto body = [&](std::size_t c) {
    const std::uint64_t begin = c * chunk_size;
    const std::uint64_t count = std::min<std::uint64_t>(chunk_size, samples - begin);
    Moments mo;
    run_chunk(m, n, count, seed, c, g, [&](double v) {
      mo.sum += v;
      mo.sum_sq += v * v;
    });
    return mo;
  };
  const auto parts = parallel ? map_chunks<Moments>(chunks, body) : map_chunks_serial<Moments>(chunks, body);
  Moments total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double N = static_cast<double>(samples);
  const double mean = total.sum / N;
  const double var = samples > 1 ? std::max(0.0, (total.sum_sq - N * mean * mean) / (N - 1)) : 0.0;
  return Estimate{mean, std::sqrt(var / N), samples, seed};
}

std::vector<double> monte_carlo_values(const MeasureSpec& m, int n, std::uint64_t samples, std::uint64_t seed,
                                       const std::function<double(std::span<const double>)>& g,
                                       std::uint64_t chunk_size, bool parallel) {
  if (samples == 0) throw std::invalid_argument("sample count must be positive");
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be positive");
  std::vector<double> out(samples);
  const std::size_t chunks = chunk_count(samples, chunk_size);
  auto body = [&](std::size_t c) {
    const std::uint64_t begin = c * chunk_size;
    const std::uint64_t count = std::min<std::uint64_t>(chunk_size, samples - begin);
    std::uint64_t pos = begin;
    run_chunk(m, n, count, seed, c, g, [&](double v) { out[pos++] = v; });
    return 0;
  };
  if (parallel) {
    map_chunks<int>(chunks, body);
  } else {
    map_chunks_serial<int>(chunks, body);
  }
  return out;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values, std::uint64_t seed)
    : values_(std::move(values)), seed_(seed) {
  if (values_.empty()) throw std::invalid_argument("empirical distribution needs at least one value");
  for (double v : values_) {
    if (std::isnan(v)) throw std::invalid_argument("empirical distribution contains NaN");
  }
  std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::cdf_left(double x) const {
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

namespace {

constexpr double kLevyTolerance = 1e-6;

/// For every distinct value v of `a`, checks A(v) - eps <= B(v + eps), with
/// A and B right-continuous ECDFs. One merge sweep.
bool shifted_dominates(const std::vector<double>& a, const std::vector<double>& b, double eps) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.size();) {
    std::size_t last = i;
    while (last + 1 < a.size() && a[last + 1] == a[i]) ++last;
    const double fa = static_cast<double>(last + 1) / na;
    const double x = a[i] + eps;
    while (j < b.size() && b[j] <= x) ++j;
    if (fa - eps > static_cast<double>(j) / nb + 1e-15) return false;
    i = last + 1;
  }
  return true;
}

template <class Check>
double bisect_levy(Check&& ok) {
  double lo = 0, hi = 1;
  if (ok(0.0)) return 0.0;
  while (hi - lo > kLevyTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

double levy_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto& va = a.values();
  const auto& vb = b.values();
  return bisect_levy([&](double eps) { return shifted_dominates(va, vb, eps) && shifted_dominates(vb, va, eps); });
}

double levy_distance(const EmpiricalDistribution& a, const ExactCdf& g) {
  const auto& v = a.values();
  const double na = static_cast<double>(v.size());
  auto ok = [&](double eps) {
    for (std::size_t i = 0; i < v.size();) {
      std::size_t last = i;
      while (last + 1 < v.size() && v[last + 1] == v[i]) ++last;
      const double right = static_cast<double>(last + 1) / na;
      const double left = static_cast<double>(i) / na;
      if (right - eps > g(v[i] + eps) + 1e-15) return false;
      if (g(v[i] - eps) > left + eps + 1e-15) return false;
      i = last + 1;
    }
    return true;
  };
  return bisect_levy(ok);
}

double cdf_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto& va = a.values();
  const auto& vb = b.values();
  const double na = static_cast<double>(va.size());
  const double nb = static_cast<double>(vb.size());
  std::size_t i = 0, j = 0;
  double best = 0;
  while (i < va.size() || j < vb.size()) {
    double x;
    if (j == vb.size() || (i < va.size() && va[i] <= vb[j])) {
      x = va[i];
    } else {
      x = vb[j];
    }
    while (i < va.size() && va[i] <= x) ++i;
    while (j < vb.size() && vb[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

double cdf_distance(const EmpiricalDistribution& a, const ExactCdf& g) {
  const auto& v = a.values();
  const double na = static_cast<double>(v.size());
  double best = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t last = i;
    while (last + 1 < v.size() && v[last + 1] == v[i]) ++last;
    const double gx = g(v[i]);
    best = std::max(best, std::abs(static_cast<double>(last + 1) / na - gx));
    best = std::max(best, std::abs(static_cast<double>(i) / na - gx));
    i = last + 1;
  }
  return best;
}

double dkw_radius(std::size_t count, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(count)));
}

JuntaCloseness junta_event_closeness(const std::vector<Mask>& event, int J, int n, const Rational& p) {
  check_bias(p);
  if (J < 0 || J > kMaxExactVars) throw std::invalid_argument("junta size out of range");
  if (static_cast<long>(J) * J > n) {
    throw std::invalid_argument("junta closeness needs J^2 <= n, got J=" + std::to_string(J) +
                                " n=" + std::to_string(n));
  }
  const Rational kq = p * n;
  if (kq.get_den() != 1) throw std::invalid_argument("pn must be an integer");
  const long k = kq.get_num().get_si();
  std::vector<Mask> sorted = event;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("event lists an assignment twice");
  }
  JuntaCloseness out;
  out.slice_probability = 0;
  out.cube_probability = 0;
  const BigInt denom = falling_factorial(n, J);
  for (Mask a : sorted) {
    if ((a & ~full_mask(J)) != 0) throw std::invalid_argument("event assignment uses more than J coordinates");
    const int w = popcount(a);
    out.slice_probability += ratio(falling_factorial(k, w) * falling_factorial(n - k, J - w), denom);
    out.cube_probability += power(p, w) * power(1 - p, J - w);
  }
  out.bound = Rational(J * J) / (4 * p * (1 - p) * n) * out.cube_probability;
  Rational diff = out.slice_probability - out.cube_probability;
  if (diff < 0) diff = -diff;
  out.holds = diff <= out.bound;
  return out;
}

}  // namespace slicelab
