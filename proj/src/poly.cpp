#include "slicelab/poly.hpp"

#include <stdexcept>
#include <string>

namespace slicelab {

namespace {

void check_index(int n, int i) {
  if (i < 1 || i > n) {
    throw std::out_of_range("variable index " + std::to_string(i) + " outside [1, " +
                            std::to_string(n) + "]");
  }
}

}  // namespace

void check_bias(const Rational& p) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("bias p must lie in (0,1), got " + to_string(p));
}

MultilinearPoly::MultilinearPoly(int n) : n_(n) {
  if (n < 0 || n > kMaxExactVars) {
    throw std::invalid_argument("exact polynomials support 0 <= n <= 64, got " + std::to_string(n));
  }
}

MultilinearPoly MultilinearPoly::constant(int n, const Rational& c) {
  MultilinearPoly f(n);
  f.add_term(0, c);
  return f;
}

MultilinearPoly MultilinearPoly::variable(int n, int i) {
  check_index(n, i);
  return monomial(n, bit_of(i));
}

MultilinearPoly MultilinearPoly::monomial(int n, Mask vars, const Rational& c) {
  MultilinearPoly f(n);
  if ((vars & ~full_mask(n)) != 0) throw std::out_of_range("monomial uses variables beyond n");
  f.add_term(vars, c);
  return f;
}

MultilinearPoly MultilinearPoly::difference(int n, int i, int j) {
  check_index(n, i);
  check_index(n, j);
  MultilinearPoly f(n);
  f.add_term(bit_of(i), 1);
  f.add_term(bit_of(j), -1);
  return f;
}

Rational MultilinearPoly::coefficient(Mask vars) const {
  auto it = terms_.find(vars);
  return it == terms_.end() ? Rational(0) : it->second;
}

void MultilinearPoly::add_term(Mask vars, const Rational& c) {
  if (c == 0) return;
  if ((vars & ~full_mask(n_)) != 0) throw std::out_of_range("term uses variables beyond n");
  auto [it, inserted] = terms_.try_emplace(vars, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int MultilinearPoly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, popcount(m));
  return d;
}

Mask MultilinearPoly::support() const {
  Mask s = 0;
  for (const auto& [m, c] : terms_) s |= m;
  return s;
}

void MultilinearPoly::check_same_n(const MultilinearPoly& o) const {
  if (n_ != o.n_) {
    throw std::invalid_argument("polynomials over different variable counts (" +
                                std::to_string(n_) + " vs " + std::to_string(o.n_) + ")");
  }
}

MultilinearPoly& MultilinearPoly::operator+=(const MultilinearPoly& o) {
  check_same_n(o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

MultilinearPoly& MultilinearPoly::operator-=(const MultilinearPoly& o) {
  check_same_n(o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

MultilinearPoly& MultilinearPoly::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

MultilinearPoly operator*(const MultilinearPoly& a, const MultilinearPoly& b) {
  a.check_same_n(b);
  MultilinearPoly out(a.n_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      if (ma & mb) throw std::domain_error("product of overlapping terms is not multilinear");
      out.add_term(ma | mb, ca * cb);
    }
  }
  return out;
}

MultilinearPoly boolean_product(const MultilinearPoly& f, const MultilinearPoly& g) {
  if (f.n() != g.n()) throw std::invalid_argument("boolean_product: variable counts differ");
  MultilinearPoly out(f.n());
  for (const auto& [ma, ca] : f.terms()) {
    for (const auto& [mb, cb] : g.terms()) out.add_term(ma | mb, ca * cb);
  }
  return out;
}

Rational evaluate(const MultilinearPoly& f, std::span<const Rational> x) {
  if (static_cast<int>(x.size()) != f.n()) {
    throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                " does not match n = " + std::to_string(f.n()));
  }
  Rational acc = 0;
  for (const auto& [m, c] : f.terms()) {
    Rational t = c;
    for (Mask r = m; r; r &= r - 1) t *= x[std::countr_zero(r)];
    acc += t;
  }
  return acc;
}

double evaluate(const MultilinearPoly& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.n()) {
    throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                " does not match n = " + std::to_string(f.n()));
  }
  double acc = 0;
  for (const auto& [m, c] : f.terms()) {
    double t = c.get_d();
    for (Mask r = m; r; r &= r - 1) t *= x[std::countr_zero(r)];
    acc += t;
  }
  return acc;
}

Rational evaluate_boolean(const MultilinearPoly& f, Mask x) {
  Rational acc = 0;
  for (const auto& [m, c] : f.terms()) {
    if ((m & ~x) == 0) acc += c;
  }
  return acc;
}

MultilinearPoly partial_derivative(const MultilinearPoly& f, int i) {
  check_index(f.n(), i);
  const Mask b = bit_of(i);
  MultilinearPoly out(f.n());
  for (const auto& [m, c] : f.terms()) {
    if (m & b) out.add_term(m & ~b, c);
  }
  return out;
}

MultilinearPoly derivative_sum(const MultilinearPoly& f) {
  MultilinearPoly out(f.n());
  for (const auto& [m, c] : f.terms()) {
    for (Mask r = m; r; r &= r - 1) out.add_term(m & ~(r & (~r + 1)), c);
  }
  return out;
}

bool is_harmonic(const MultilinearPoly& f) { return derivative_sum(f).is_zero(); }

MultilinearPoly swap_variables(const MultilinearPoly& f, int i, int j) {
  check_index(f.n(), i);
  check_index(f.n(), j);
  const Mask bi = bit_of(i);
  const Mask bj = bit_of(j);
  MultilinearPoly out(f.n());
  for (const auto& [m, c] : f.terms()) {
    Mask s = m & ~(bi | bj);
    if (m & bi) s |= bj;
    if (m & bj) s |= bi;
    out.add_term(s, c);
  }
  return out;
}

MultilinearPoly centered_monomial(int n, Mask s, const Rational& p) {
  MultilinearPoly out(n);
  const int size = popcount(s);
  for_each_submask(s, [&](Mask t) {
    Rational c = power(-p, static_cast<unsigned>(size - popcount(t)));
    out.add_term(t, c);
  });
  return out;
}

QuadExt CubeFourierExpansion::coefficient(Mask s) const {
  auto it = coeffs.find(s);
  return it == coeffs.end() ? QuadExt::rational(0, radicand()) : it->second;
}

Rational CubeFourierExpansion::parseval_sum() const {
  QuadExt acc = QuadExt::rational(0, radicand());
  for (const auto& [s, c] : coeffs) acc += c * c;
  return acc.as_rational();
}

Rational CubeFourierExpansion::weight(int d) const {
  QuadExt acc = QuadExt::rational(0, radicand());
  for (const auto& [s, c] : coeffs) {
    if (popcount(s) == d) acc += c * c;
  }
  return acc.as_rational();
}

int CubeFourierExpansion::degree() const {
  int d = 0;
  for (const auto& [s, c] : coeffs) d = std::max(d, popcount(s));
  return d;
}

CubeFourierExpansion cube_fourier(const MultilinearPoly& f, const Rational& p) {
  check_bias(p);
  // x_i = p + sigma*omega_i, so fhat(S) = sigma^{|S|} sum_{T >= S} c_T p^{|T \ S|}.
  std::map<Mask, Rational> reduced;
  for (const auto& [t, c] : f.terms()) {
    const int tsize = popcount(t);
    for_each_submask(t, [&](Mask s) {
      Rational v = c * power(p, static_cast<unsigned>(tsize - popcount(s)));
      auto [it, inserted] = reduced.try_emplace(s, v);
      if (!inserted) it->second += v;
    });
  }
  CubeFourierExpansion out;
  out.n = f.n();
  out.p = p;
  const Rational d = out.radicand();
  for (auto& [s, r] : reduced) {
    if (r == 0) continue;
    const int size = popcount(s);
    Rational scale = power(d, static_cast<unsigned>(size / 2));
    Rational v = r * scale;
    if (size % 2 == 0) {
      out.coeffs.emplace(s, QuadExt(v, 0, d));
    } else {
      out.coeffs.emplace(s, QuadExt(0, v, d));
    }
  }
  return out;
}

MultilinearPoly from_cube_fourier(const CubeFourierExpansion& e) {
  check_bias(e.p);
  const Rational d = e.radicand();
  MultilinearPoly out(e.n);
  for (const auto& [s, c] : e.coeffs) {
    const int size = popcount(s);
    Rational scalar;
    if (size % 2 == 0) {
      if (c.radical_part() != 0) throw std::domain_error("expansion has irrational monomial coefficients");
      scalar = c.rational_part() / power(d, static_cast<unsigned>(size / 2));
    } else {
      if (c.rational_part() != 0) throw std::domain_error("expansion has irrational monomial coefficients");
      scalar = c.radical_part() / power(d, static_cast<unsigned>((size - 1) / 2));
    }
    out += centered_monomial(e.n, s, e.p) * scalar;
  }
  return out;
}

MultilinearPoly homogeneous_part(const MultilinearPoly& f, int d, const DegreeMode& mode) {
  if (d < 0) throw std::invalid_argument("degree must be nonnegative");
  if (std::holds_alternative<MonomialDegree>(mode)) {
    MultilinearPoly out(f.n());
    for (const auto& [m, c] : f.terms()) {
      if (popcount(m) == d) out.add_term(m, c);
    }
    return out;
  }
  const auto& p = std::get<CharacterDegree>(mode).p;
  CubeFourierExpansion e = cube_fourier(f, p);
  std::erase_if(e.coeffs, [d](const auto& kv) { return popcount(kv.first) != d; });
  return from_cube_fourier(e);
}

}  // namespace slicelab
