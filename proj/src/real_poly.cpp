#include "slicelab/real_poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace slicelab {

RealPoly RealPoly::from_exact(const MultilinearPoly& f) {
  RealPoly out(static_cast<std::size_t>(f.n()));
  for (const auto& [m, c] : f.terms()) {
    std::vector<std::uint32_t> vars;
    for (int i : indices_of(m)) vars.push_back(static_cast<std::uint32_t>(i - 1));
    out.add_term(std::move(vars), c.get_d());
  }
  return out;
}

void RealPoly::add_term(std::vector<std::uint32_t> vars, double coeff) {
  std::sort(vars.begin(), vars.end());
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
    throw std::invalid_argument("repeated variable in a multilinear term");
  }
  if (!vars.empty() && vars.back() >= n_) throw std::out_of_range("term variable beyond n");
  if (coeff == 0) return;
  terms_.push_back(RealTerm{std::move(vars), coeff});
}

int RealPoly::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.vars.size()));
  return d;
}

double RealPoly::evaluate(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("point dimension does not match n");
  double acc = 0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (auto i : t.vars) v *= x[i];
    acc += v;
  }
  return acc;
}

double RealPoly::evaluate_indicator(std::span<const std::uint8_t> x) const {
  if (x.size() != n_) throw std::invalid_argument("point dimension does not match n");
  double acc = 0;
  for (const auto& t : terms_) {
    bool on = true;
    for (auto i : t.vars) {
      if (!x[i]) {
        on = false;
        break;
      }
    }
    if (on) acc += t.coeff;
  }
  return acc;
}

bool RealPoly::is_harmonic(double tol) const {
  std::map<std::vector<std::uint32_t>, double> sum;
  double scale = 0;
  for (const auto& t : terms_) {
    scale = std::max(scale, std::abs(t.coeff));
    for (std::size_t r = 0; r < t.vars.size(); ++r) {
      std::vector<std::uint32_t> rest;
      rest.reserve(t.vars.size() - 1);
      for (std::size_t s = 0; s < t.vars.size(); ++s) {
        if (s != r) rest.push_back(t.vars[s]);
      }
      sum[rest] += t.coeff;
    }
  }
  for (const auto& [k, v] : sum) {
    if (std::abs(v) > tol * std::max(scale, 1.0)) return false;
  }
  return true;
}

std::vector<std::vector<std::size_t>> RealPoly::incidence() const {
  std::vector<std::vector<std::size_t>> out(n_);
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    for (auto i : terms_[t].vars) out[i].push_back(t);
  }
  return out;
}

RealPoly& RealPoly::operator*=(double s) {
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

}  // namespace slicelab
