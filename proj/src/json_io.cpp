#include "slicelab/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace slicelab {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw std::invalid_argument(std::string("missing field '") + name + "'");
  return j.at(name);
}

int int_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) throw std::invalid_argument(std::string("field '") + name + "' must be an integer");
  return v.get<int>();
}

std::vector<int> index_list(const Json& j, int n) {
  if (!j.is_array()) throw std::invalid_argument("index list must be an array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw std::invalid_argument("indices must be integers");
    const int i = v.get<int>();
    if (i < 1 || i > n) throw std::invalid_argument("index " + std::to_string(i) + " outside [1, " + std::to_string(n) + "]");
    out.push_back(i);
  }
  std::vector<int> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("repeated index in a set");
  }
  return sorted;
}

Mask mask_from_json(const Json& j, int n) {
  if (n > kMaxExactVars) throw std::invalid_argument("exact sets support n <= 64");
  return mask_of(index_list(j, n));
}

}  // namespace

Json rational_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(BigInt(std::to_string(j.get<long long>())));
  throw std::invalid_argument("exact values must be \"num/den\" strings or integers");
}

Json indices_json(Mask m) {
  Json a = Json::array();
  for (int i : indices_of(m)) a.push_back(i);
  return a;
}

MultilinearPoly PolyDocument::exact() const {
  if (n > kMaxExactVars) throw std::invalid_argument("exact polynomials support n <= 64");
  MultilinearPoly f(n);
  for (const auto& [vars, c] : terms) {
    Mask m = 0;
    for (auto v : vars) m |= bit_of(static_cast<int>(v) + 1);
    f.add_term(m, c);
  }
  return f;
}

RealPoly PolyDocument::real() const {
  RealPoly f(static_cast<std::size_t>(n));
  std::map<std::vector<std::uint32_t>, Rational> merged;
  for (const auto& [vars, c] : terms) merged[vars] += c;
  for (const auto& [vars, c] : merged) {
    if (c != 0) f.add_term(vars, c.get_d());
  }
  return f;
}

bool PolyDocument::is_harmonic() const {
  std::map<std::vector<std::uint32_t>, Rational> merged;
  for (const auto& [vars, c] : terms) merged[vars] += c;
  std::map<std::vector<std::uint32_t>, Rational> deriv;
  for (const auto& [vars, c] : merged) {
    if (c == 0) continue;
    for (std::size_t r = 0; r < vars.size(); ++r) {
      std::vector<std::uint32_t> rest;
      for (std::size_t s = 0; s < vars.size(); ++s) {
        if (s != r) rest.push_back(vars[s]);
      }
      deriv[rest] += c;
    }
  }
  return std::all_of(deriv.begin(), deriv.end(), [](const auto& kv) { return kv.second == 0; });
}

int PolyDocument::degree() const {
  std::map<std::vector<std::uint32_t>, Rational> merged;
  for (const auto& [vars, c] : terms) merged[vars] += c;
  int d = 0;
  for (const auto& [vars, c] : merged) {
    if (c != 0) d = std::max(d, static_cast<int>(vars.size()));
  }
  return d;
}

PolyDocument poly_document_from_json(const Json& j) {
  PolyDocument doc;
  doc.n = int_field(j, "n");
  if (doc.n < 0) throw std::invalid_argument("n must be nonnegative");
  const Json& terms = field(j, "terms");
  if (!terms.is_array()) throw std::invalid_argument("'terms' must be an array");
  for (const auto& t : terms) {
    const auto idx = index_list(field(t, "vars"), doc.n);
    std::vector<std::uint32_t> vars;
    for (int i : idx) vars.push_back(static_cast<std::uint32_t>(i - 1));
    doc.terms.emplace_back(std::move(vars), rational_from_json(field(t, "coeff")));
  }
  return doc;
}

MultilinearPoly poly_from_json(const Json& j) { return poly_document_from_json(j).exact(); }

Json poly_to_json(const MultilinearPoly& f) {
  Json out;
  out["n"] = f.n();
  Json terms = Json::array();
  // Order terms by degree, then by sorted index list.
  std::vector<std::pair<std::vector<int>, Rational>> sorted;
  for (const auto& [m, c] : f.terms()) sorted.emplace_back(indices_of(m), c);
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  for (const auto& [vars, c] : sorted) {
    Json t;
    t["vars"] = vars;
    t["coeff"] = rational_json(c);
    terms.push_back(t);
  }
  out["terms"] = terms;
  return out;
}

Json real_poly_to_json(const RealPoly& f) {
  Json out;
  out["n"] = f.n();
  Json terms = Json::array();
  std::vector<RealTerm> sorted = f.terms();
  std::sort(sorted.begin(), sorted.end(), [](const RealTerm& a, const RealTerm& b) {
    if (a.vars.size() != b.vars.size()) return a.vars.size() < b.vars.size();
    return a.vars < b.vars;
  });
  for (const auto& t : sorted) {
    Json e;
    Json vars = Json::array();
    for (auto v : t.vars) vars.push_back(v + 1);
    e["vars"] = vars;
    e["coeff"] = t.coeff;
    terms.push_back(e);
  }
  out["terms"] = terms;
  return out;
}

Json slice_function_to_json(const SliceFunction& f) {
  Json out;
  out["n"] = f.n();
  out["k"] = f.k();
  Json values = Json::array();
  for (const auto& [x, v] : f.values()) {
    Json e;
    e["set"] = indices_json(x);
    e["value"] = rational_json(v);
    values.push_back(e);
  }
  out["values"] = values;
  return out;
}

SliceFunction slice_function_from_json(const Json& j) {
  const int n = int_field(j, "n");
  const int k = int_field(j, "k");
  if (n < 1 || n > kMaxExactVars) throw std::invalid_argument("slice functions support 1 <= n <= 64");
  const Json& values = field(j, "values");
  if (!values.is_array()) throw std::invalid_argument("'values' must be an array");
  std::map<Mask, Rational> out;
  for (const auto& e : values) {
    const Mask x = mask_from_json(field(e, "set"), n);
    if (!out.emplace(x, rational_from_json(field(e, "value"))).second) {
      throw std::invalid_argument("slice point listed twice");
    }
  }
  return SliceFunction(n, k, std::move(out));
}

Json set_family_to_json(const SetFamily& f) {
  Json out;
  out["n"] = f.n();
  out["k"] = f.k();
  Json members = Json::array();
  std::vector<std::vector<int>> sorted;
  for (Mask m : f.members()) sorted.push_back(indices_of(m));
  std::sort(sorted.begin(), sorted.end());
  for (const auto& s : sorted) members.push_back(s);
  out["members"] = members;
  return out;
}

SetFamily set_family_from_json(const Json& j) {
  const int n = int_field(j, "n");
  const int k = int_field(j, "k");
  if (n < 1 || n > kMaxExactVars) throw std::invalid_argument("set families support 1 <= n <= 64");
  SetFamily f(n, k);
  const Json& members = field(j, "members");
  if (!members.is_array()) throw std::invalid_argument("'members' must be an array");
  for (const auto& m : members) {
    const Mask s = mask_from_json(m, n);
    if (f.contains(s)) throw std::invalid_argument("family lists a member twice");
    f.insert(s);
  }
  return f;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return Json::parse(in);
}

}  // namespace slicelab
