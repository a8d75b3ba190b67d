#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "slicelab/ekr.hpp"
#include "slicelab/harmonic.hpp"
#include "slicelab/poly.hpp"
#include "slicelab/real_poly.hpp"

namespace slicelab {

using Json = nlohmann::ordered_json;

/// Polynomial document for any n: {"n", "terms": [{"vars": [1-based], "coeff": "num/den"}]}.
struct PolyDocument {
  int n = 0;
  std::vector<std::pair<std::vector<std::uint32_t>, Rational>> terms;  // 0-based vars

  MultilinearPoly exact() const;  // n <= 64
  RealPoly real() const;
  /// Exact check of sum_i df/dx_i = 0 on the rational coefficients.
  bool is_harmonic() const;
  int degree() const;
};

PolyDocument poly_document_from_json(const Json& j);
Json poly_to_json(const MultilinearPoly& f);
Json real_poly_to_json(const RealPoly& f);
MultilinearPoly poly_from_json(const Json& j);

/// {"n", "k", "values": [{"set": [...], "value": "num/den"}]}
Json slice_function_to_json(const SliceFunction& f);
SliceFunction slice_function_from_json(const Json& j);

/// {"n", "k", "members": [[...], ...]}
Json set_family_to_json(const SetFamily& f);
SetFamily set_family_from_json(const Json& j);

Json rational_json(const Rational& q);
Json indices_json(Mask m);
/// Reads a rational from a JSON string "a/b" or an integer.
Rational rational_from_json(const Json& j);

/// Throws std::runtime_error when the file cannot be opened, and
/// nlohmann::json::parse_error on malformed text.
Json read_json_file(const std::string& path);

}  // namespace slicelab
