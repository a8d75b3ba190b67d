#include "slicelab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <list>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "slicelab/ekr.hpp"
#include "slicelab/errors.hpp"
#include "slicelab/harmonic.hpp"
#include "slicelab/lab.hpp"
#include "slicelab/measures.hpp"
#include "slicelab/noise.hpp"
#include "slicelab/rng.hpp"

namespace slicelab::cli {

const std::string& RunConfig::get(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw UsageError("missing required flag --" + key);
  return it->second;
}

// ---------------------------------------------------------------- numbers

Rational parse_number(const std::string& text) {
  if (text.find('/') != std::string::npos || text.find('.') == std::string::npos) {
    try {
      return parse_rational(text);
    } catch (const std::invalid_argument&) {
      throw InputError("not a number: '" + text + "'");
    }
  }
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  const auto dot = s.find('.');
  const std::string whole = s.substr(0, dot);
  const std::string frac = s.substr(dot + 1);
  const auto digits = [](const std::string& d) {
    return std::all_of(d.begin(), d.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac)) {
    throw InputError("not a number: '" + text + "'");
  }
  BigInt num((whole.empty() ? "0" : whole) + frac, 10);
  BigInt den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  Rational q = ratio(num, den);
  return negative ? Rational(-q) : q;
}

namespace {

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InputError("flag --" + key + " expects an integer, got '" + text + "'");
  }
  return v;
}

int get_int(const RunConfig& c, const std::string& key) {
  const long long v = parse_integer(key, c.get(key));
  if (v < -1000000000LL || v > 1000000000LL) throw InputError("flag --" + key + " is out of range");
  return static_cast<int>(v);
}

int get_int_or(const RunConfig& c, const std::string& key, int fallback) {
  return c.has(key) ? get_int(c, key) : fallback;
}

std::uint64_t get_count_or(const RunConfig& c, const std::string& key, std::uint64_t fallback) {
  if (!c.has(key)) return fallback;
  const long long v = parse_integer(key, c.get(key));
  if (v < 0) throw InputError("flag --" + key + " must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

Rational get_number(const RunConfig& c, const std::string& key) { return parse_number(c.get(key)); }

double get_double(const RunConfig& c, const std::string& key) { return to_double(get_number(c, key)); }

// ---------------------------------------------------------------- inputs

Json load_json(const std::string& path) {
  try {
    return read_json_file(path);
  } catch (const Json::exception& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

template <class F>
auto convert(const std::string& path, F&& f) {
  try {
    return f(load_json(path));
  } catch (const Json::exception& e) {
    throw InputError("invalid document '" + path + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError("invalid document '" + path + "': " + e.what());
  } catch (const std::out_of_range& e) {
    throw InputError("invalid document '" + path + "': " + e.what());
  }
}

PolyDocument load_poly_document(const RunConfig& c) {
  return convert(c.get("poly"), [](const Json& j) { return poly_document_from_json(j); });
}

MultilinearPoly load_poly(const RunConfig& c) {
  return convert(c.get("poly"), [](const Json& j) { return poly_from_json(j); });
}

SliceFunction load_slice_function(const std::string& path) {
  return convert(path, [](const Json& j) { return slice_function_from_json(j); });
}

SetFamily load_family(const std::string& path) {
  return convert(path, [](const Json& j) { return set_family_from_json(j); });
}

/// --slice-function F, or --poly F with --k K.
SliceFunction load_slice_input(const RunConfig& c) {
  if (c.has("slice-function")) return load_slice_function(c.get("slice-function"));
  if (c.has("poly")) {
    if (!c.has("k")) throw UsageError("--poly needs --k to define the slice");
    return SliceFunction::from_poly(load_poly(c), get_int(c, "k"));
  }
  throw UsageError("need --slice-function or --poly with --k");
}

MeasureSpec get_measure(const RunConfig& c) {
  try {
    return parse_measure(c.get("measure"));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

std::string join_indices(const std::vector<int>& v) {
  std::string out;
  for (int i : v) {
    if (!out.empty()) out += ' ';
    out += std::to_string(i);
  }
  return out;
}

Json estimate_json(const Estimate& e) {
  Json j;
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  j["samples"] = e.samples;
  j["seed"] = e.seed;
  return j;
}

Json rationals_json(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

Report start(const RunConfig& c) {
  Report r;
  r.doc["command"] = c.subcommand;
  r.doc["seed"] = c.seed;
  return r;
}

void poly_table(Report& r, const MultilinearPoly& f, std::uint64_t seed) {
  r.has_table = true;
  r.table.columns = {"seed", "vars", "coeff"};
  for (const auto& t : poly_to_json(f)["terms"]) {
    std::vector<int> vars = t["vars"].get<std::vector<int>>();
    r.table.rows.push_back({seed, join_indices(vars), t["coeff"]});
  }
}

void real_poly_table(Report& r, const Json& poly, std::uint64_t seed) {
  r.has_table = true;
  r.table.columns = {"seed", "vars", "coeff"};
  for (const auto& t : poly["terms"]) {
    std::vector<int> vars = t["vars"].get<std::vector<int>>();
    r.table.rows.push_back({seed, join_indices(vars), t["coeff"]});
  }
}

// ---------------------------------------------------------------- commands

Report cmd_decompose(const RunConfig& c) {
  Report r = start(c);
  const bool from_table = c.has("slice-function");
  std::optional<MeasureSpec> m;
  if (c.has("measure")) m = get_measure(c);
  if (!from_table && !m) throw UsageError("decompose needs --measure (or --slice-function)");
  const bool slice = from_table || std::holds_alternative<SliceMeasure>(*m);
  if (slice) {
    SliceFunction f = from_table ? load_slice_function(c.get("slice-function")) : [&] {
      const auto& s = std::get<SliceMeasure>(*m);
      const MultilinearPoly p = load_poly(c);
      if (p.n() != s.n) throw InputError("polynomial has n = " + std::to_string(p.n()) + " but the slice has n = " + std::to_string(s.n));
      return SliceFunction::from_poly(p, s.k);
    }();
    const HarmonicExpansion e = harmonic_expansion(f);
    r.doc["measure"] = describe(slice_measure(f.n(), f.k()));
    r.doc["n"] = f.n();
    r.doc["k"] = f.k();
    r.doc["basis"] = "chi_B";
    Json coeffs = Json::array();
    r.has_table = true;
    r.table.columns = {"seed", "top_set", "coeff"};
    for (const auto& [b, q] : e.coeffs) {
      if (q == 0) continue;
      Json t;
      t["top_set"] = b.indices();
      t["coeff"] = to_string(q);
      coeffs.push_back(t);
      r.table.rows.push_back({c.seed, join_indices(b.indices()), to_string(q)});
    }
    r.doc["coefficients"] = coeffs;
    r.doc["degree_weights"] = rationals_json(e.degree_weights());
    r.doc["degree"] = e.degree();
    return r;
  }
  if (std::holds_alternative<GaussianSliceMeasure>(*m)) {
    throw InputError("decompose supports cube, gaussian and slice measures");
  }
  const Rational p = std::holds_alternative<CubeMeasure>(*m) ? std::get<CubeMeasure>(*m).p : std::get<GaussianMeasure>(*m).p;
  const MultilinearPoly f = load_poly(c);
  const CubeFourierExpansion e = cube_fourier(f, p);
  r.doc["measure"] = describe(*m);
  r.doc["n"] = f.n();
  r.doc["basis"] = "omega_S";
  r.doc["radicand"] = to_string(e.radicand());
  std::vector<std::pair<std::vector<int>, QuadExt>> sorted;
  for (const auto& [s, q] : e.coeffs) sorted.emplace_back(indices_of(s), q);
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  Json coeffs = Json::array();
  r.has_table = true;
  r.table.columns = {"seed", "set", "rational", "radical"};
  for (const auto& [s, q] : sorted) {
    Json t;
    t["set"] = s;
    t["rational"] = to_string(q.rational_part());
    t["radical"] = to_string(q.radical_part());
    coeffs.push_back(t);
    r.table.rows.push_back({c.seed, join_indices(s), to_string(q.rational_part()), to_string(q.radical_part())});
  }
  r.doc["coefficients"] = coeffs;
  std::vector<Rational> weights;
  for (int d = 0; d <= e.degree(); ++d) weights.push_back(e.weight(d));
  r.doc["degree_weights"] = rationals_json(weights);
  r.doc["parseval"] = to_string(e.parseval_sum());
  r.doc["norm_sq"] = to_string(norm_sq(f, *m));
  return r;
}

Report cmd_project(const RunConfig& c) {
  Report r = start(c);
  const SliceFunction f = load_slice_input(c);
  const MultilinearPoly h = harmonic_projection(f);
  for (const auto& [x, v] : f.values()) {
    if (evaluate_boolean(h, x) != v) throw AssertionFailure("projection does not reproduce the input on the slice");
  }
  r.doc["n"] = f.n();
  r.doc["k"] = f.k();
  r.doc["degree"] = h.degree();
  r.doc["harmonic"] = is_harmonic(h);
  r.doc["polynomial"] = poly_to_json(h);
  poly_table(r, h, c.seed);
  return r;
}

std::vector<Mask> parse_event(const std::string& text, int J) {
  std::vector<Mask> out;
  std::set<Mask> seen;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (static_cast<int>(item.size()) != J) throw InputError("event pattern '" + item + "' must have J characters");
    Mask m = 0;
    for (int t = 0; t < J; ++t) {
      if (item[t] == '1') {
        m |= Mask{1} << t;
      } else if (item[t] != '0') {
        throw InputError("event patterns are 0/1 strings");
      }
    }
    if (seen.insert(m).second) out.push_back(m);
  }
  return out;
}

Report cmd_norms(const RunConfig& c) {
  Report r = start(c);
  if (c.has("chi-d")) {
    const MeasureSpec m = get_measure(c);
    const int d = get_int(c, "chi-d");
    r.doc["measure"] = describe(m);
    r.doc["d"] = d;
    r.doc["chi_d_norm_sq"] = to_string(chi_d_norm_sq(m, d));
    return r;
  }
  if (c.has("event")) {
    const int J = get_int(c, "J");
    const int n = get_int(c, "n");
    const Rational p = get_number(c, "p");
    if (J < 1 || J > 20) throw InputError("--J must lie in [1, 20]");
    const auto event = parse_event(c.get("event"), J);
    const JuntaCloseness j = junta_event_closeness(event, J, n, p);
    r.doc["n"] = n;
    r.doc["J"] = J;
    r.doc["p"] = to_string(p);
    Json ev = Json::array();
    for (Mask m : event) {
      std::string s;
      for (int t = 0; t < J; ++t) s += (m >> t) & 1 ? '1' : '0';
      ev.push_back(s);
    }
    r.doc["event"] = ev;
    r.doc["slice_probability"] = to_string(j.slice_probability);
    r.doc["cube_probability"] = to_string(j.cube_probability);
    r.doc["difference"] = to_string(abs(Rational(j.slice_probability - j.cube_probability)));
    r.doc["bound"] = to_string(j.bound);
    r.doc["holds"] = j.holds;
    if (!j.holds) {
      r.holds = false;
      r.failure = "junta closeness bound violated";
    }
    return r;
  }
  if (c.has("poly")) {
    const MeasureSpec m = get_measure(c);
    const MultilinearPoly f = load_poly(c);
    r.doc["measure"] = describe(m);
    r.doc["n"] = f.n();
    r.doc["expectation"] = to_string(expectation(f, m));
    r.doc["norm_sq"] = to_string(norm_sq(f, m));
    r.doc["variance"] = to_string(variance(f, m));
    return r;
  }
  throw UsageError("norms needs --chi-d, --poly or --event");
}

Report cmd_influence(const RunConfig& c) {
  Report r = start(c);
  const MeasureSpec m = get_measure(c);
  r.doc["measure"] = describe(m);
  r.has_table = true;
  r.table.columns = {"seed", "i", "influence"};
  if (const auto* cube = std::get_if<CubeMeasure>(&m)) {
    const MultilinearPoly f = load_poly(c);
    r.doc["n"] = f.n();
    r.doc["method"] = "exact";
    Json rows = Json::array();
    std::vector<int> which;
    if (c.has("i")) {
      which.push_back(get_int(c, "i"));
    } else {
      for (int i = 1; i <= f.n(); ++i) which.push_back(i);
    }
    for (int i : which) {
      if (i < 1 || i > f.n()) throw InputError("--i outside [1, n]");
      const std::string v = to_string(cube_influence(f, cube->p, i));
      rows.push_back(Json{{"i", i}, {"influence", v}});
      r.table.rows.push_back({c.seed, i, v});
    }
    r.doc["influences"] = rows;
    r.doc["total"] = to_string(total_cube_influence(f, cube->p));
    return r;
  }
  const auto* s = std::get_if<SliceMeasure>(&m);
  if (!s) throw InputError("influence supports cube and slice measures");
  r.doc["n"] = s->n;
  r.doc["k"] = s->k;
  if (s->n <= kExactSliceCap) {
    const SliceFunction f = c.has("slice-function") ? load_slice_function(c.get("slice-function"))
                                                    : SliceFunction::from_poly(load_poly(c), s->k);
    if (f.n() != s->n || f.k() != s->k) throw InputError("input does not live on the requested slice");
    r.doc["method"] = "exact";
    Json rows = Json::array();
    if (c.has("i") && c.has("j")) {
      const int i = get_int(c, "i");
      const int j = get_int(c, "j");
      const std::string v = to_string(slice_influence_pair(f, i, j));
      r.doc["j"] = j;
      rows.push_back(Json{{"i", i}, {"influence", v}});
      r.table.rows.push_back({c.seed, i, v});
      r.doc["pair_influence"] = rows;
      return r;
    }
    std::vector<int> which;
    if (c.has("i")) {
      which.push_back(get_int(c, "i"));
    } else {
      for (int i = 1; i <= f.n(); ++i) which.push_back(i);
    }
    for (int i : which) {
      const std::string v = to_string(slice_influence(f, i));
      rows.push_back(Json{{"i", i}, {"influence", v}});
      r.table.rows.push_back({c.seed, i, v});
    }
    r.doc["influences"] = rows;
    r.doc["total"] = to_string(total_slice_influence(f));
    return r;
  }
  const PolyDocument doc = load_poly_document(c);
  if (doc.n != s->n) throw InputError("polynomial and slice dimensions differ");
  const RealPoly f = doc.real();
  const bool linear = f.degree() <= 1;
  const std::uint64_t samples = c.samples ? c.samples : 10000;
  r.doc["method"] = linear ? "closed-form-linear" : "sampled-pairs";
  if (!linear) r.doc["samples"] = samples;
  Json rows = Json::array();
  std::vector<int> which;
  if (c.has("i")) {
    which.push_back(get_int(c, "i"));
  } else {
    for (int i = 1; i <= s->n; ++i) which.push_back(i);
  }
  for (int i : which) {
    if (i < 1 || i > s->n) throw InputError("--i outside [1, n]");
    const auto idx = static_cast<std::size_t>(i - 1);
    if (linear) {
      const double v = linear_slice_influence(f, s->k, idx);
      rows.push_back(Json{{"i", i}, {"influence", v}});
      r.table.rows.push_back({c.seed, i, v});
    } else {
      const Estimate e = sampled_slice_influence(f, s->k, idx, samples, derive_seed(c.seed, static_cast<std::uint64_t>(i)));
      rows.push_back(Json{{"i", i}, {"influence", e.value}, {"std_error", e.std_error}});
      r.table.rows.push_back({c.seed, i, e.value});
    }
  }
  r.doc["influences"] = rows;
  return r;
}

NoiseKind parse_kind(const std::string& s) {
  if (s == "T") return NoiseKind::T;
  if (s == "H") return NoiseKind::H;
  if (s == "U") return NoiseKind::U;
  throw InputError("--kind must be T, H or U");
}

Report cmd_noise(const RunConfig& c) {
  Report r = start(c);
  const MultilinearPoly f = load_poly(c);
  const std::string kind_text = c.get("kind");
  const NoiseKind kind = parse_kind(kind_text);
  const Rational rho = get_number(c, "rho");
  std::optional<Rational> p;
  if (c.has("p")) p = get_number(c, "p");
  const int n = get_int_or(c, "n", f.n());
  r.doc["kind"] = kind_text;
  r.doc["rho"] = to_string(rho);
  if (p) r.doc["p"] = to_string(*p);
  r.doc["n"] = n;
  if (kind != NoiseKind::H && p) {
    const MultilinearPoly g = noise_operator_exact(f, rho, kind, *p);
    r.doc["exact"] = true;
    r.doc["polynomial"] = poly_to_json(g);
    poly_table(r, g, c.seed);
  } else {
    const RealPoly g = noise_operator(f, to_double(rho), kind, p, n);
    const Json pj = real_poly_to_json(g);
    r.doc["exact"] = false;
    r.doc["polynomial"] = pj;
    real_poly_table(r, pj, c.seed);
  }
  return r;
}

Json stability_fields(const RunConfig& c, const MultilinearPoly& f, const MeasureSpec& m, const Rational& rho) {
  Json j;
  const SpectralProfile profile = spectral_profile(f, m);
  j["weights"] = rationals_json(profile.weights);
  j["stability"] = stability(profile, to_double(rho));
  if (!std::holds_alternative<SliceMeasure>(m)) {
    j["stability_exact"] = to_string(stability_exact(profile, rho));
  } else {
    j["stability_exact"] = nullptr;
  }
  const std::uint64_t pairs = get_count_or(c, "mc-pairs", 0);
  if (pairs > 0) {
    RealPoly g = RealPoly::from_exact(f);
    const Estimate e = stability_monte_carlo(g, to_double(rho), m, pairs, c.seed);
    Json mc = estimate_json(e);
    mc["z"] = e.std_error > 0 ? (e.value - j["stability"].get<double>()) / e.std_error : 0.0;
    j["monte_carlo"] = mc;
  } else {
    j["monte_carlo"] = nullptr;
  }
  return j;
}

Report cmd_stability(const RunConfig& c) {
  Report r = start(c);
  const MultilinearPoly f = load_poly(c);
  const MeasureSpec m = get_measure(c);
  const Rational rho = get_number(c, "rho");
  if (rho < 0 || rho > 1) throw InputError("rho must lie in [0,1]");
  r.doc["measure"] = describe(m);
  r.doc["n"] = f.n();
  r.doc["rho"] = to_string(rho);
  const Json fields = stability_fields(c, f, m, rho);
  for (const auto& [key, v] : fields.items()) r.doc[key] = v;
  return r;
}

void write_dump(const InvarianceReport& rep, const std::string& path, const std::string& format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open dump file '" + path + "'");
  if (format == "f64") {
    for (const auto& column : rep.values) {
      for (double v : column) {
        unsigned char bytes[8];
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
        out.write(reinterpret_cast<const char*>(bytes), 8);
      }
    }
  } else {
    out << "slice,cube,gaussian\n";
    char buf[64];
    for (std::size_t i = 0; i < rep.values[0].size(); ++i) {
      for (int t = 0; t < 3; ++t) {
        auto res = std::to_chars(buf, buf + sizeof buf, rep.values[t][i]);
        out.write(buf, res.ptr - buf);
        out << (t == 2 ? '\n' : ',');
      }
    }
  }
  if (!out.flush()) throw IoError("failed writing dump file '" + path + "'");
}

Report cmd_invariance(const RunConfig& c) {
  Report r = start(c);
  const PolyDocument doc = load_poly_document(c);
  if (c.has("n") && get_int(c, "n") != doc.n) {
    throw InputError("--n " + c.get("n") + " does not match the polynomial's n = " + std::to_string(doc.n));
  }
  const int k = get_int(c, "k");
  if (!doc.is_harmonic()) throw InputError("invariance needs a harmonic polynomial");
  const LipschitzFunctional psi = LipschitzFunctional::parse(c.has("psi") ? c.get("psi") : "clamp:-1:1");
  InvarianceOptions opts;
  opts.influence_samples = get_count_or(c, "influence-samples", opts.influence_samples);
  opts.diagnostic_samples = get_count_or(c, "diagnostic-samples", opts.diagnostic_samples);
  std::string dump_format = c.has("dump-format") ? c.get("dump-format") : "f64";
  if (dump_format != "f64" && dump_format != "csv") throw InputError("--dump-format must be f64 or csv");
  opts.keep_values = c.has("dump");
  const std::uint64_t samples = c.samples ? c.samples : 100000;
  const InvarianceReport rep = run_invariance(doc.real(), k, psi, samples, c.seed, opts);
  r.doc["n"] = rep.n;
  r.doc["k"] = rep.k;
  r.doc["p"] = to_string(rep.p);
  r.doc["degree"] = rep.degree;
  r.doc["psi"] = rep.psi;
  r.doc["lipschitz"] = rep.lipschitz;
  r.doc["samples"] = rep.samples;
  r.doc["estimator"] = "sample mean of psi(f(x))";
  r.doc["variance_slice"] = rep.variance_slice;
  r.doc["max_influence"] = rep.max_influence;
  r.doc["influence_method"] = rep.influence_method;
  Json ms = Json::array();
  for (const auto& s : rep.measures) {
    Json j;
    j["measure"] = s.measure;
    j["psi_mean"] = estimate_json(s.psi_mean);
    j["normalized_sum_mean"] = s.normalized_sum_mean;
    j["normalized_sum_variance"] = s.normalized_sum_variance;
    ms.push_back(j);
  }
  r.doc["measures"] = ms;
  Json ds = Json::array();
  for (const auto& d : rep.distances) {
    Json j;
    j["first"] = d.first;
    j["second"] = d.second;
    j["levy"] = d.levy;
    j["cdf"] = d.cdf;
    ds.push_back(j);
  }
  r.doc["distances"] = ds;
  if (opts.keep_values) {
    write_dump(rep, c.get("dump"), dump_format);
    Json d;
    d["path"] = c.get("dump");
    d["format"] = dump_format;
    d["order"] = {"slice", "cube", "gaussian"};
    d["count"] = rep.samples;
    r.doc["dump"] = d;
  }
  return r;
}

Json majority_fields(const MajorityReport& m) {
  Json j;
  j["m"] = m.m;
  j["n"] = m.n;
  j["k"] = m.k;
  j["rho"] = m.rho;
  j["mean"] = to_string(m.mean);
  j["weights"] = rationals_json(m.weights);
  j["stability"] = m.stability;
  j["gamma"] = m.gamma;
  j["gap"] = m.gap;
  j["tolerance"] = m.tolerance;
  j["within_tolerance"] = m.within_tolerance;
  j["monte_carlo"] = m.monte_carlo ? estimate_json(*m.monte_carlo) : Json(nullptr);
  return j;
}

Report cmd_majority(const RunConfig& c) {
  Report r = start(c);
  const int n = get_int(c, "n");
  const MajorityReport m = majority_stablest_check(get_int(c, "m"), n, get_int_or(c, "k", n / 2), get_double(c, "rho"),
                                                   get_count_or(c, "mc-pairs", 0), c.seed);
  const Json fields = majority_fields(m);
  for (const auto& [key, v] : fields.items()) r.doc[key] = v;
  return r;
}

Report cmd_bourgain(const RunConfig& c) {
  Report r = start(c);
  const SliceFunction f = load_slice_input(c);
  const BourgainReport b = bourgain_tail_check(f, get_int(c, "kcut"));
  r.doc["n"] = f.n();
  r.doc["k"] = f.k();
  r.doc["kcut"] = get_int(c, "kcut");
  r.doc["converted_from_01"] = b.converted_from_01;
  r.doc["tail"] = to_string(b.tail);
  r.doc["variance"] = to_string(b.variance);
  r.doc["floor"] = b.floor;
  r.doc["ratio"] = b.ratio ? Json(*b.ratio) : Json(nullptr);
  r.doc["max_influence"] = b.max_influence;
  r.doc["degree_at_most_kcut"] = b.degree_at_most_kcut;
  return r;
}

Report cmd_kindler_safra(const RunConfig& c) {
  Report r = start(c);
  const SliceFunction f = load_slice_input(c);
  const JuntaFit fit = kindler_safra_search(f, get_int(c, "kcut"), get_int_or(c, "junta-cap", 4),
                                            get_count_or(c, "budget", 1 << 20));
  r.doc["n"] = f.n();
  r.doc["k"] = f.k();
  r.doc["kcut"] = get_int(c, "kcut");
  r.doc["converted_from_01"] = fit.converted_from_01;
  r.doc["coordinates"] = fit.coordinates;
  Json patterns = Json::array();
  for (Mask p : fit.patterns) {
    Json ones = Json::array();
    for (std::size_t t = 0; t < fit.coordinates.size(); ++t) {
      if ((p >> t) & 1) ones.push_back(fit.coordinates[t]);
    }
    patterns.push_back(ones);
  }
  r.doc["patterns"] = patterns;
  r.doc["truth_table"] = fit.truth_table;
  r.doc["degree"] = fit.degree;
  r.doc["distance"] = to_string(fit.distance);
  r.doc["tables_checked"] = fit.tables_checked;
  return r;
}

Report cmd_ekr_eigenvalues(const RunConfig& c) {
  Report r = start(c);
  const int n = get_int(c, "n"), k = get_int(c, "k"), t = get_int(c, "t");
  const WilsonSpectrum s = wilson_spectrum(n, k, t);
  r.doc["n"] = n;
  r.doc["k"] = k;
  r.doc["t"] = t;
  r.doc["boundary"] = n == (t + 1) * (k - t + 1);
  Json ev = Json::array();
  r.has_table = true;
  r.table.columns = {"seed", "e", "lambda"};
  for (std::size_t e = 0; e < s.eigenvalues.size(); ++e) {
    ev.push_back(Json{{"e", e}, {"lambda", to_string(s.eigenvalues[e])}});
    r.table.rows.push_back({c.seed, e, to_string(s.eigenvalues[e])});
  }
  r.doc["eigenvalues"] = ev;
  if (t + 2 <= k) {
    const Rational alt = wilson_eigenvalue_alt(n, k, t);
    if (alt != s.eigenvalues[t + 2]) {
      throw AssertionFailure("lambda_{t+2} forms disagree: " + to_string(s.eigenvalues[t + 2]) + " vs " + to_string(alt));
    }
    r.doc["lambda_t_plus_2_alt"] = to_string(alt);
  } else {
    r.doc["lambda_t_plus_2_alt"] = nullptr;
  }
  return r;
}

Report cmd_ekr_certify(const RunConfig& c) {
  Report r = start(c);
  const SetFamily f = load_family(c.get("family"));
  const int t = get_int(c, "t");
  const bool boundary = f.n() == (t + 1) * (f.k() - t + 1);
  const TailCertificate cert = boundary ? spectral_tail_inequality(f, t) : spectral_tail_certificate(f, t);
  r.doc["n"] = f.n();
  r.doc["k"] = f.k();
  r.doc["t"] = t;
  r.doc["size"] = f.size();
  r.doc["form"] = boundary ? "division-free" : "quotient";
  r.doc["tail"] = to_string(cert.tail);
  r.doc["expectation"] = to_string(cert.expectation);
  r.doc["star_measure"] = to_string(cert.star_measure);
  r.doc["lambda"] = to_string(cert.lambda);
  r.doc["bound"] = cert.bound ? Json(to_string(*cert.bound)) : Json(nullptr);
  r.doc["min_realised_lambda"] = to_string(cert.min_realised_lambda);
  r.doc["expectation_ok"] = cert.expectation_ok;
  r.doc["holds"] = cert.holds;
  if (!cert.holds) {
    r.holds = false;
    r.failure = "spectral tail certificate failed for a t-intersecting family";
  }
  return r;
}

Mask parse_set(const std::string& text, int n) {
  Mask m = 0;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const long long i = parse_integer("set", item);
    if (i < 1 || i > n) throw InputError("--set element outside [1, n]");
    m |= bit_of(static_cast<int>(i));
  }
  return m;
}

Report cmd_ekr_families(const RunConfig& c) {
  Report r = start(c);
  const int n = get_int(c, "n"), k = get_int(c, "k"), t = get_int(c, "t");
  const std::string kind = c.has("kind") ? c.get("kind") : "star";
  std::optional<SetFamily> f;
  if (kind == "star" || kind == "frankl") {
    const int size = kind == "star" ? t : t + 2;
    const Mask j = c.has("set") ? parse_set(c.get("set"), n) : full_mask(size);
    f = kind == "star" ? t_star(n, k, t, j) : frankl_family(n, k, t, j);
    r.doc["set"] = indices_json(j);
  } else if (kind == "greedy") {
    Rng rng(c.seed, 0);
    f = greedy_maximal_family(n, k, t, rng);
  } else {
    throw InputError("--kind must be star, frankl or greedy");
  }
  r.doc["kind"] = kind;
  r.doc["n"] = n;
  r.doc["k"] = k;
  r.doc["t"] = t;
  r.doc["size"] = f->size();
  r.doc["measure"] = to_string(family_measure(*f));
  r.doc["t_intersecting"] = is_t_intersecting(*f, t);
  r.doc["family"] = set_family_to_json(*f);
  r.has_table = true;
  r.table.columns = {"seed", "member"};
  for (const auto& m : r.doc["family"]["members"]) {
    r.table.rows.push_back({c.seed, join_indices(m.get<std::vector<int>>())});
  }
  return r;
}

Report cmd_ekr_cross(const RunConfig& c) {
  Report r = start(c);
  const SetFamily f = load_family(c.get("family"));
  const SetFamily g = load_family(c.get("family-b"));
  const CrossCheck x = cross_intersecting_check(f, g);
  r.doc["n"] = f.n();
  r.doc["a"] = f.k();
  r.doc["b"] = g.k();
  r.doc["sum"] = x.sum;
  r.doc["bound"] = x.bound.get_str();
  r.doc["f_empty"] = x.f_empty;
  r.doc["holds"] = x.holds;
  if (!x.holds) {
    r.holds = false;
    r.failure = "cross-intersecting size bound violated";
  }
  return r;
}

// ---------------------------------------------------------------- sweep

struct Experiment {
  std::vector<std::string> rangeable;
  std::vector<std::string> columns;
  std::function<std::vector<Json>(const RunConfig&)> row;
};

const std::map<std::string, Experiment>& experiments() {
  static const std::map<std::string, Experiment> table = {
      {"stability",
       {{"rho"},
        {"seed", "rho", "stability", "stability_exact", "mc_value", "mc_std_error"},
        [](const RunConfig& c) {
          const MultilinearPoly f = load_poly(c);
          const Rational rho = get_number(c, "rho");
          if (rho < 0 || rho > 1) throw InputError("rho must lie in [0,1]");
          const Json j = stability_fields(c, f, get_measure(c), rho);
          const Json& mc = j["monte_carlo"];
          return std::vector<Json>{c.seed, c.get("rho"), j["stability"], j["stability_exact"],
                                   mc.is_null() ? Json(nullptr) : mc["value"],
                                   mc.is_null() ? Json(nullptr) : mc["std_error"]};
        }}},
      {"deficit",
       {{"n", "k", "t"},
        {"seed", "n", "k", "t", "deficit", "deficit_value"},
        [](const RunConfig& c) {
          const int n = get_int(c, "n"), k = get_int(c, "k"), t = get_int(c, "t");
          const Rational d = star_frankl_deficit(n, k, t);
          return std::vector<Json>{c.seed, n, k, t, to_string(d), to_double(d)};
        }}},
      {"gamma",
       {{"rho", "mu"},
        {"seed", "mu", "rho", "gamma"},
        [](const RunConfig& c) {
          return std::vector<Json>{c.seed, c.get("mu"), c.get("rho"), gamma_rho(get_double(c, "mu"), get_double(c, "rho"))};
        }}},
      {"majority",
       {{"m", "n", "k", "rho"},
        {"seed", "m", "n", "k", "rho", "mean", "stability", "gamma", "gap", "within_tolerance"},
        [](const RunConfig& c) {
          const int n = get_int(c, "n");
          const MajorityReport m = majority_stablest_check(get_int(c, "m"), n, get_int_or(c, "k", n / 2),
                                                           get_double(c, "rho"), 0, c.seed);
          return std::vector<Json>{c.seed, m.m, m.n, m.k, c.get("rho"), to_string(m.mean),
                                   m.stability, m.gamma, m.gap, m.within_tolerance};
        }}},
      {"wilson",
       {{"n", "k", "t", "e"},
        {"seed", "n", "k", "t", "e", "lambda"},
        [](const RunConfig& c) {
          const int n = get_int(c, "n"), k = get_int(c, "k"), t = get_int(c, "t");
          const int e = get_int_or(c, "e", t + 2);
          return std::vector<Json>{c.seed, n, k, t, e, to_string(wilson_eigenvalue(n, k, t, e))};
        }}},
  };
  return table;
}

Report cmd_sweep(const RunConfig& c) {
  Report r = start(c);
  const std::string name = c.get("experiment");
  auto it = experiments().find(name);
  if (it == experiments().end()) {
    throw UsageError("unknown sweep experiment '" + name + "' (stability, deficit, gamma, majority, wilson)");
  }
  const Experiment& ex = it->second;
  if (c.ranges.size() != 1) throw UsageError("sweep needs exactly one --range, got " + std::to_string(c.ranges.size()));
  const std::string& spec = c.ranges.front();
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("--range expects NAME=SPEC");
  const std::string param = spec.substr(0, eq);
  if (std::find(ex.rangeable.begin(), ex.rangeable.end(), param) == ex.rangeable.end()) {
    throw UsageError("parameter '" + param + "' cannot be ranged in the " + name + " sweep");
  }
  if (c.has(param)) throw UsageError("--" + param + " is both fixed and ranged");
  const std::vector<std::string> values = expand_range(spec.substr(eq + 1));
  if (values.empty()) throw InputError("empty range for '" + param + "'");
  r.doc["experiment"] = name;
  r.doc["parameter"] = param;
  r.doc["values"] = values;
  r.doc["columns"] = ex.columns;
  r.has_table = true;
  r.table.columns = ex.columns;
  Json rows = Json::array();
  for (const auto& v : values) {
    RunConfig point = c;
    point.params[param] = v;
    std::vector<Json> row = ex.row(point);
    Json obj = Json::object();
    for (std::size_t i = 0; i < ex.columns.size(); ++i) obj[ex.columns[i]] = row[i];
    rows.push_back(obj);
    r.table.rows.push_back(std::move(row));
  }
  r.doc["rows"] = rows;
  return r;
}

// ---------------------------------------------------------------- output

std::string csv_cell(const Json& v) {
  std::string s;
  if (v.is_null()) return s;
  if (v.is_string()) {
    s = v.get<std::string>();
  } else {
    s = v.dump();
  }
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::string>& keys, std::vector<Json>& vals) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      flatten(v, key, keys, vals);
    } else if (v.is_array()) {
      keys.push_back(key);
      vals.push_back(v.dump());
    } else {
      keys.push_back(key);
      vals.push_back(v);
    }
  }
}

}  // namespace

std::vector<std::string> expand_range(const std::string& spec) {
  std::vector<std::string> out;
  if (spec.find(':') == std::string::npos) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      parse_number(item);
      out.push_back(item);
    }
    return out;
  }
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw InputError("range '" + spec + "' must be START:STOP:STEP");
  const Rational start = parse_number(parts[0]);
  const Rational stop = parse_number(parts[1]);
  const Rational step = parse_number(parts[2]);
  if (step <= 0) throw InputError("range step must be positive");
  bool decimal = true;
  std::size_t places = 0;
  for (const auto& p : parts) {
    if (p.find('/') != std::string::npos) decimal = false;
    const auto dot = p.find('.');
    if (dot != std::string::npos) places = std::max(places, p.size() - dot - 1);
  }
  BigInt scale = 1;
  for (std::size_t i = 0; i < places; ++i) scale *= 10;
  for (Rational v = start; v <= stop; v += step) {
    if (out.size() >= 1000000) throw InputError("range has more than 10^6 values");
    if (!decimal) {
      out.push_back(to_string(v));
      continue;
    }
    const Rational scaled = v * scale;
    BigInt whole = scaled.get_num() / scaled.get_den();
    const bool negative = whole < 0;
    if (negative) whole = -whole;
    std::string digits = whole.get_str();
    std::string text;
    if (places == 0) {
      text = digits;
    } else {
      if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
      text = digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
      while (text.back() == '0') text.pop_back();
      if (text.back() == '.') text.pop_back();
    }
    out.push_back(negative ? "-" + text : text);
  }
  return out;
}

std::string render(const Report& report, Format format) {
  if (format == Format::json) return report.doc.dump(2) + "\n";
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  if (report.has_table) {
    columns = report.table.columns;
    rows = report.table.rows;
  } else {
    std::vector<Json> vals;
    flatten(report.doc, "", columns, vals);
    rows.push_back(std::move(vals));
  }
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_cell(columns[i]);
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\n";
  }
  return out;
}

void emit(const Report& report, const RunConfig& config, std::ostream& out) {
  const std::string text = render(report, config.format);
  if (config.output.empty()) {
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream file(config.output, std::ios::binary);
  if (!file) throw IoError("cannot open output file '" + config.output + "'");
  file << text;
  if (!file.flush()) throw IoError("failed writing output file '" + config.output + "'");
}

Report dispatch(const RunConfig& c) {
  static const std::map<std::string, std::function<Report(const RunConfig&)>> table = {
      {"decompose", cmd_decompose},
      {"project", cmd_project},
      {"norms", cmd_norms},
      {"influence", cmd_influence},
      {"noise", cmd_noise},
      {"stability", cmd_stability},
      {"invariance", cmd_invariance},
      {"majority", cmd_majority},
      {"bourgain", cmd_bourgain},
      {"kindler-safra", cmd_kindler_safra},
      {"ekr eigenvalues", cmd_ekr_eigenvalues},
      {"ekr certify", cmd_ekr_certify},
      {"ekr families", cmd_ekr_families},
      {"ekr cross", cmd_ekr_cross},
      {"sweep", cmd_sweep},
  };
  auto it = table.find(c.subcommand);
  if (it == table.end()) throw UsageError("unknown subcommand '" + c.subcommand + "'");
  return it->second(c);
}

bool parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out) {
  CLI::App app{"slicelab: harmonic analysis on the slice, the biased cube and Gaussian space"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--seed", config.seed, "64-bit seed, echoed in every output");
  app.add_option("--samples", config.samples, "Monte Carlo sample count");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output,-o", config.output, "output path (default stdout)");

  struct Binding {
    CLI::App* app;
    std::string name;
    CLI::Option* option;
    std::string value;
  };
  std::list<Binding> bindings;
  auto bind = [&](CLI::App* sub, std::initializer_list<const char*> names) {
    for (const char* name : names) {
      bindings.push_back({sub, name, nullptr, {}});
      Binding& b = bindings.back();
      b.option = sub->add_option("--" + b.name, b.value);
    }
  };
  std::map<CLI::App*, std::string> names;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& path, const std::string& help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    names[sub] = path;
    return sub;
  };

  bind(leaf(&app, "decompose", "decompose", "exact expansion in the cube or slice basis"),
       {"poly", "slice-function", "measure"});
  bind(leaf(&app, "project", "project", "harmonic projection of a slice function"), {"poly", "slice-function", "k"});
  bind(leaf(&app, "norms", "norms", "basis norms, exact moments, junta event closeness"),
       {"measure", "chi-d", "poly", "event", "J", "n", "p"});
  bind(leaf(&app, "influence", "influence", "coordinate influences"), {"poly", "slice-function", "measure", "i", "j"});
  bind(leaf(&app, "noise", "noise", "apply T, H or U noise"), {"poly", "rho", "kind", "p", "n"});
  bind(leaf(&app, "stability", "stability", "noise stability"), {"poly", "rho", "measure", "mc-pairs"});
  bind(leaf(&app, "invariance", "invariance", "slice vs cube vs Gaussian laws of f"),
       {"poly", "n", "k", "psi", "influence-samples", "diagnostic-samples", "dump", "dump-format"});
  bind(leaf(&app, "majority", "majority", "stability of projected majority vs Gamma"), {"m", "n", "k", "rho", "mc-pairs"});
  bind(leaf(&app, "bourgain", "bourgain", "spectral tail of a Boolean slice function"),
       {"slice-function", "poly", "k", "kcut"});
  bind(leaf(&app, "kindler-safra", "kindler-safra", "closest low-degree junta"),
       {"slice-function", "poly", "k", "kcut", "junta-cap", "budget"});
  CLI::App* ekr = app.add_subcommand("ekr", "Erdos-Ko-Rado spectral tools");
  ekr->require_subcommand(1);
  bind(leaf(ekr, "eigenvalues", "ekr eigenvalues", "Wilson eigenvalues"), {"n", "k", "t"});
  bind(leaf(ekr, "certify", "ekr certify", "spectral tail certificate"), {"family", "t"});
  bind(leaf(ekr, "families", "ekr families", "stars, Frankl families, greedy maximal families"),
       {"n", "k", "t", "kind", "set"});
  bind(leaf(ekr, "cross", "ekr cross", "cross-intersecting size bound"), {"family", "family-b"});
  CLI::App* sweep = leaf(&app, "sweep", "sweep", "one-parameter sweep as a table");
  std::string experiment;
  sweep->add_option("experiment", experiment, "stability, deficit, gamma, majority or wilson")->required();
  sweep->add_option("--range", config.ranges, "NAME=START:STOP:STEP or NAME=V1,V2,...");
  bind(sweep, {"poly", "measure", "rho", "mu", "n", "k", "t", "m", "e", "mc-pairs"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return false;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return false;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  // Help on nested subcommands surfaces through the parsed leaf.
  for (const auto& [sub, path] : names) {
    if (sub->parsed()) config.subcommand = path;
  }
  if (config.subcommand.empty()) throw UsageError("missing subcommand");
  for (const auto& b : bindings) {
    if (b.app->parsed() && b.option->count() > 0) config.params[b.name] = b.value;
  }
  if (config.subcommand == "sweep") config.params["experiment"] = experiment;
  for (const char* key : {"poly", "slice-function", "family", "family-b"}) {
    if (config.has(key)) config.inputs.push_back(config.get(key));
  }
  config.format = format == "csv" ? Format::csv : Format::json;
  return true;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    RunConfig config;
    if (!parse_args(argc, argv, config, out)) return kExitOk;
    const Report report = dispatch(config);
    emit(report, config, out);
    if (!report.holds) {
      err << "slicelab: invariant violated: " << report.failure << "\n";
      return kExitAssertion;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "slicelab: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "slicelab: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const AssertionFailure& e) {
    err << "slicelab: invariant violated: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const InputError& e) {
    err << "slicelab: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Json::exception& e) {
    err << "slicelab: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "slicelab: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    err << "slicelab: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::out_of_range& e) {
    err << "slicelab: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "slicelab: internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace slicelab::cli
