#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slicelab/harmonic.hpp"
#include "slicelab/measures.hpp"
#include "slicelab/noise.hpp"
#include "slicelab/real_poly.hpp"

namespace slicelab {

enum class LipschitzKind { clamp_window, distance_to_interval, clumped_square, soft_threshold };

/// psi: R -> R with Lipschitz constant C.
///  clamp_window(a, b): clamp x to [a, b]; C = 1.
///  distance_to_interval(a, b): distance from x to [a, b]; C = 1.
///  clumped_square: 0 below 0, x^2 on [0, 1], 1 above 1; C = 2.
///  soft_threshold(sigma, eps): 0 below sigma, 1 above sigma + eps, linear between; C = 1/eps.
class LipschitzFunctional {
 public:
  static LipschitzFunctional clamp_window(double a, double b);
  static LipschitzFunctional distance_to_interval(double a, double b);
  static LipschitzFunctional clumped_square();
  static LipschitzFunctional soft_threshold(double sigma, double eps);
  /// "clamp:A:B", "interval:A:B", "sq", "threshold:SIGMA:EPS"
  static LipschitzFunctional parse(const std::string& text);

  double operator()(double x) const;
  double lipschitz_constant() const;
  LipschitzKind kind() const { return kind_; }
  std::string describe() const;

 private:
  LipschitzFunctional(LipschitzKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  LipschitzKind kind_;
  double a_, b_;
};

struct MeasureSummary {
  std::string measure;
  Estimate psi_mean;
  double normalized_sum_mean = 0;
  double normalized_sum_variance = 0;
};

struct PairDistance {
  std::string first, second;
  double levy = 0;
  double cdf = 0;
};

struct InvarianceReport {
  int n = 0, k = 0;
  Rational p;
  int degree = 0;
  std::string psi;
  double lipschitz = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double variance_slice = 0;
  double max_influence = 0;
  std::string influence_method;
  std::vector<MeasureSummary> measures;  // slice, cube, gaussian
  std::vector<PairDistance> distances;   // slice-cube, slice-gaussian, cube-gaussian
  std::vector<std::vector<double>> values;  // raw f-values per measure, kept on request
};

struct InvarianceOptions {
  std::uint64_t influence_samples = 2000;
  std::uint64_t diagnostic_samples = 10000;
  bool compute_influences = true;
  bool keep_values = false;
};

/// Monte Carlo comparison of f under nu_k, mu_{k/n} and G_{k/n}.
InvarianceReport run_invariance(const RealPoly& f, int k, const LipschitzFunctional& psi, std::uint64_t samples,
                                std::uint64_t seed, const InvarianceOptions& options = {});

/// Maximum slice influence: exact enumeration for n <= the slice cap, the
/// closed form for linear f, and the sampled-pair estimator otherwise.
std::pair<double, std::string> max_slice_influence(const RealPoly& f, int k, std::uint64_t samples,
                                                   std::uint64_t seed);

struct MajorityReport {
  int m = 0, n = 0, k = 0;
  double rho = 0;
  Rational mean;                 // E_nu[Maj_m]
  std::vector<Rational> weights; // ||f^{=l}||^2 under nu_k
  double stability = 0;          // Stab^s_rho
  double gamma = 0;              // Gamma_rho(mean)
  double gap = 0;                // stability - gamma
  bool within_tolerance = false; // stability <= gamma + tolerance
  double tolerance = 0.05;
  std::optional<Estimate> monte_carlo;
};

/// Slice spectral profile of the 0/1 majority of x_1..x_m on slice(n,k).
/// The function is symmetric in its m inputs, so its degree-l part is the
/// degree-l orthogonal polynomial component in j = x_1 + ... + x_m under
/// the hypergeometric law of j. Exact for any n <= 2^31.
std::vector<Rational> symmetric_junta_profile(const std::vector<Rational>& values_by_weight, int m, int n, int k);

/// mc_pairs > 0 adds a transposition-noise Monte Carlo cross-check.
MajorityReport majority_stablest_check(int m, int n, int k, double rho, std::uint64_t mc_pairs = 0,
                                       std::uint64_t seed = 0);

struct BourgainReport {
  Rational tail;
  Rational variance;
  double floor = 0;
  std::optional<double> ratio;
  double max_influence = 0;
  bool degree_at_most_kcut = false;  // tail vanishes, so the tail lower bound does not apply
  bool converted_from_01 = false;
};

/// f must be +-1 valued.
BourgainReport bourgain_tail_check(const SliceFunction& f, int kcut);

struct JuntaFit {
  std::vector<int> coordinates;  // 1-based
  std::vector<int> truth_table;  // +-1 per feasible pattern, in pattern order
  std::vector<Mask> patterns;    // assignments to coordinates (bit t = coordinates[t])
  int degree = 0;
  Rational distance;             // ||f - h||^2 under nu_k
  SliceFunction junta;
  std::uint64_t tables_checked = 0;
  bool converted_from_01 = false;
};

/// Exhaustive search over junta coordinates (|T| = min(J, n)) and +-1
/// truth tables on the feasible patterns, keeping tables of slice degree
/// <= kcut. Throws CapExceeded when more than `budget` tables would be tried.
JuntaFit kindler_safra_search(const SliceFunction& f, int kcut, int junta_cap, std::uint64_t budget = 1 << 20);

/// Returns f when it is +-1 valued and 2f - 1 when it is 0/1 valued
/// (setting converted). Throws std::invalid_argument otherwise.
SliceFunction to_sign_function(const SliceFunction& f, bool& converted);

}  // namespace slicelab
