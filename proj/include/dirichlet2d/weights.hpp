#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dirichlet2d/lattice.hpp"
#include "dirichlet2d/scalar.hpp"

namespace dirichlet2d {

enum class Axis { First = 1, Second = 2 };

inline const char* axis_name(Axis a) { return a == Axis::First ? "first" : "second"; }

/// Submultiplicative weight on N^2 with values >= 1.
///
/// All evaluations go through a factored log-space path, so prime powers far
/// beyond 2^64 (e.g. omega(2^n, 3^n) for n ~ 1e5) never materialize integers.
class Weight {
 public:
  struct Constant {
    double value = 1.0;
  };
  struct TwoAdic {};  // 2^(k+1) where 2^k exactly divides m*n
  struct AxisPower {
    double alpha = 0.0;
    double beta = 0.0;
  };
  struct LogProduct {};  // (1 + log m)(1 + log n)
  struct MultiplicativeFromPrimes {
    std::map<std::uint64_t, double> first_axis;   // value at (p_i, 1); absent = 1
    std::map<std::uint64_t, double> second_axis;  // value at (1, p_i); absent = 1
  };
  struct Table {
    std::map<Index2, double> values;  // default 1 off the listed points
  };
  struct Min {
    std::vector<Weight> parts;
  };

  using Spec =
      std::variant<Constant, TwoAdic, AxisPower, LogProduct, MultiplicativeFromPrimes, Table, Min>;

  static Weight constant(double c);
  static Weight two_adic();
  static Weight axis_power(double alpha, double beta);
  static Weight log_product();
  static Weight multiplicative(std::map<std::uint64_t, double> first_axis,
                               std::map<std::uint64_t, double> second_axis);
  static Weight table(std::map<Index2, double> values);
  static Weight pointwise_min(std::vector<Weight> parts);

  double operator()(std::uint64_t m, std::uint64_t n) const;
  double log_value(const Factorization& fm, const Factorization& fn) const;

  /// omega(p_i^k, 1)^(1/k) on the chosen axis, with exact fast paths for the
  /// multiplicative and power specs.
  double growth_root(std::uint64_t prime_index, Axis axis, std::uint64_t power) const;

  /// Exact rational value where the spec allows one (TwoAdic, integral
  /// Constant, integral AxisPower); nullopt otherwise.
  std::optional<Rat> exact_value(std::uint64_t m, std::uint64_t n) const;

  const Spec& spec() const { return *spec_; }
  bool is_constant() const;
  bool table_backed() const;  // diagnostics can only scan the tabulated part
  std::string describe() const;

 private:
  explicit Weight(Spec s);
  std::shared_ptr<const Spec> spec_;
};

struct WeightParseError : std::runtime_error {
  WeightParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

/// Weight spec mini-language:
///   const:<c> | twoadic | axispow:<alpha>,<beta> | logprod
///   | mfp:<file>           (lines: axis i value)
///   | min(<spec>,<spec>,...)
Weight parse_weight(const std::string& text);

struct GrowthProfile {
  Axis axis = Axis::First;
  std::uint64_t prime_index = 1;
  std::vector<double> estimates;  // omega(p^n)^(1/n), n = 1..depth
  double inf_estimate = 1.0;      // min of estimates; upper bound for the limit
};

GrowthProfile growth_profile(const Weight& w, std::uint64_t prime_index, Axis axis,
                             std::uint64_t depth);

struct AdmissibilityReport {
  bool admissible = false;
  double worst_inf = 1.0;  // largest root infimum seen
  std::uint64_t worst_prime_index = 1;
  Axis worst_axis = Axis::First;
  // First prime (smallest index) whose growth exceeds 1 + tol, if any.
  std::optional<std::uint64_t> witness_prime_index;
  Axis witness_axis = Axis::First;
  double witness_inf = 1.0;
  std::uint64_t prime_count = 0;
  std::uint64_t depth = 0;
  double tol = 0.0;
  std::vector<GrowthProfile> profiles;
};

/// Finite-evidence check of per-prime growth: admissible iff every root
/// infimum up to `depth` is within `tol` of 1 for the first `prime_count`
/// primes on both axes. A pass is sound (the infimum only decreases); a fail
/// is evidence, not proof.
AdmissibilityReport is_admissible(const Weight& w, std::uint64_t prime_count = 8,
                                  std::uint64_t depth = 48, double tol = 1e-6);

enum class MonotoneVerdict { Admissible, MonotoneWithConstant, Violated };

struct AlmostMonotoneReport {
  MonotoneVerdict verdict = MonotoneVerdict::MonotoneWithConstant;
  double constant = 1.0;  // minimal K valid on the scanned box
  std::optional<std::pair<Index2, Index2>> witness;
  double witness_ratio = 0.0;
  bool table_partial = false;
};

struct AlmostMonotoneOptions {
  std::uint64_t prime_count = 8;
  std::uint64_t depth = 48;
  double tol = 1e-6;
  std::optional<double> require_constant;  // verdict Violated if the scan exceeds it
};

AlmostMonotoneReport is_almost_monotone(const Weight& w, const BoxSpec& box,
                                        const AlmostMonotoneOptions& opts = {});

struct BeurlingDomarReport {
  std::uint64_t l = 1;
  std::uint64_t k = 1;
  std::uint64_t depth = 0;
  double partial_sum = 0.0;
  double last_increment = 0.0;  // S(N) - S(N/2)
  double prev_increment = 0.0;  // S(N/2) - S(N/4)
  double tail_bound = 0.0;      // +inf unless log omega(l,k) == 0
  bool convergent_evidence = true;
};

/// Partial sums of sum_n log omega(l^n, k^n) / (1 + n^2). The submultiplicative
/// tail bound n*log omega(l,k)/(1+n^2) only closes when omega(l,k) == 1; the
/// verdict otherwise comes from comparing the last two octave increments.
BeurlingDomarReport beurling_domar_partial(const Weight& w, std::uint64_t l, std::uint64_t k,
                                           std::uint64_t depth = 10000);

/// Pointwise minimum. Multiplicative specs are merged by taking minima of the
/// prime values; a constant-1 member collapses the result to constant 1.
Weight min_weight(const std::vector<Weight>& parts);

struct SubmultReport {
  bool holds = true;
  double worst_excess = 0.0;  // max of w(ab)/(w(a)w(b)) - 1 over the scan
  Index2 worst_left;
  Index2 worst_right;
  bool table_partial = false;
};

SubmultReport check_submultiplicative(const Weight& w, const BoxSpec& box);

}  // namespace dirichlet2d
