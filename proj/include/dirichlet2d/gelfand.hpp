#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirichlet2d/series.hpp"

namespace dirichlet2d {

/// Multiplicative map on N^2 determined by its values at (p_i, 1) and
/// (1, p_i). Only finitely many prime values are stored; untouched indices
/// fall back to the axis default, either a flat value or p_i^(-s).
class Semicharacter {
 public:
  struct AxisProfile {
    std::map<std::uint64_t, Cpx> overrides;
    bool power_default = false;
    Cpx flat{1.0, 0.0};
    Cpx exponent{0.0, 0.0};

    Cpx value(std::uint64_t prime_index) const;
  };

  Semicharacter() = default;
  Semicharacter(AxisProfile first, AxisProfile second)
      : first_(std::move(first)), second_(std::move(second)) {}

  /// chi(p_i, 1) = p_i^(-s1), chi(1, p_i) = p_i^(-s2); requires (s1, s2) in
  /// the closed right half-plane squared.
  static Semicharacter point(Cpx s1, Cpx s2);
  static Semicharacter trivial();
  /// Same flat value at every prime of each axis (e.g. 0 beyond nothing).
  static Semicharacter flat(Cpx z1, Cpx z2);

  Cpx prime_value(Axis axis, std::uint64_t prime_index) const;
  void set_prime_value(Axis axis, std::uint64_t prime_index, Cpx value);

  Cpx operator()(std::uint64_t m, std::uint64_t n) const;
  Cpx value_factored(const Factorization& fm, const Factorization& fn) const;

  /// log |chi(m,n)| for a factored pair; -inf when some factor vanishes.
  double log_abs_factored(const Factorization& fm, const Factorization& fn) const;

  std::string describe() const;

  const AxisProfile& first_axis() const { return first_; }
  const AxisProfile& second_axis() const { return second_; }

 private:
  AxisProfile first_;
  AxisProfile second_;
};

/// Complex literals: "1.5", "2i", "0.5-3i", "1e-3+2e2i".
Cpx parse_complex(const std::string& text);

/// Character spec strings:
///   point:<s1>,<s2>        complex literals like 1.5, 2i, 0.5-3i
///   line:<sigma>,<t1>,<t2>
///   rand:<sigma>,<seed>    random phases at the first 16 primes
///   explicit:<file>        lines: axis i re im
Semicharacter parse_character(const std::string& text);

Cpx gelfand_transform(const SeriesD& a, const Semicharacter& chi);
Cpx gelfand_transform(const SeriesQ& a, const Semicharacter& chi);

struct BoundTrialPlan {
  std::uint64_t prime_count = 6;
  std::uint64_t max_exponent = 8;
  std::size_t random_tuples = 128;
  std::uint64_t seed = 0;
  /// Additional factored pairs to test, e.g. the support of a series.
  std::vector<std::pair<Factorization, Factorization>> extra;
};

struct OmegaBoundReport {
  bool bounded = true;
  double worst_ratio = 0.0;  // max |chi(m,n)| / omega(m,n) over the trials
  std::string worst_point;
  std::size_t trials = 0;
};

/// Evidence-level check of |chi| <= omega over structured and random
/// exponent tuples. A "bounded" verdict covers the scanned tuples only.
OmegaBoundReport check_omega_bounded(const Semicharacter& chi, const Weight& w,
                                     const BoundTrialPlan& plan = {});

struct SpectralBudget {
  std::size_t random_characters = 2048;
  std::size_t grid_resolution = 256;
  std::uint64_t seed = 0;
  std::uint64_t profile_depth = 48;  // depth for the per-prime radius estimates
};

struct SpectralMinReport {
  double min_abs = 0.0;  // |transform at argmin_character|, recomputed
  std::string argmin;
  Semicharacter argmin_character;
  std::string method;  // "grid" or "monte-carlo"
  double grid_min = 0.0;
  double sample_min = 0.0;
  std::size_t samples_used = 0;
  std::uint64_t seed = 0;
  /// Sampling bounds the infimum from above only; no global minimum is
  /// certified.
  bool upper_bound_only = true;
};

/// Estimates the minimum modulus of the transform over omega-bounded
/// characters: a deterministic boundary grid of point characters (sigma = 0)
/// plus seeded Monte-Carlo sampling of disk products with per-prime radii
/// from the weight's growth profiles.
SpectralMinReport spectral_min_estimate(const SeriesD& a, const Weight& w,
                                        const SpectralBudget& budget = {});
SpectralMinReport spectral_min_estimate(const SeriesQ& a, const Weight& w,
                                        const SpectralBudget& budget = {});

}  // namespace dirichlet2d
