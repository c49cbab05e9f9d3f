#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dirichlet2d/gelfand.hpp"
#include "dirichlet2d/series.hpp"

namespace dirichlet2d {

/// Positively oriented circle with equispaced quadrature nodes.
struct ContourSpec {
  Cpx center{0.0, 0.0};
  double radius = 1.0;
  std::size_t node_count = 256;
};

template <class S>
struct ResolventSample {
  S lambda;
  Series<S> inverse;    // truncated inverse of lambda*delta - a
  double residual = 0.0;  // l1 defect of the box identity; 0 in exact mode
};

/// Samples of the series over a half-plane grid together with the l1 bound;
/// every sample lies in the closed disk of that radius around 0.
struct RangeEstimate {
  std::vector<Cpx> samples;
  double norm_radius = 0.0;
};

RangeEstimate estimate_range(const SeriesD& a, double sigma_max = 24.0,
                             std::size_t sigma_steps = 7, std::size_t t_steps = 24);

/// Truncated inverse of lambda*delta - a. The box identity is exact in
/// rational mode; in float mode the recomputed l1 defect must stay within
/// tol relative to the inverse's mass.
template <class S>
ResolventSample<S> resolvent(const Series<S>& a, const S& lambda, const BoxSpec& box,
                             double tol = 1e-9);

/// Named analytic functions admitted by the contour calculus. Each carries a
/// machine-checkable domain condition against the contour disk.
class Phi {
 public:
  enum class Kind { Reciprocal, Exp, LogPrincipal, Polynomial };

  static Phi reciprocal();
  static Phi exponential();
  static Phi log_principal();
  static Phi polynomial(std::vector<Cpx> coefficients);  // c0 + c1 z + ...

  Cpx operator()(Cpx z) const;
  void validate(const ContourSpec& contour) const;  // throws std::domain_error
  Kind kind() const { return kind_; }
  const std::vector<Cpx>& coefficients() const { return coefficients_; }
  std::string describe() const;

 private:
  Phi(Kind kind, std::vector<Cpx> coefficients)
      : kind_(kind), coefficients_(std::move(coefficients)) {}
  Kind kind_;
  std::vector<Cpx> coefficients_;
};

/// phi spec strings: reciprocal | exp | log | poly:<c0>,<c1>,...
Phi parse_phi(const std::string& text);

struct FuncalcOptions {
  std::size_t threads = 1;
  /// Enclosure margin: every range sample must sit inside the contour with
  /// clearance of at least this fraction of the radius.
  double margin = 0.01;
  /// Residual tolerance handed to each per-node resolvent.
  double resolvent_tol = 1e-9;
};

struct FuncalcResult {
  SeriesD value;
  /// Max per-entry difference against the run with half the nodes.
  double node_halving_error = 0.0;
  std::size_t nodes = 0;
};

/// Trapezoidal contour integral (1/2,pi,i) * sum phi(lambda) R(lambda) dlambda
/// over the circle, one truncated resolvent per node. Node order is fixed, so
/// results are bit-stable for any thread count.
FuncalcResult functional_calculus(const SeriesD& a, const Phi& phi, const ContourSpec& contour,
                                  const BoxSpec& box, const RangeEstimate* range = nullptr,
                                  const FuncalcOptions& options = {});

/// Direct evaluation of a polynomial in the algebra, truncated to the box.
SeriesD apply_polynomial(const SeriesD& a, const std::vector<Cpx>& coefficients,
                         const BoxSpec& box);

struct GrowthThresholds {
  /// Divergence evidence: fitted growth of the partial sums per depth
  /// doubling, over the last four depths, at least this.
  double divergent_slope = 0.1;
  /// Strong convergence flag: last increment at most this, relative.
  double cauchy_rel = 1e-9;
};

struct GrowthReport {
  std::vector<std::uint64_t> depths;
  std::vector<double> partial_sums;  // weighted p-norm of the inverse per depth
  double slope_per_doubling = 0.0;
  bool divergent_evidence = false;
  bool cauchy_converged = false;
  std::vector<std::string> warnings;
};

/// Truncated inverse at the deepest box, then weighted p-norm partial sums
/// per depth. The inverse coefficients do not depend on the box depth, so one
/// inversion serves every requested depth.
template <class S>
GrowthReport growth_scan(const Series<S>& a, const Weight& w, double p,
                         const std::vector<std::uint64_t>& depths,
                         const GrowthThresholds& thresholds = {});

struct ShrinkCandidate {
  double r = 1.0;
  GrowthReport report;
  bool bounded = false;
};

struct ShrinkSearchReport {
  std::vector<ShrinkCandidate> candidates;
  std::optional<double> best_r;
  std::optional<Weight> shrunk_weight;
  std::uint64_t prime_index = 1;
  Axis axis = Axis::First;
  double rho = 1.0;  // growth infimum at the perturbed prime
  std::vector<std::string> warnings;
};

/// Grid search for the largest single-prime multiplicative weight nu with
/// nu <= w under which the truncated inverse keeps bounded-evidence partial
/// sums. Requires a multiplicative-from-primes w.
template <class S>
ShrinkSearchReport shrink_weight_search(const Series<S>& a, const Weight& w,
                                        const BoxSpec& check_box, std::vector<double> r_grid,
                                        std::vector<std::uint64_t> depths = {},
                                        const GrowthThresholds& thresholds = {});

}  // namespace dirichlet2d
