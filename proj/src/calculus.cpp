#include "dirichlet2d/calculus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <thread>

namespace dirichlet2d {

RangeEstimate estimate_range(const SeriesD& a, double sigma_max, std::size_t sigma_steps,
                             std::size_t t_steps) {
  if (sigma_steps < 2 || t_steps < 2) throw std::domain_error("range grid needs >= 2 steps per axis");
  RangeEstimate range;
  range.norm_radius = l1_norm(a);
  const double window = 2.0 * std::numbers::pi / std::log(2.0);
  range.samples.reserve(sigma_steps * sigma_steps * t_steps * t_steps);
  for (std::size_t i = 0; i < sigma_steps; ++i) {
    double s1 = sigma_max * static_cast<double>(i) / static_cast<double>(sigma_steps - 1);
    for (std::size_t j = 0; j < sigma_steps; ++j) {
      double s2 = sigma_max * static_cast<double>(j) / static_cast<double>(sigma_steps - 1);
      for (std::size_t k = 0; k < t_steps; ++k) {
        double t1 = window * static_cast<double>(k) / static_cast<double>(t_steps);
        for (std::size_t l = 0; l < t_steps; ++l) {
          double t2 = window * static_cast<double>(l) / static_cast<double>(t_steps);
          range.samples.push_back(evaluate(a, EvalPoint{Cpx{s1, t1}, Cpx{s2, t2}}));
        }
      }
    }
  }
  return range;
}

template <class S>
ResolventSample<S> resolvent(const Series<S>& a, const S& lambda, const BoxSpec& box,
                             double tol) {
  using Ops = ScalarOps<S>;
  Series<S> shifted = Series<S>::identity().scaled(lambda) - a;
  if (Ops::is_zero(shifted.at(1, 1)))
    throw NotAUnitError("resolvent: lambda equals the (1,1) coefficient, not a unit");
  ResolventSample<S> sample;
  sample.lambda = lambda;
  sample.inverse = invert_formal(shifted, box);
  if constexpr (Ops::exact) {
    sample.residual = 0.0;
  } else {
    Series<S> defect = convolve_truncated(shifted, sample.inverse, box) - Series<S>::identity();
    sample.residual = l1_norm(defect);
    if (sample.residual > tol * (1.0 + l1_norm(sample.inverse))) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3g", sample.residual);
      throw std::domain_error(std::string("resolvent residual ") + buf +
                              " exceeds the requested tolerance");
    }
  }
  return sample;
}

template ResolventSample<RatC> resolvent(const SeriesQ&, const RatC&, const BoxSpec&, double);
template ResolventSample<Cpx> resolvent(const SeriesD&, const Cpx&, const BoxSpec&, double);

Phi Phi::reciprocal() { return Phi(Kind::Reciprocal, {}); }
Phi Phi::exponential() { return Phi(Kind::Exp, {}); }
Phi Phi::log_principal() { return Phi(Kind::LogPrincipal, {}); }
Phi Phi::polynomial(std::vector<Cpx> coefficients) {
  while (!coefficients.empty() && coefficients.back() == Cpx{0.0, 0.0}) coefficients.pop_back();
  return Phi(Kind::Polynomial, std::move(coefficients));
}

Cpx Phi::operator()(Cpx z) const {
  switch (kind_) {
    case Kind::Reciprocal:
      return 1.0 / z;
    case Kind::Exp:
      return std::exp(z);
    case Kind::LogPrincipal:
      return std::log(z);
    case Kind::Polynomial: {
      Cpx r{0.0, 0.0};
      for (std::size_t i = coefficients_.size(); i-- > 0;) r = r * z + coefficients_[i];
      return r;
    }
  }
  return {};
}

void Phi::validate(const ContourSpec& contour) const {
  if (kind_ == Kind::Reciprocal) {
    if (std::abs(contour.center) <= contour.radius * (1.0 + 1e-12))
      throw std::domain_error("reciprocal needs 0 strictly outside the contour disk");
  }
  if (kind_ == Kind::LogPrincipal) {
    // The branch cut is the ray (-inf, 0]; the closed contour disk must miss
    // it. The nearest cut point is the origin when Re(center) > 0.
    double dist = contour.center.real() <= 0.0
                      ? std::abs(contour.center.imag())
                      : std::abs(contour.center);
    if (dist <= contour.radius * (1.0 + 1e-12))
      throw std::domain_error("principal log branch cut crosses the contour disk");
  }
}

std::string Phi::describe() const {
  switch (kind_) {
    case Kind::Reciprocal:
      return "reciprocal";
    case Kind::Exp:
      return "exp";
    case Kind::LogPrincipal:
      return "log";
    case Kind::Polynomial: {
      std::string out = "poly:";
      for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        if (i) out += ",";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g%+.12gi", coefficients_[i].real(),
                      coefficients_[i].imag());
        out += buf;
      }
      return out;
    }
  }
  return {};
}

Phi parse_phi(const std::string& text) {
  if (text == "reciprocal") return Phi::reciprocal();
  if (text == "exp") return Phi::exponential();
  if (text == "log") return Phi::log_principal();
  if (text.rfind("poly:", 0) == 0) {
    std::vector<Cpx> coefficients;
    std::string rest = text.substr(5);
    std::size_t start = 0;
    while (start <= rest.size()) {
      std::size_t at = rest.find(',', start);
      std::string field = rest.substr(start, at == std::string::npos ? at : at - start);
      if (field.empty()) throw std::domain_error("empty polynomial coefficient");
      char* end = nullptr;
      double v = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size())
        throw std::domain_error("malformed polynomial coefficient: " + field);
      coefficients.push_back(Cpx{v, 0.0});
      if (at == std::string::npos) break;
      start = at + 1;
    }
    return Phi::polynomial(std::move(coefficients));
  }
  throw std::domain_error("unknown phi spec: " + text + " (use reciprocal|exp|log|poly:...)");
}

FuncalcResult functional_calculus(const SeriesD& a, const Phi& phi, const ContourSpec& contour,
                                  const BoxSpec& box, const RangeEstimate* range,
                                  const FuncalcOptions& options) {
  if (contour.node_count < 8) throw std::domain_error("contour needs at least 8 nodes");
  if (!(contour.radius > 0.0)) throw std::domain_error("contour radius must be positive");
  std::size_t nodes = contour.node_count;
  if (nodes % 2) ++nodes;  // node halving needs an even count
  phi.validate(contour);

  RangeEstimate computed;
  if (!range) {
    computed = estimate_range(a);
    range = &computed;
  }
  for (Cpx sample : range->samples) {
    if (std::abs(sample - contour.center) > contour.radius * (1.0 - options.margin))
      throw std::domain_error(
          "contour does not enclose the sampled range with the required margin");
  }

  // One truncated resolvent per node, computed in a fixed order; the two
  // trapezoidal sums (full and half node count) reuse the same samples.
  std::vector<SeriesD> node_terms(nodes);
  auto compute_node = [&](std::size_t j) {
    double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nodes);
    Cpx unit = std::polar(1.0, theta);
    Cpx lambda = contour.center + contour.radius * unit;
    ResolventSample<Cpx> rs = resolvent(a, lambda, box, options.resolvent_tol);
    node_terms[j] = rs.inverse.scaled(phi(lambda) * unit);
  };
  std::size_t thread_count = std::max<std::size_t>(1, options.threads);
  if (thread_count == 1) {
    for (std::size_t j = 0; j < nodes; ++j) compute_node(j);
  } else {
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < thread_count; ++t)
      workers.emplace_back([&] {
        for (std::size_t j = next.fetch_add(1); j < nodes; j = next.fetch_add(1)) compute_node(j);
      });
    for (auto& worker : workers) worker.join();
  }

  SeriesD full, half;
  for (std::size_t j = 0; j < nodes; ++j) full = full + node_terms[j];
  for (std::size_t j = 0; j < nodes; j += 2) half = half + node_terms[j];
  full = full.scaled(Cpx{contour.radius / static_cast<double>(nodes), 0.0});
  half = half.scaled(Cpx{2.0 * contour.radius / static_cast<double>(nodes), 0.0});

  FuncalcResult result;
  result.nodes = nodes;
  result.node_halving_error = max_abs_diff(full, half);
  result.value = std::move(full);
  return result;
}

SeriesD apply_polynomial(const SeriesD& a, const std::vector<Cpx>& coefficients,
                         const BoxSpec& box) {
  SeriesD result;
  SeriesD power = SeriesD::identity();
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (k) power = convolve_truncated(power, a, box);
    result = result + power.scaled(coefficients[k]);
  }
  return truncated(result, box);
}

namespace {

double fit_slope_per_doubling(const std::vector<std::uint64_t>& depths,
                              const std::vector<double>& sums) {
  std::size_t count = std::min<std::size_t>(4, sums.size());
  if (count < 2) return 0.0;
  std::size_t start = sums.size() - count;
  // Least squares of partial sum against log2(depth).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = start; i < sums.size(); ++i) {
    double x = std::log2(static_cast<double>(depths[i]));
    double y = sums[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(count);
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace

template <class S>
GrowthReport growth_scan(const Series<S>& a, const Weight& w, double p,
                         const std::vector<std::uint64_t>& depths,
                         const GrowthThresholds& thresholds) {
  if (depths.empty()) throw std::domain_error("growth scan needs at least one depth");
  for (std::size_t i = 1; i < depths.size(); ++i)
    if (depths[i] <= depths[i - 1]) throw std::domain_error("depths must be increasing");
  PNormParams params(p, w);

  GrowthReport report;
  report.depths = depths;
  Series<S> inverse = invert_formal(a, BoxSpec::square(depths.back()));
  for (std::uint64_t depth : depths) {
    double sum = 0.0;
    for (const auto& [idx, v] : inverse.entries()) {
      if (idx.m > depth || idx.n > depth) continue;
      double mod = ScalarOps<S>::abs(v);
      sum += (p == 1.0 ? mod : std::pow(mod, p)) * w(idx.m, idx.n);
    }
    report.partial_sums.push_back(sum);
  }
  report.slope_per_doubling = fit_slope_per_doubling(report.depths, report.partial_sums);
  report.divergent_evidence = report.slope_per_doubling >= thresholds.divergent_slope;
  if (report.partial_sums.size() >= 2) {
    double last_inc = report.partial_sums.back() - report.partial_sums[report.partial_sums.size() - 2];
    report.cauchy_converged = last_inc <= thresholds.cauchy_rel * (1.0 + report.partial_sums.back());
  }
  if (depths.size() < 4)
    report.warnings.push_back("fewer than 4 depths; the slope fit is weak evidence");
  return report;
}

template GrowthReport growth_scan(const SeriesQ&, const Weight&, double,
                                  const std::vector<std::uint64_t>&, const GrowthThresholds&);
template GrowthReport growth_scan(const SeriesD&, const Weight&, double,
                                  const std::vector<std::uint64_t>&, const GrowthThresholds&);

template <class S>
ShrinkSearchReport shrink_weight_search(const Series<S>& a, const Weight& w,
                                        const BoxSpec& check_box, std::vector<double> r_grid,
                                        std::vector<std::uint64_t> depths,
                                        const GrowthThresholds& thresholds) {
  const auto* mfp = std::get_if<Weight::MultiplicativeFromPrimes>(&w.spec());
  if (!mfp)
    throw std::domain_error("shrink search needs a multiplicative-from-primes weight");
  if (r_grid.empty()) throw std::domain_error("shrink search needs a nonempty r grid");

  ShrinkSearchReport report;

  // Locate the prime coordinate with the largest growth; the shrunk weight
  // perturbs exactly that one value.
  double rho = 1.0;
  for (const auto& [i, v] : mfp->first_axis)
    if (v > rho) {
      rho = v;
      report.prime_index = i;
      report.axis = Axis::First;
    }
  for (const auto& [i, v] : mfp->second_axis)
    if (v > rho) {
      rho = v;
      report.prime_index = i;
      report.axis = Axis::Second;
    }
  report.rho = rho;
  if (rho <= 1.0 + 1e-12)
    report.warnings.push_back(
        "weight is admissible at the scanned primes; any r in (1, rho] works");

  SpectralBudget budget;
  budget.grid_resolution = 512;
  budget.random_characters = 512;
  SpectralMinReport spectral = spectral_min_estimate(a, Weight::constant(1.0), budget);
  if (spectral.min_abs < 1e-3) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "spectral minimum estimate %.3g is not bounded away from zero",
                  spectral.min_abs);
    report.warnings.push_back(buf);
  }

  if (depths.empty())
    for (std::uint64_t k = 1; k <= 40; ++k) depths.push_back(std::uint64_t{1} << k);

  std::sort(r_grid.begin(), r_grid.end());
  for (double r : r_grid) {
    if (!(r > 1.0)) {
      report.warnings.push_back("skipping r <= 1 (weights stay >= 1)");
      continue;
    }
    if (r > rho + 1e-12) {
      ShrinkCandidate candidate;
      candidate.r = r;
      candidate.bounded = false;
      candidate.report.warnings.push_back("r exceeds rho; not a shrink of the input weight");
      report.candidates.push_back(std::move(candidate));
      continue;
    }
    std::map<std::uint64_t, double> first, second;
    (report.axis == Axis::First ? first : second)[report.prime_index] = r;
    Weight nu = Weight::multiplicative(std::move(first), std::move(second));
    ShrinkCandidate candidate;
    candidate.r = r;
    candidate.report = growth_scan(a, nu, 1.0, depths, thresholds);
    candidate.bounded = !candidate.report.divergent_evidence;
    if (candidate.bounded && (!report.best_r || r > *report.best_r)) {
      report.best_r = r;
      report.shrunk_weight = nu;
    }
    report.candidates.push_back(std::move(candidate));
  }

  if (report.shrunk_weight) {
    // The selected nu must sit between 1 and w pointwise; scan the check box.
    for (Index2 idx : check_box.enumerate(1u << 16)) {
      double nu_v = (*report.shrunk_weight)(idx.m, idx.n);
      double w_v = w(idx.m, idx.n);
      if (nu_v < 1.0 - 1e-12 || nu_v > w_v * (1.0 + 1e-12)) {
        report.warnings.push_back("selected weight leaves [1, w] at " + index2_to_string(idx));
        break;
      }
    }
  }
  return report;
}

template ShrinkSearchReport shrink_weight_search(const SeriesQ&, const Weight&, const BoxSpec&,
                                                 std::vector<double>, std::vector<std::uint64_t>,
                                                 const GrowthThresholds&);
template ShrinkSearchReport shrink_weight_search(const SeriesD&, const Weight&, const BoxSpec&,
                                                 std::vector<double>, std::vector<std::uint64_t>,
                                                 const GrowthThresholds&);

}  // namespace dirichlet2d
