#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dirichlet2d/calculus.hpp"

using namespace dirichlet2d;

namespace {

RatC rc(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return RatC(q);
}

SeriesD affine_unit() {
  SeriesD a;
  a.set(1, 1, Cpx{2, 0});
  a.set(2, 1, Cpx{1, 0});
  return a;
}

Rat dyadic(long sign, std::uint64_t shift) {
  Rat q(sign);
  q /= Rat(mpz_class(1) << shift);
  return q;
}

}  // namespace

TEST_CASE("resolvents of simple elements") {
  BoxSpec box = BoxSpec::square(std::uint64_t{1} << 20);

  ResolventSample<RatC> at_one = resolvent(SeriesQ{}, RatC(Rat(1)), box);
  CHECK(at_one.inverse == SeriesQ::identity());
  CHECK(at_one.residual == 0.0);

  ResolventSample<RatC> shifted = resolvent(SeriesQ::basis(2, 1), RatC(Rat(2)), box);
  for (std::uint64_t n = 0; n <= 20; ++n)
    CHECK(shifted.inverse.at(std::uint64_t{1} << n, 1) == RatC(dyadic(1, n + 1)));

  SeriesQ a;
  a.set(1, 1, rc(2));
  a.set(2, 1, rc(1));
  ResolventSample<RatC> at_zero = resolvent(a, RatC(Rat(0)), box);
  for (std::uint64_t n = 0; n <= 20; ++n)
    CHECK(at_zero.inverse.at(std::uint64_t{1} << n, 1) == RatC(dyadic(n % 2 == 0 ? -1 : 1, n + 1)));

  CHECK_THROWS_AS(resolvent(a, RatC(Rat(2)), box), NotAUnitError);
}

TEST_CASE("resolvent identity holds exactly in rational mode") {
  BoxSpec box = BoxSpec::square(64);
  SeriesQ a;
  a.set(1, 1, rc(1, 2));
  a.set(2, 1, rc(1, 3));
  a.set(3, 2, rc(-2, 5));
  RatC lambda(Rat(3)), mu(Rat(-2), Rat(1, 2));
  SeriesQ p_lambda = resolvent(a, lambda, box).inverse;
  SeriesQ p_mu = resolvent(a, mu, box).inverse;
  SeriesQ lhs = p_lambda - p_mu;
  SeriesQ rhs = convolve_truncated(p_lambda, p_mu, box).scaled(mu - lambda);
  CHECK(truncated(lhs, box) == rhs);
}

TEST_CASE("range estimates stay within the norm disk") {
  SeriesD a = affine_unit();
  RangeEstimate range = estimate_range(a);
  CHECK(range.norm_radius == 3.0);
  for (Cpx sample : range.samples) {
    CHECK(std::abs(sample) <= range.norm_radius * (1.0 + 1e-12));
    // This element maps into the disk of radius 1 around 2.
    CHECK(std::abs(sample - Cpx{2, 0}) <= 1.0 + 1e-12);
  }
}

TEST_CASE("contour calculus golden cases") {
  SeriesD a = affine_unit();
  BoxSpec box = BoxSpec::square(64);
  ContourSpec contour{Cpx{2, 0}, 1.5, 256};

  FuncalcResult identity =
      functional_calculus(a, Phi::polynomial({Cpx{0, 0}, Cpx{1, 0}}), contour, box);
  CHECK(max_abs_diff(identity.value, a) <= 1e-8);

  FuncalcResult reciprocal = functional_calculus(a, Phi::reciprocal(), contour, box);
  SeriesD direct = invert_formal(a, box);
  CHECK(max_abs_diff(reciprocal.value, direct) <= 1e-8);

  FuncalcResult constant =
      functional_calculus(a, Phi::polynomial({Cpx{1, 0}}), contour, box);
  CHECK(max_abs_diff(constant.value, SeriesD::identity()) <= 1e-10);
}

TEST_CASE("polynomials through the contour match direct algebra evaluation") {
  SeriesD a = affine_unit();
  BoxSpec box = BoxSpec::square(64);
  ContourSpec contour{Cpx{2.5, 0}, 2.0, 256};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int degree = 0; degree <= 3; ++degree) {
    std::vector<Cpx> coefficients;
    for (int k = 0; k <= degree; ++k) coefficients.push_back(Cpx{coef(rng), coef(rng)});
    FuncalcResult through = functional_calculus(a, Phi::polynomial(coefficients), contour, box);
    SeriesD direct = apply_polynomial(a, coefficients, box);
    CHECK(max_abs_diff(through.value, direct) <= 1e-7);
  }
}

TEST_CASE("node doubling shrinks the halving estimate") {
  SeriesD a = affine_unit();
  BoxSpec box = BoxSpec::square(64);
  // Keep the center off the (1,1) coefficient so the integrand carries real
  // trapezoidal error down to rounding.
  for (const Phi& phi : {Phi::polynomial({Cpx{0, 0}, Cpx{1, 0}}), Phi::reciprocal(),
                         Phi::polynomial({Cpx{1, 0}})}) {
    ContourSpec c32{Cpx{2.5, 0}, 2.0, 32};
    ContourSpec c64{Cpx{2.5, 0}, 2.0, 64};
    ContourSpec c128{Cpx{2.5, 0}, 2.0, 128};
    double e32 = functional_calculus(a, phi, c32, box).node_halving_error;
    double e64 = functional_calculus(a, phi, c64, box).node_halving_error;
    double e128 = functional_calculus(a, phi, c128, box).node_halving_error;
    CHECK(e64 < e32);
    CHECK(e128 < e64);
  }
}

TEST_CASE("exp and log against closed forms") {
  BoxSpec box = BoxSpec::square(64);

  SeriesD scalar;
  scalar.set(1, 1, Cpx{0.3, 0});
  ContourSpec around{Cpx{0.3, 0}, 0.5, 128};
  FuncalcResult exp_result = functional_calculus(scalar, Phi::exponential(), around, box);
  CHECK(max_abs_diff(exp_result.value, SeriesD::identity().scaled(std::exp(Cpx{0.3, 0}))) <= 1e-10);

  // exp(2 + x) = e^2 * sum x^k / k! with x the (2,1) basis element.
  SeriesD affine = affine_unit();
  FuncalcResult exp_affine =
      functional_calculus(affine, Phi::exponential(), ContourSpec{Cpx{2, 0}, 1.5, 256}, box);
  double factorial = 1.0;
  for (std::uint64_t k = 0; k <= 6; ++k) {
    if (k) factorial *= static_cast<double>(k);
    double expected = std::exp(2.0) / factorial;
    CHECK(std::abs(exp_affine.value.at(std::uint64_t{1} << k, 1) - Cpx{expected, 0}) <= 1e-8);
  }

  SeriesD a;
  a.set(1, 1, Cpx{2, 0});
  a.set(2, 1, Cpx{0.5, 0});
  ContourSpec contour{Cpx{2, 0}, 1.0, 256};
  FuncalcResult log_result = functional_calculus(a, Phi::log_principal(), contour, box);
  // log(2 + x/2) = log 2 + sum (-1)^(k+1) (x/4)^k / k at x = the (2,1) basis
  CHECK(std::abs(log_result.value.at(1, 1) - Cpx{std::log(2.0), 0}) <= 1e-9);
  for (std::uint64_t k = 1; k <= 6; ++k) {
    double expected = (k % 2 ? 1.0 : -1.0) * std::pow(0.25, static_cast<double>(k)) /
                      static_cast<double>(k);
    CHECK(std::abs(log_result.value.at(std::uint64_t{1} << k, 1) - Cpx{expected, 0}) <= 1e-9);
  }
}

TEST_CASE("contour domain checks") {
  SeriesD a = affine_unit();
  BoxSpec box = BoxSpec::square(16);
  // Too small: range samples spill outside.
  CHECK_THROWS_AS(
      functional_calculus(a, Phi::polynomial({Cpx{1, 0}}), ContourSpec{Cpx{2, 0}, 0.5, 64}, box),
      std::domain_error);
  // Reciprocal needs 0 outside the disk.
  CHECK_THROWS_AS(
      functional_calculus(a, Phi::reciprocal(), ContourSpec{Cpx{2, 0}, 2.5, 64}, box),
      std::domain_error);
  // The log branch cut must not cross the disk.
  CHECK_THROWS_AS(
      functional_calculus(a, Phi::log_principal(), ContourSpec{Cpx{2, 0}, 2.5, 64}, box),
      std::domain_error);
  CHECK_THROWS_AS(parse_phi("tan"), std::domain_error);
  CHECK(parse_phi("poly:1,0,2").coefficients().size() == 3);
}

TEST_CASE("threaded contour sums are bit-identical") {
  SeriesD a = affine_unit();
  BoxSpec box = BoxSpec::square(64);
  ContourSpec contour{Cpx{2, 0}, 1.5, 128};
  FuncalcOptions serial;
  FuncalcOptions parallel;
  parallel.threads = 4;
  SeriesD lhs = functional_calculus(a, Phi::reciprocal(), contour, box, nullptr, serial).value;
  SeriesD rhs = functional_calculus(a, Phi::reciprocal(), contour, box, nullptr, parallel).value;
  CHECK(lhs == rhs);
}

TEST_CASE("growth scans classify the golden series") {
  SeriesQ a;
  a.set(1, 1, rc(2));
  a.set(2, 1, rc(1));
  std::vector<std::uint64_t> depths;
  for (std::uint64_t k = 1; k <= 40; ++k) depths.push_back(std::uint64_t{1} << k);

  GrowthReport dyadic = growth_scan(a, Weight::two_adic(), 1.0, depths);
  for (std::size_t i = 0; i < depths.size(); ++i)
    CHECK(dyadic.partial_sums[i] == static_cast<double>(i + 1) + 1.0);
  CHECK(dyadic.divergent_evidence);
  CHECK(dyadic.slope_per_doubling == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(dyadic.cauchy_converged);

  GrowthReport flat = growth_scan(a, Weight::constant(1.0), 1.0, depths);
  for (std::size_t i = 0; i < depths.size(); ++i) {
    double expected = 1.0 - std::ldexp(1.0, -static_cast<int>(i) - 2);
    CHECK(flat.partial_sums[i] == doctest::Approx(expected).epsilon(1e-15));
  }
  CHECK_FALSE(flat.divergent_evidence);
  CHECK(flat.cauchy_converged);

  GrowthReport unit = growth_scan(SeriesQ::identity(), Weight::constant(1.0), 1.0, depths);
  for (double sum : unit.partial_sums) CHECK(sum == 1.0);
  CHECK_FALSE(unit.divergent_evidence);

  CHECK_THROWS_AS(growth_scan(a, Weight::constant(1.0), 1.0, {8, 4}), std::domain_error);
}

TEST_CASE("growth scan partial sums are nondecreasing") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<std::uint64_t> index(1, 24);
  std::vector<std::uint64_t> depths{2, 4, 8, 16, 32};
  for (int trial = 0; trial < 10; ++trial) {
    SeriesD a = SeriesD::identity();
    for (int i = 0; i < 5; ++i) a.set(index(rng), index(rng), Cpx{coef(rng), coef(rng)});
    for (double p : {1.0, 0.5}) {
      GrowthReport report = growth_scan(a, Weight::two_adic(), p, depths);
      for (std::size_t i = 1; i < report.partial_sums.size(); ++i)
        CHECK(report.partial_sums[i] >= report.partial_sums[i - 1]);
    }
  }
  SeriesD non_unit;
  non_unit.set(2, 1, Cpx{1, 0});
  CHECK_THROWS_AS(growth_scan(non_unit, Weight::constant(1.0), 1.0, depths), NotAUnitError);
}

TEST_CASE("shrink search warns when nothing needs shrinking") {
  // An admissible multiplicative weight leaves rho at 1; candidates exceed it.
  Weight w = Weight::multiplicative({}, {});
  SeriesQ a;
  a.set(1, 1, rc(2));
  ShrinkSearchReport report = shrink_weight_search(a, w, BoxSpec::square(8), {1.5});
  CHECK_FALSE(report.best_r.has_value());
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("growth thresholds are configurable") {
  SeriesQ a;
  a.set(1, 1, rc(2));
  a.set(2, 1, rc(1));
  std::vector<std::uint64_t> depths{2, 4, 8, 16, 32};
  GrowthThresholds strict;
  strict.divergent_slope = 2.0;  // nothing reaches a slope of 2 per doubling
  CHECK_FALSE(growth_scan(a, Weight::two_adic(), 1.0, depths, strict).divergent_evidence);
}

TEST_CASE("shrink search picks the largest bounded r") {
  Weight w = Weight::multiplicative({{1, 3.0}}, {});
  std::vector<double> grid{1.25, 1.5, 1.75, 1.9, 2.5};

  SeriesQ decaying;
  decaying.set(1, 1, rc(2));
  decaying.set(2, 1, rc(-1));
  ShrinkSearchReport report =
      shrink_weight_search(decaying, w, BoxSpec::square(64), grid);
  CHECK(report.prime_index == 1);
  CHECK(report.axis == Axis::First);
  CHECK(report.rho == 3.0);
  REQUIRE(report.best_r.has_value());
  CHECK(*report.best_r == 1.9);
  for (const ShrinkCandidate& candidate : report.candidates)
    CHECK(candidate.bounded == (candidate.r < 2.0));

  SeriesQ alternating;
  alternating.set(1, 1, rc(2));
  alternating.set(2, 1, rc(1));
  ShrinkSearchReport report2 =
      shrink_weight_search(alternating, w, BoxSpec::square(64), grid);
  REQUIRE(report2.best_r.has_value());
  CHECK(*report2.best_r == 1.9);

  // The selected weight lies between 1 and w and is not constant.
  REQUIRE(report2.shrunk_weight.has_value());
  const Weight& nu = *report2.shrunk_weight;
  CHECK_FALSE(nu.is_constant());
  for (Index2 idx : BoxSpec::square(64).enumerate()) {
    CHECK(nu(idx.m, idx.n) >= 1.0 - 1e-12);
    CHECK(nu(idx.m, idx.n) <= w(idx.m, idx.n) * (1.0 + 1e-12));
  }

  ShrinkSearchReport trivial = shrink_weight_search(SeriesQ::identity(), w, BoxSpec::square(8), grid);
  REQUIRE(trivial.best_r.has_value());
  CHECK(*trivial.best_r == 2.5);  // everything is bounded; the grid maximum wins

  CHECK_THROWS_AS(shrink_weight_search(decaying, Weight::two_adic(), BoxSpec::square(8), grid),
                  std::domain_error);
}
