#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dirichlet2d/weights.hpp"

using namespace dirichlet2d;

namespace {

Weight mfp_first(std::uint64_t index, double value) {
  return Weight::multiplicative({{index, value}}, {});
}

// Brute-force almost-monotone constant: max ratio over all pairs in the box
// related by divisibility in either coordinate.
double oracle_monotone_constant(const Weight& w, std::uint64_t bound) {
  double best = 1.0;
  for (std::uint64_t m1 = 1; m1 <= bound; ++m1)
    for (std::uint64_t n1 = 1; n1 <= bound; ++n1)
      for (std::uint64_t m2 = 1; m2 <= bound; ++m2)
        for (std::uint64_t n2 = 1; n2 <= bound; ++n2) {
          if (m2 % m1 != 0 && n2 % n1 != 0) continue;
          best = std::max(best, w(m1, n1) / w(m2, n2));
        }
  return best;
}

}  // namespace

TEST_CASE("weight evaluation follows the specs") {
  CHECK(Weight::constant(1.0)(5, 7) == 1.0);
  CHECK(Weight::two_adic()(8, 1) == 16.0);
  CHECK(Weight::two_adic()(1, 1) == 2.0);
  CHECK(Weight::two_adic()(2, 4) == 16.0);
  CHECK(mfp_first(1, 3.0)(4, 9) == 9.0);
  CHECK(Weight::axis_power(1.0, 0.0)(6, 11) == 6.0);
  CHECK(Weight::log_product()(1, 1) == 1.0);
  Weight t = Weight::table({{{2, 3}, 5.0}});
  CHECK(t(2, 3) == 5.0);
  CHECK(t(1000, 1000) == 1.0);  // off the table: default 1, never an error
  CHECK_THROWS_AS(Weight::constant(0.5), std::domain_error);
  CHECK_THROWS_AS(Weight::table({{{2, 3}, 0.5}}), std::domain_error);
}

TEST_CASE("exact values are available for the dyadic and integral specs") {
  CHECK(*Weight::two_adic().exact_value(8, 1) == Rat(16));
  CHECK(*Weight::constant(5).exact_value(10, 10) == Rat(5));
  CHECK(*Weight::axis_power(1, 0).exact_value(6, 11) == Rat(6));
  CHECK_FALSE(Weight::axis_power(0.5, 0).exact_value(6, 11).has_value());
  std::uint64_t big = std::uint64_t{1} << 40;
  Rat expect(mpz_class(1) << 41);
  CHECK(*Weight::two_adic().exact_value(big, 1) == expect);
}

TEST_CASE("growth profiles match the closed forms") {
  GrowthProfile flat = growth_profile(Weight::constant(1.0), 3, Axis::First, 20);
  for (double est : flat.estimates) CHECK(est == 1.0);
  CHECK(flat.inf_estimate == 1.0);

  GrowthProfile ap = growth_profile(Weight::axis_power(1.0, 0.0), 1, Axis::First, 30);
  for (double est : ap.estimates) CHECK(est == 2.0);
  CHECK(ap.inf_estimate == 2.0);
  GrowthProfile ap2 = growth_profile(Weight::axis_power(1.0, 0.0), 1, Axis::Second, 30);
  CHECK(ap2.inf_estimate == 1.0);

  GrowthProfile dy = growth_profile(Weight::two_adic(), 1, Axis::First, 40);
  for (std::size_t n = 1; n <= 40; ++n) {
    double expected = std::exp2((static_cast<double>(n) + 1.0) / static_cast<double>(n));
    CHECK(dy.estimates[n - 1] == doctest::Approx(expected).epsilon(1e-14));
    if (n > 1) CHECK(dy.estimates[n - 1] < dy.estimates[n - 2]);
  }
  CHECK(dy.inf_estimate == doctest::Approx(2.0).epsilon(0.05));

  GrowthProfile mfp = growth_profile(mfp_first(1, 1.7), 1, Axis::First, 10);
  for (double est : mfp.estimates) CHECK(est == 1.7);

  // The infimum estimate is a running minimum: nonincreasing in the depth.
  double prev = growth_profile(Weight::two_adic(), 1, Axis::First, 1).inf_estimate;
  for (std::uint64_t depth = 2; depth <= 40; ++depth) {
    double cur = growth_profile(Weight::two_adic(), 1, Axis::First, depth).inf_estimate;
    CHECK(cur <= prev);
    prev = cur;
  }

  // Constant(c): the root sequence is c^(1/n) exactly.
  GrowthProfile c5 = growth_profile(Weight::constant(5.0), 1, Axis::First, 60);
  for (std::size_t n = 1; n <= 60; ++n)
    CHECK(c5.estimates[n - 1] ==
          doctest::Approx(std::pow(5.0, 1.0 / static_cast<double>(n))).epsilon(1e-3));
}

TEST_CASE("table weights fall back to the off-box default at huge prime powers") {
  // omega(2^100, 1) never materializes an integer; the table defaults to 1.
  Weight t = Weight::table({{{8, 1}, 4.0}});
  GrowthProfile profile = growth_profile(t, 1, Axis::First, 100);
  CHECK(profile.estimates[2] == doctest::Approx(std::pow(4.0, 1.0 / 3.0)));
  CHECK(profile.estimates[99] == 1.0);
  CHECK(profile.inf_estimate == 1.0);
}

TEST_CASE("admissibility is a finite-evidence verdict") {
  AdmissibilityReport c1 = is_admissible(Weight::constant(1.0));
  CHECK(c1.admissible);

  // Constant(5) needs enough depth before the root infimum reaches 1 + tol.
  AdmissibilityReport c5 = is_admissible(Weight::constant(5.0), 4, 2000, 1e-3);
  CHECK(c5.admissible);
  AdmissibilityReport c5_shallow = is_admissible(Weight::constant(5.0), 4, 48, 1e-6);
  CHECK_FALSE(c5_shallow.admissible);

  // omega(m,n) = m grows at every prime: the largest infimum over the first
  // four primes is p_4 = 7, the first witness is rho_1 = 2.
  AdmissibilityReport ap = is_admissible(Weight::axis_power(1.0, 0.0), 4, 2000, 1e-3);
  CHECK_FALSE(ap.admissible);
  CHECK(ap.worst_inf == 7.0);
  CHECK(ap.worst_prime_index == 4);
  REQUIRE(ap.witness_prime_index.has_value());
  CHECK(*ap.witness_prime_index == 1);
  CHECK(ap.witness_axis == Axis::First);
  CHECK(ap.witness_inf == 2.0);

  AdmissibilityReport mfp = is_admissible(mfp_first(1, 1.7), 4, 2000, 1e-3);
  CHECK_FALSE(mfp.admissible);
  CHECK(mfp.worst_inf == 1.7);

  // Consistency with the profiles it reports: the verdict is exactly
  // "every profile infimum within tol of 1".
  for (const AdmissibilityReport& report : {c5, c5_shallow, ap, mfp}) {
    bool reconstructed = true;
    for (const GrowthProfile& profile : report.profiles) {
      double inf = profile.estimates.front();
      for (double est : profile.estimates) inf = std::min(inf, est);
      CHECK(profile.inf_estimate == inf);
      reconstructed = reconstructed && inf <= 1.0 + report.tol;
    }
    CHECK(report.admissible == reconstructed);
  }
}

TEST_CASE("almost-monotone verdicts and scan constants") {
  AlmostMonotoneReport c1 = is_almost_monotone(Weight::constant(1.0), BoxSpec::square(8));
  CHECK(c1.verdict == MonotoneVerdict::Admissible);

  Weight dy = Weight::two_adic();
  AlmostMonotoneReport dyr = is_almost_monotone(dy, BoxSpec::square(16));
  CHECK(dyr.verdict == MonotoneVerdict::MonotoneWithConstant);
  CHECK(dyr.constant == doctest::Approx(oracle_monotone_constant(dy, 16)).epsilon(1e-12));

  Weight m2 = mfp_first(1, 2.0);
  AlmostMonotoneReport m2r = is_almost_monotone(m2, BoxSpec::square(16));
  CHECK(m2r.verdict == MonotoneVerdict::MonotoneWithConstant);
  CHECK(m2r.constant == doctest::Approx(oracle_monotone_constant(m2, 16)).epsilon(1e-12));

  AlmostMonotoneOptions strict;
  strict.require_constant = 1.0;
  AlmostMonotoneReport violated = is_almost_monotone(dy, BoxSpec::square(16), strict);
  CHECK(violated.verdict == MonotoneVerdict::Violated);
  REQUIRE(violated.witness.has_value());
  auto [from, to] = *violated.witness;
  CHECK(dy(from.m, from.n) / dy(to.m, to.n) == doctest::Approx(violated.witness_ratio));
  CHECK(violated.witness_ratio > 1.0);
}

TEST_CASE("Beurling-Domar partial sums") {
  BeurlingDomarReport zero = beurling_domar_partial(Weight::constant(1.0), 2, 3, 1000);
  CHECK(zero.partial_sum == 0.0);
  CHECK(zero.convergent_evidence);
  CHECK(zero.tail_bound == 0.0);

  // omega = m: terms are n log 2 / (1 + n^2) along (2,1); harmonic growth.
  Weight ap = Weight::axis_power(1.0, 0.0);
  BeurlingDomarReport div = beurling_domar_partial(ap, 2, 1, 10000);
  double oracle = 0.0;
  for (std::uint64_t n = 1; n <= 10000; ++n)
    oracle += static_cast<double>(n) * std::log(2.0) /
              (1.0 + static_cast<double>(n) * static_cast<double>(n));
  CHECK(div.partial_sum == doctest::Approx(oracle).epsilon(1e-12));
  CHECK_FALSE(div.convergent_evidence);
  CHECK(std::isinf(div.tail_bound));
  // The same weight along (1,2) is constant 1: nothing diverges.
  CHECK(beurling_domar_partial(ap, 1, 2, 10000).convergent_evidence);

  Weight lp = Weight::log_product();
  BeurlingDomarReport shallow = beurling_domar_partial(lp, 2, 3, 10000);
  BeurlingDomarReport deep = beurling_domar_partial(lp, 2, 3, 100000);
  CHECK(shallow.convergent_evidence);
  CHECK(deep.convergent_evidence);
  CHECK(std::abs(deep.partial_sum - shallow.partial_sum) <= 1e-2);
}

TEST_CASE("pointwise minimum of weights") {
  Weight c = min_weight({Weight::constant(3.0), Weight::constant(2.0)});
  CHECK(std::get_if<Weight::Constant>(&c.spec())->value == 2.0);

  Weight m = min_weight({mfp_first(1, 1.5), mfp_first(1, 1.2)});
  const auto* spec = std::get_if<Weight::MultiplicativeFromPrimes>(&m.spec());
  REQUIRE(spec != nullptr);
  CHECK(spec->first_axis.at(1) == 1.2);

  // Disjoint prime values: min(v, 1) = 1, so the merged spec drops them.
  Weight disjoint = min_weight({mfp_first(1, 2.0), mfp_first(2, 2.0)});
  const auto* dspec = std::get_if<Weight::MultiplicativeFromPrimes>(&disjoint.spec());
  REQUIRE(dspec != nullptr);
  CHECK(dspec->first_axis.empty());

  Weight one = min_weight({Weight::two_adic(), Weight::constant(1.0)});
  for (std::uint64_t m1 = 1; m1 <= 16; ++m1)
    for (std::uint64_t n1 = 1; n1 <= 16; ++n1) CHECK(one(m1, n1) == 1.0);

  Weight mixed = min_weight({Weight::two_adic(), Weight::axis_power(1, 0)});
  for (std::uint64_t m1 = 1; m1 <= 16; ++m1)
    for (std::uint64_t n1 = 1; n1 <= 16; ++n1) {
      double v = mixed(m1, n1);
      CHECK(v >= 1.0);
      CHECK(v <= Weight::two_adic()(m1, n1));
      CHECK(v <= Weight::axis_power(1, 0)(m1, n1));
    }
  CHECK_THROWS_AS(min_weight({}), std::domain_error);
}

TEST_CASE("submultiplicativity scans") {
  for (const Weight& w :
       {Weight::constant(3.0), Weight::two_adic(), Weight::axis_power(1.0, 0.5),
        mfp_first(1, 2.5), Weight::log_product(),
        min_weight({Weight::two_adic(), Weight::constant(4.0)})}) {
    SubmultReport report = check_submultiplicative(w, BoxSpec::square(32));
    CHECK(report.holds);
  }
  // A table with a spike at (4,1) but small values at (2,1) violates it.
  Weight bad = Weight::table({{{4, 1}, 100.0}});
  SubmultReport report = check_submultiplicative(bad, BoxSpec::square(8));
  CHECK_FALSE(report.holds);
  CHECK(report.table_partial);
  CHECK(report.worst_excess > 1.0);
}

TEST_CASE("weight spec mini-language") {
  CHECK(parse_weight("const:2.5")(3, 3) == 2.5);
  CHECK(parse_weight("twoadic")(8, 1) == 16.0);
  CHECK(parse_weight("axispow:1,0")(6, 5) == 6.0);
  CHECK(parse_weight("logprod")(1, 1) == 1.0);
  CHECK(parse_weight("min(const:3,const:2)")(9, 9) == 2.0);
  CHECK(parse_weight("min(twoadic,const:1)")(8, 8) == 1.0);
  CHECK(parse_weight(" min( const:3 , twoadic )")(1, 1) == 2.0);

  CHECK_THROWS_AS(parse_weight("const:"), WeightParseError);
  CHECK_THROWS_AS(parse_weight("nope"), WeightParseError);
  CHECK_THROWS_AS(parse_weight("min(const:2"), WeightParseError);
  CHECK_THROWS_AS(parse_weight("const:2 trailing"), WeightParseError);
  try {
    parse_weight("min(const:2,nope)");
    CHECK(false);
  } catch (const WeightParseError& e) {
    CHECK(e.position == 12);
  }

  std::string path = "mfp_test_weight.txt";
  {
    std::ofstream out(path);
    out << "# axis index value\n1 1 3.0\n2 2 1.5\n";
  }
  Weight w = parse_weight("mfp:" + path);
  CHECK(w(4, 1) == 9.0);
  CHECK(w(1, 9) == 2.25);
  CHECK(w(4, 9) == 20.25);
  std::remove(path.c_str());
}
