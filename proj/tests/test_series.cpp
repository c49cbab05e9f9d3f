#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dirichlet2d/series.hpp"
#include "dirichlet2d/series_io.hpp"

using namespace dirichlet2d;

namespace {

Rat make_rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

RatC rc(long num, long den = 1) { return RatC(make_rat(num, den)); }

SeriesQ geometric_unit(long c0, long c1) {
  // c0 + c1 * 2^{-s1}
  SeriesQ a;
  a.set(1, 1, rc(c0));
  a.set(2, 1, rc(c1));
  return a;
}

SeriesQ random_table(std::mt19937_64& rng, std::size_t max_support = 20,
                     std::uint64_t max_index = 64) {
  std::uniform_int_distribution<std::uint64_t> index(1, max_index);
  std::uniform_int_distribution<long> numer(-9, 9);
  std::uniform_int_distribution<long> denom(1, 9);
  std::uniform_int_distribution<std::size_t> count(1, max_support);
  SeriesQ a;
  std::size_t entries = count(rng);
  for (std::size_t i = 0; i < entries; ++i)
    a.set(index(rng), index(rng),
          RatC(make_rat(numer(rng), denom(rng)), make_rat(numer(rng), denom(rng))));
  return a;
}

// Brute-force convolution over explicit index pairs; independent of the
// map-based implementation's accumulate path.
SeriesQ oracle_convolve(const SeriesQ& a, const SeriesQ& b) {
  SeriesQ::Map out;
  for (const auto& [ia, va] : a.entries())
    for (const auto& [ib, vb] : b.entries()) {
      Index2 idx{ia.m * ib.m, ia.n * ib.n};
      auto it = out.find(idx);
      if (it == out.end())
        out.emplace(idx, va * vb);
      else
        it->second += va * vb;
    }
  return SeriesQ(std::move(out));
}

}  // namespace

TEST_CASE("basis convolution") {
  CHECK(convolve(SeriesQ::basis(2, 1), SeriesQ::basis(1, 3)) == SeriesQ::basis(2, 3));
  SeriesQ a;
  a.set(2, 1, rc(1));
  a.set(1, 3, rc(1));
  SeriesQ expected;
  expected.set(4, 1, rc(1));
  expected.set(2, 3, rc(1));
  CHECK(convolve(a, SeriesQ::basis(2, 1)) == expected);
}

TEST_CASE("convolution prunes exact cancellations") {
  SeriesQ a = geometric_unit(2, 1);
  SeriesQ b;
  b.set(1, 1, rc(1, 2));
  b.set(2, 1, rc(-1, 4));
  b.set(4, 1, rc(1, 8));
  SeriesQ expected;
  expected.set(1, 1, rc(1));
  expected.set(8, 1, rc(1, 8));
  CHECK(convolve(a, b) == expected);
  CHECK(convolve(a, b) == oracle_convolve(a, b));
}

TEST_CASE("ring axioms hold exactly on random tables") {
  std::mt19937_64 rng(2024);
  SeriesQ unit = SeriesQ::identity();
  for (int trial = 0; trial < 25; ++trial) {
    SeriesQ a = random_table(rng);
    SeriesQ b = random_table(rng);
    SeriesQ c = random_table(rng);
    CHECK(convolve(a, b) == convolve(b, a));
    CHECK(convolve(convolve(a, b), c) == convolve(a, convolve(b, c)));
    CHECK(convolve(a, b + c) == convolve(a, b) + convolve(a, c));
    CHECK(convolve(a, unit) == a);
    CHECK(convolve(a, b) == oracle_convolve(a, b));
  }
}

TEST_CASE("formal inversion on boxes") {
  BoxSpec box = BoxSpec::square(std::uint64_t{1} << 40);
  CHECK(invert_formal(SeriesQ::identity(), box) == SeriesQ::identity());

  // 2 + 2^{-s1}: alternating dyadic coefficients on the first axis.
  SeriesQ a = geometric_unit(2, 1);
  SeriesQ inv = invert_formal(a, box);
  CHECK(inv.support_size() == 41);
  for (std::uint64_t n = 0; n <= 40; ++n) {
    Rat expected(n % 2 == 0 ? 1 : -1, 1);
    expected /= Rat(mpz_class(1) << (n + 1));
    CHECK(inv.at(std::uint64_t{1} << n, 1) == RatC(expected));
  }

  // 2 - 2^{-s1}: plain geometric coefficients.
  SeriesQ g = geometric_unit(2, -1);
  SeriesQ ginv = invert_formal(g, box);
  for (std::uint64_t n = 0; n <= 40; ++n) {
    Rat expected(1);
    expected /= Rat(mpz_class(1) << (n + 1));
    CHECK(ginv.at(std::uint64_t{1} << n, 1) == RatC(expected));
  }

  SeriesQ zero_unit;
  zero_unit.set(2, 1, rc(5));
  CHECK_THROWS_AS(invert_formal(zero_unit, box), NotAUnitError);
}

TEST_CASE("inversion is exact against truncated convolution") {
  std::mt19937_64 rng(99);
  BoxSpec box = BoxSpec::square(64);
  for (int trial = 0; trial < 20; ++trial) {
    SeriesQ a = random_table(rng);
    if (a.at(1, 1).is_zero()) a.set(1, 1, rc(3, 2));
    SeriesQ inv = invert_formal(a, box);
    CHECK(convolve_truncated(a, inv, box) == SeriesQ::identity());
  }

  // Same contract on a non-square explicit box.
  BoxSpec jagged = BoxSpec::explicit_set({{12, 4}, {5, 9}, {8, 1}});
  std::mt19937_64 rng2(7);
  for (int trial = 0; trial < 10; ++trial) {
    SeriesQ a = random_table(rng2, 8, 12);
    if (a.at(1, 1).is_zero()) a.set(1, 1, rc(-2));
    SeriesQ inv = invert_formal(a, jagged);
    CHECK(convolve_truncated(a, inv, jagged) == SeriesQ::identity());
    for (const auto& [idx, v] : inv.entries()) CHECK(jagged.contains(idx));
  }

  // Inversion on the second axis mirrors the first.
  SeriesQ second_axis;
  second_axis.set(1, 1, rc(2));
  second_axis.set(1, 3, rc(1));
  SeriesQ inv2 = invert_formal(second_axis, BoxSpec::square(3486784401ull));  // 3^20
  Rat expected(-1);
  expected /= Rat(mpz_class(1) << 8);
  CHECK(inv2.at(1, 2187) == RatC(expected));  // 3^7
}

TEST_CASE("weighted p-norms") {
  PNormParams l1;
  CHECK(weighted_p_norm(SeriesQ::identity(), l1) == 1.0);
  CHECK(weighted_p_norm(SeriesD::identity(), l1) == 1.0);

  SeriesQ two;
  two.set(1, 1, rc(2));
  CHECK(weighted_p_norm(two, PNormParams(0.5, Weight::constant(1.0))) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(PNormParams(0.0, Weight::constant(1.0)), std::domain_error);
  CHECK_THROWS_AS(PNormParams(1.5, Weight::constant(1.0)), std::domain_error);

  // Partial norms of the truncated inverse of 2 + 2^{-s1}: the plain l1 mass
  // approaches 1 while the dyadic weight turns every term into exactly 1.
  SeriesQ inv = invert_formal(geometric_unit(2, 1), BoxSpec::square(std::uint64_t{1} << 40));
  for (std::uint64_t depth : {std::uint64_t{4}, std::uint64_t{10}, std::uint64_t{40}}) {
    SeriesQ part = truncated(inv, BoxSpec::square(std::uint64_t{1} << depth));
    Rat l1_exact = weighted_l1_norm_exact(part, Weight::constant(1.0));
    Rat tail(1);
    tail /= Rat(mpz_class(1) << (depth + 1));
    CHECK(l1_exact == 1 - tail);
    Rat dyadic = weighted_l1_norm_exact(part, Weight::two_adic());
    CHECK(dyadic == Rat(static_cast<long>(depth) + 1));
  }

  SeriesQ complex_entries;
  complex_entries.set(1, 1, RatC(Rat(1), Rat(1)));
  CHECK_THROWS_AS(weighted_l1_norm_exact(complex_entries, Weight::constant(1.0)),
                  std::domain_error);
}

TEST_CASE("norm submultiplicativity for p in {1, 1/2}") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<std::uint64_t> index(1, 32);
  Weight w = Weight::two_adic();
  for (double p : {1.0, 0.5}) {
    PNormParams params(p, w);
    for (int trial = 0; trial < 40; ++trial) {
      SeriesD a, b;
      for (int i = 0; i < 8; ++i) {
        a.set(index(rng), index(rng), Cpx{coef(rng), coef(rng)});
        b.set(index(rng), index(rng), Cpx{coef(rng), coef(rng)});
      }
      double lhs = weighted_p_norm(convolve(a, b), params);
      double rhs = weighted_p_norm(a, params) * weighted_p_norm(b, params);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("evaluation on the closed right half-plane squared") {
  CHECK(evaluate(SeriesD::identity(), EvalPoint{Cpx{3, -7}, Cpx{0, 2}}) == Cpx{1.0, 0.0});

  SeriesD a;
  a.set(1, 1, Cpx{2, 0});
  a.set(2, 1, Cpx{1, 0});
  CHECK(evaluate(a, EvalPoint{Cpx{0, 0}, Cpx{0, 0}}) == Cpx{3.0, 0.0});
  double t = std::numbers::pi / std::log(2.0);
  CHECK(std::abs(evaluate(a, EvalPoint{Cpx{0, t}, Cpx{0, 0}})) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(EvalPoint(Cpx{-0.1, 0}, Cpx{0, 0}), std::domain_error);

  // |a(s)| <= l1 norm, and evaluation is multiplicative on products.
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> sigma(0.0, 3.0);
  std::uniform_real_distribution<double> tpart(-20.0, 20.0);
  std::uniform_int_distribution<std::uint64_t> index(1, 64);
  for (int trial = 0; trial < 50; ++trial) {
    SeriesD x, y;
    for (int i = 0; i < 6; ++i) {
      x.set(index(rng), index(rng), Cpx{coef(rng), coef(rng)});
      y.set(index(rng), index(rng), Cpx{coef(rng), coef(rng)});
    }
    EvalPoint pt{Cpx{sigma(rng), tpart(rng)}, Cpx{sigma(rng), tpart(rng)}};
    CHECK(std::abs(evaluate(x, pt)) <= l1_norm(x) * (1.0 + 1e-12));
    Cpx lhs = evaluate(convolve(x, y), pt);
    Cpx rhs = evaluate(x, pt) * evaluate(y, pt);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("Neumann iteration agrees with the formal inverse") {
  BoxSpec box = BoxSpec::square(std::uint64_t{1} << 10);
  NeumannResult<Cpx> id = neumann_inverse(SeriesD::identity(), box);
  CHECK(id.inverse == SeriesD::identity());
  CHECK(id.terms_used == 1);

  SeriesD a;
  a.set(1, 1, Cpx{2, 0});
  a.set(2, 1, Cpx{1, 0});
  NeumannResult<Cpx> result = neumann_inverse(a, box, 1e-12);
  SeriesD direct = invert_formal(a, box);
  CHECK(max_abs_diff(result.inverse, direct) <= 1e-10);

  SeriesD b;
  b.set(1, 1, Cpx{1, 0});
  b.set(2, 1, Cpx{0.4, 0});
  b.set(1, 2, Cpx{0.4, 0});
  NeumannResult<Cpx> rb = neumann_inverse(b, BoxSpec::square(64), 1e-12);
  CHECK(max_abs_diff(rb.inverse, invert_formal(b, BoxSpec::square(64))) <= 1e-10);

  SeriesD fat;
  fat.set(1, 1, Cpx{1, 0});
  fat.set(2, 1, Cpx{2, 0});
  CHECK_THROWS_WITH_AS(neumann_inverse(fat, box), doctest::Contains("not contractive"),
                       std::domain_error);
}

TEST_CASE("series files round-trip") {
  SeriesQ a;
  a.set(1, 1, rc(2));
  a.set(2, 1, RatC(Rat(-1, 3), Rat(7, 11)));
  a.set(6, 4, rc(5, 8));
  LoadedSeries out;
  out.header.exact = true;
  out.header.p = 0.5;
  out.header.weight_spec = "twoadic";
  out.table = a;

  std::ostringstream text;
  write_series(text, a, out.header);
  std::istringstream in(text.str());
  LoadedSeries back = parse_series(in, "roundtrip");
  CHECK(back.header.exact);
  CHECK(*back.header.p == 0.5);
  CHECK(*back.header.weight_spec == "twoadic");
  CHECK(back.exact_table() == a);

  std::ostringstream second;
  write_series(second, back.exact_table(), back.header);
  CHECK(second.str() == text.str());  // bit-exact round trip

  SeriesD f;
  f.set(1, 1, Cpx{0.1, -2.5e-17});
  f.set(3, 9, Cpx{1.0 / 3.0, 0});
  std::ostringstream ftext;
  write_series(ftext, f, SeriesFileHeader{});
  std::istringstream fin(ftext.str());
  CHECK(parse_series(fin, "float").float_table() == f);
}

TEST_CASE("series parse errors carry line numbers") {
  std::istringstream bad("# mode exact\n1 1 2\n0 3 1\n");
  try {
    parse_series(bad, "bad");
    CHECK(false);
  } catch (const SeriesParseError& e) {
    CHECK(e.line_number == 3);
  }
  std::istringstream malformed("# mode exact\n2 2 1/0\n");
  CHECK_THROWS_AS(parse_series(malformed, "zero-den"), SeriesParseError);
  std::istringstream badmode("# mode half\n");
  CHECK_THROWS_AS(parse_series(badmode, "mode"), SeriesParseError);
  std::istringstream dup("1 1 2\n1 1 3\n");
  CHECK_THROWS_AS(parse_series(dup, "dup"), SeriesParseError);
  std::istringstream nonfinite("1 1 inf\n");
  CHECK_THROWS_AS(parse_series(nonfinite, "inf"), SeriesParseError);
}
