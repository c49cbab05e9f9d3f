#include "dirichlet2d/series.hpp"

#include <cstdio>
#include <queue>

namespace dirichlet2d {

std::string ScalarOps<Cpx>::to_string(const Cpx& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
  return buf;
}

SeriesD to_float(const SeriesQ& a) {
  SeriesD::Map entries;
  for (const auto& [idx, v] : a.entries()) entries.emplace(idx, to_cpx(v));
  return SeriesD(std::move(entries));
}

std::vector<Index2> inverse_support_order(const std::vector<Index2>& generators, const BoxSpec& box,
                                          std::size_t support_limit) {
  std::map<Index2, std::uint64_t> omega;  // element -> big_omega(m*n)
  std::vector<std::pair<Index2, std::uint64_t>> gen_omega;
  gen_omega.reserve(generators.size());
  for (Index2 g : generators)
    gen_omega.emplace_back(g, big_omega(factorize(g.m)) + big_omega(factorize(g.n)));

  omega[{1, 1}] = 0;
  std::deque<Index2> frontier{{1, 1}};
  while (!frontier.empty()) {
    Index2 x = frontier.front();
    frontier.pop_front();
    std::uint64_t ox = omega.at(x);
    for (const auto& [g, og] : gen_omega) {
      auto y = try_mul(x, g);
      if (!y || !box.contains(*y)) continue;
      if (omega.emplace(*y, ox + og).second) {
        if (omega.size() > support_limit)
          throw std::length_error("inverse support closure exceeds " +
                                  std::to_string(support_limit) + " elements");
        frontier.push_back(*y);
      }
    }
  }
  std::vector<Index2> order;
  order.reserve(omega.size());
  for (const auto& [idx, o] : omega) order.push_back(idx);
  std::stable_sort(order.begin(), order.end(), [&](Index2 a, Index2 b) {
    std::uint64_t oa = omega.at(a), ob = omega.at(b);
    if (oa != ob) return oa < ob;
    return a < b;
  });
  return order;
}

namespace {

Cpx complex_negative_power(std::uint64_t base, Cpx s) {
  // base^(-s) = exp(-s log base)
  double lb = std::log(static_cast<double>(base));
  return std::exp(Cpx(-s.real() * lb, -s.imag() * lb));
}

}  // namespace

Cpx evaluate(const SeriesD& a, const EvalPoint& pt) {
  Cpx sum{0.0, 0.0};
  for (const auto& [idx, v] : a.entries())
    sum += v * complex_negative_power(idx.m, pt.s1) * complex_negative_power(idx.n, pt.s2);
  return sum;
}

Cpx evaluate(const SeriesQ& a, const EvalPoint& pt) { return evaluate(to_float(a), pt); }

Rat weighted_l1_norm_exact(const SeriesQ& a, const Weight& w) {
  Rat sum(0);
  for (const auto& [idx, v] : a.entries()) {
    if (!v.is_real())
      throw std::domain_error(
          "exact norm is only defined for tables with real rational entries");
    auto wv = w.exact_value(idx.m, idx.n);
    if (!wv)
      throw std::domain_error("weight '" + w.describe() + "' has no exact value at " +
                              index2_to_string(idx));
    sum += abs_exact_real(v) * *wv;
  }
  return sum;
}

}  // namespace dirichlet2d
